"""
BER/FER モンテカルロシミュレーション
- 試行ごとの乱数は (マスターシード, スイープ点, 試行番号) から導出
- バッチ単位でワーカースレッドに分配し、集計は順序に依存しない
"""

import logging
import queue
import threading
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.stats import norm

from analysis.beacon_link import BeaconLink
from channel.ook_channel import eb_n0_to_sigma
from config import RunConfig
from framing.frame_codec import FRAME_BITS, PAYLOAD_BITS

logger = logging.getLogger(__name__)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilsonスコア区間"""
    if trials <= 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2.0)
    p = successes / trials
    denominator = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denominator
    half = z * np.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denominator
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class TrialReport:
    """試行集計"""
    trials: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    crc_failures: int = 0
    payload_errors: int = 0
    bits_per_frame: int = FRAME_BITS
    eb_n0_db: Optional[float] = None
    sigma: Optional[float] = None
    master_seed: Optional[int] = None
    theoretical_ber: Optional[float] = None

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_frame) if self.trials else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials if self.trials else 0.0

    @property
    def fer_interval(self) -> Tuple[float, float]:
        return wilson_interval(self.frame_errors, self.trials)

    @property
    def fer_ci(self) -> float:
        """FERのWilson区間の半幅"""
        low, high = self.fer_interval
        return (high - low) / 2.0

    @property
    def ber_ci(self) -> float:
        low, high = wilson_interval(self.bit_errors, self.trials * self.bits_per_frame)
        return (high - low) / 2.0

    def merge(self, other: 'TrialReport') -> 'TrialReport':
        """カウントを加算（結合的）"""
        self.trials += other.trials
        self.bit_errors += other.bit_errors
        self.frame_errors += other.frame_errors
        self.crc_failures += other.crc_failures
        self.payload_errors += other.payload_errors
        return self


def uncoded_ook_ber(sigma: float, level0: float, level1: float) -> float:
    """非符号化OOKの理論BER Q(Δ/(2σ))"""
    return float(norm.sf((level1 - level0) / (2.0 * sigma)))


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, point_index, trial_index])


class MonteCarloSimulator:
    """BER/FERシミュレータ"""

    def __init__(self, config: RunConfig):
        """
        初期化
        Args:
            config (RunConfig): 実行設定
        """
        errors = config.validate_config()
        if errors:
            raise ValueError("; ".join(errors))
        self.config = config
        self.logger = logging.getLogger(__name__)

        # 設定の整合性確認（符号長、ピーク電圧）
        link = BeaconLink(config)
        self.code = link.code
        self.code_rate = link.code_rate
        self.symbols = link.symbols_per_frame

    def sigma_for(self, eb_n0_db: Optional[float]) -> float:
        channel = self.config.channel
        if eb_n0_db is None:
            if channel.noise_sigma is not None:
                return channel.noise_sigma
            eb_n0_db = channel.eb_n0_db
        return eb_n0_to_sigma(eb_n0_db, self.code_rate, channel)

    def _run_batch(self, link: BeaconLink, sigma: float, point_index: int, start: int, stop: int) -> TrialReport:
        """試行 [start, stop) をまとめて実行"""
        master_seed = self.config.system.master_seed
        training_length = self.config.quantizer.training_length
        need_training = self.config.quantizer.mode == '3bit' and self.config.quantizer.peak_source == 'training'

        payloads, noises, trainings = [], [], []
        for trial in range(start, stop):
            rng = trial_rng(master_seed, point_index, trial)
            payloads.append(rng.integers(0, 2, PAYLOAD_BITS, dtype=np.uint8))
            noises.append(rng.standard_normal(self.symbols))
            if need_training:
                trainings.append(rng.standard_normal(training_length))

        channel_config = self.config.channel
        channel = link.channel(_with_sigma(channel_config, sigma))

        frames, tx_bits = link.transmit_bits(np.stack(payloads))
        samples = channel.transmit(tx_bits, np.stack(noises))

        training = None
        if need_training:
            pattern = np.broadcast_to(link.training_bits(), (stop - start, training_length))
            training = channel.transmit(pattern, np.stack(trainings))

        received = link.decode_llrs(link.llrs(samples, sigma, training))

        wrong = received.frames != frames
        report = TrialReport(
            trials=stop - start,
            bit_errors=int(wrong.sum()),
            frame_errors=int(wrong.any(axis=1).sum()),
            crc_failures=sum(1 for d in received.decapsulated if not d.crc_ok),
            payload_errors=sum(
                1 for d, p in zip(received.decapsulated, payloads) if not np.array_equal(d.payload, p)
            ),
        )
        return report

    def run_point(self, eb_n0_db: Optional[float] = None, trials: Optional[int] = None,
                  point_index: int = 0) -> TrialReport:
        """
        1つのEb/N0点でモンテカルロ試行
        Args:
            eb_n0_db (float): Eb/N0（dB）、Noneの場合はチャネル設定の値
            trials (int): 試行数
            point_index (int): シード導出用のスイープ点番号
        Returns:
            TrialReport: 集計結果
        """
        trials = self.config.simulation.trials if trials is None else trials
        if trials < 1:
            raise ValueError("trials must be >= 1")
        sigma = self.sigma_for(eb_n0_db)
        batch_size = self.config.simulation.batch_size
        batches = [(s, min(s + batch_size, trials)) for s in range(0, trials, batch_size)]
        workers = min(self.config.system.workers, len(batches))

        total = TrialReport(
            bits_per_frame=FRAME_BITS,
            eb_n0_db=eb_n0_db,
            sigma=sigma,
            master_seed=self.config.system.master_seed,
        )
        if self.config.simulation.coding == 'uncoded':
            c = self.config.channel
            total.theoretical_ber = uncoded_ook_ber(sigma, c.level0, c.level1)

        if workers <= 1:
            link = BeaconLink(self.config, self.code)
            for start, stop in batches:
                total.merge(self._run_batch(link, sigma, point_index, start, stop))
        else:
            for partial in self._run_threaded(batches, workers, sigma, point_index):
                total.merge(partial)

        self.logger.info(
            f"Eb/N0={eb_n0_db} dB (sigma={sigma:.4g}): trials={total.trials} "
            f"BER={total.ber:.3e} FER={total.fer:.3e}"
        )
        return total

    def _run_threaded(self, batches, workers: int, sigma: float, point_index: int) -> List[TrialReport]:
        """ワーカースレッドにバッチを分配"""
        jobs = queue.Queue()
        results = queue.Queue()
        for batch in batches:
            jobs.put(batch)

        def worker_loop():
            link = BeaconLink(self.config, self.code)
            while True:
                try:
                    start, stop = jobs.get_nowait()
                except queue.Empty:
                    return
                try:
                    results.put(self._run_batch(link, sigma, point_index, start, stop))
                except Exception as e:
                    self.logger.error(f"Monte-Carlo worker error: {e}")
                    results.put(e)

        threads = [threading.Thread(target=worker_loop, daemon=True) for _ in range(workers)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()

        collected = []
        while not results.empty():
            item = results.get()
            if isinstance(item, Exception):
                raise item
            collected.append(item)
        return collected

    def sweep(self, grid: Optional[List[float]] = None,
              progress: Optional[Callable[[int, int, TrialReport], None]] = None) -> List[TrialReport]:
        """Eb/N0グリッド全体のスイープ"""
        grid = self.config.simulation.grid() if grid is None else grid
        reports = []
        for index, eb_n0_db in enumerate(grid):
            report = self.run_point(eb_n0_db, point_index=index)
            reports.append(report)
            if progress:
                progress(index, len(grid), report)
        return reports


def _with_sigma(channel_config, sigma: float):
    return replace(channel_config, noise_sigma=sigma)


def monte_carlo(config: RunConfig, eb_n0_db: Optional[float] = None,
                trials: Optional[int] = None, point_index: int = 0) -> TrialReport:
    """全チェーンのモンテカルロ試行"""
    return MonteCarloSimulator(config).run_point(eb_n0_db, trials, point_index)
