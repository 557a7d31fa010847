"""
フリッカー抑制評価モジュール
- 出力ビット確率分布（1ビット比率）
- ランレングス統計
- 最小フリッカーフリー周波数 F_minFM
- 入力ビット偏り 0%〜100% のスイープ
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import ScramblerConfig
from framing.scrambler import Scrambler
from polar.construction import PolarCode
from polar.encoder import PolarEncoder

logger = logging.getLogger(__name__)


@dataclass
class RunLengthStats:
    """ランレングス統計（0の連続、1の連続、両方）"""
    max_run: int
    histogram: Dict[int, int]
    histogram_zeros: Dict[int, int]
    histogram_ones: Dict[int, int]
    max_run_zeros: int = 0
    max_run_ones: int = 0

    @property
    def run_count(self) -> int:
        return sum(self.histogram.values())


@dataclass
class BitRatioReport:
    """フレームごとの1ビット比率（%）"""
    percentages: np.ndarray = field(repr=False)
    min_pct: float = 0.0
    max_pct: float = 0.0

    @classmethod
    def from_percentages(cls, percentages) -> 'BitRatioReport':
        percentages = np.asarray(percentages, dtype=np.float64)
        if percentages.size == 0:
            return cls(percentages, 0.0, 0.0)
        return cls(percentages, float(percentages.min()), float(percentages.max()))


@dataclass
class FlickerPoint:
    """スイープ1点の集計"""
    zero_pct: int
    min_ratio: float
    max_ratio: float
    max_run_scrambled: int
    max_run_plain: int

    @property
    def gain(self) -> float:
        return self.max_run_plain / self.max_run_scrambled


@dataclass
class FlickerSweep:
    """
    スイープ結果
    ratio_report: 最悪ケース入力（0ビット割合 worst_case_zero_pct）の点の比率
    grid_report: 全点を合わせた比率
    """
    points: List[FlickerPoint]
    ratio_report: BitRatioReport
    grid_report: Optional[BitRatioReport] = None
    prescramble: bool = True
    worst_case_zero_pct: Optional[int] = None

    def point(self, zero_pct: int) -> Optional[FlickerPoint]:
        for p in self.points:
            if p.zero_pct == zero_pct:
                return p
        return None

    @property
    def max_run(self) -> int:
        """評価対象チェーンのスイープ全体の最大ランレングス"""
        if self.prescramble:
            return max(max(p.max_run_scrambled, 1) for p in self.points)
        return max(max(p.max_run_plain, 1) for p in self.points)


def bit_ratio(frame) -> float:
    """1ビットの割合（%）"""
    bits = np.asarray(frame).ravel()
    if bits.size == 0:
        raise ValueError("empty frame")
    return 100.0 * float(np.count_nonzero(bits)) / bits.size


def _run_lengths(bits: np.ndarray):
    boundaries = np.flatnonzero(np.diff(bits.astype(np.int8)) != 0)
    ends = np.concatenate([boundaries, [bits.size - 1]])
    starts = np.concatenate([[0], boundaries + 1])
    return ends - starts + 1, bits[starts]


def run_length_stats(frame) -> RunLengthStats:
    """
    連続する同一シンボルの統計
    Args:
        frame (BitVector): ビット列
    Returns:
        RunLengthStats: 最大ランとヒストグラム
    """
    bits = np.asarray(frame, dtype=np.uint8).ravel()
    if bits.size == 0:
        raise ValueError("empty frame")

    lengths, symbols = _run_lengths(bits)

    def histogram(values) -> Dict[int, int]:
        unique, counts = np.unique(values, return_counts=True)
        return {int(u): int(c) for u, c in zip(unique, counts)}

    zeros = lengths[symbols == 0]
    ones = lengths[symbols == 1]
    return RunLengthStats(
        max_run=int(lengths.max()),
        histogram=histogram(lengths),
        histogram_zeros=histogram(zeros),
        histogram_ones=histogram(ones),
        max_run_zeros=int(zeros.max()) if zeros.size else 0,
        max_run_ones=int(ones.max()) if ones.size else 0,
    )


def max_runs(frames: np.ndarray) -> np.ndarray:
    """(B, L) の各行の最大ランレングス"""
    frames = np.atleast_2d(np.asarray(frames, dtype=np.uint8))
    current = np.ones(frames.shape[0], dtype=np.int64)
    best = current.copy()
    for j in range(1, frames.shape[1]):
        same = frames[:, j] == frames[:, j - 1]
        current = np.where(same, current + 1, 1)
        np.maximum(best, current, out=best)
    return best


def f_min_flicker(max_run: int, mftp: float, literal: bool = False) -> float:
    """
    フリッカー抑制が保証される最小送信周波数（Hz）
    既定: F = maxRL / MFTP、literal=True: F = 1 / (MFTP・maxRL)
    """
    if max_run < 1 or mftp <= 0:
        raise ValueError("max_run and mftp must be positive")
    if literal:
        return 1.0 / (mftp * max_run)
    return max_run / mftp


def biased_frames(rng: np.random.Generator, frames: int, length: int, zero_pct: float,
                  exact_count: bool = False) -> np.ndarray:
    """
    0ビットの割合を指定したランダムフレームを生成
    Args:
        rng: 乱数生成器
        frames (int): フレーム数
        length (int): フレーム長
        zero_pct (float): 0ビットの割合（%）
        exact_count (bool): True でゼロ数を固定しシャッフル、False でベルヌーイ
    Returns:
        (frames, length) のビット配列
    """
    p_zero = zero_pct / 100.0
    if exact_count:
        n_zeros = int(round(p_zero * length))
        template = np.ones((frames, length), dtype=np.uint8)
        template[:, :n_zeros] = 0
        return rng.permuted(template, axis=1)
    return (rng.random((frames, length)) >= p_zero).astype(np.uint8)


def flicker_sweep(code: PolarCode, frames: int, grid: Sequence[int], systematic: bool = False,
                  prescramble: bool = True, scrambler_config: Optional[ScramblerConfig] = None,
                  master_seed: int = 0, exact_count: bool = False,
                  worst_case_zero_pct: int = 10) -> FlickerSweep:
    """
    入力ビット偏りのスイープ
    各点で同じペイロード集合をスクランブルあり／なしで符号化し、比率とランレングスを集計
    ペイロードの乱数は (master_seed, 0ビット割合) から導出するため、グリッドの取り方に依存しない
    Args:
        code (PolarCode): 符号（フレーム長はK）
        frames (int): 1点あたりのフレーム数
        grid: 0ビット割合（%）の列
        systematic (bool): True で SPE、False で NSPE
        prescramble (bool): 比率を評価するチェーンでスクランブラを使うか
        scrambler_config (ScramblerConfig): スクランブラ設定
        master_seed (int): マスターシード
        exact_count (bool): ゼロ数固定フレーム
        worst_case_zero_pct (int): 比率範囲を報告する点（0ビット割合 %）
    Returns:
        FlickerSweep: 点ごとの集計、最悪ケース点と全点の比率
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")

    encoder = PolarEncoder(code, systematic)
    scrambler = Scrambler(scrambler_config)
    points = []
    all_ratios = []
    worst_ratios = None

    for zero_pct in grid:
        rng = np.random.default_rng([master_seed, int(zero_pct)])
        data = biased_frames(rng, frames, code.message_length, zero_pct, exact_count)

        plain = encoder.encode(data)
        scrambled = encoder.encode(scrambler.scramble(data))
        output = scrambled if prescramble else plain

        ratios = 100.0 * output.sum(axis=1) / code.block_length
        all_ratios.append(ratios)
        if int(zero_pct) == worst_case_zero_pct:
            worst_ratios = ratios

        point = FlickerPoint(
            zero_pct=int(zero_pct),
            min_ratio=float(ratios.min()),
            max_ratio=float(ratios.max()),
            max_run_scrambled=int(max_runs(scrambled).max()),
            max_run_plain=int(max_runs(plain).max()),
        )
        points.append(point)
        logger.debug(
            f"zero={zero_pct}%: ratio=({point.min_ratio:.2f}, {point.max_ratio:.2f}), "
            f"max run {point.max_run_plain} -> {point.max_run_scrambled}"
        )

    grid_report = BitRatioReport.from_percentages(np.concatenate(all_ratios) if all_ratios else [])
    if worst_ratios is None:
        logger.warning(f"{worst_case_zero_pct}% zeros not on the grid; reporting the whole-grid ratio range")
        return FlickerSweep(points, grid_report, grid_report, prescramble)
    return FlickerSweep(points, BitRatioReport.from_percentages(worst_ratios), grid_report, prescramble,
                        worst_case_zero_pct)
