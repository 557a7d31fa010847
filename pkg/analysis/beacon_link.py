"""
非RLLビーコンVLC送受信チェーン
送信: カプセル化 → プリスクランブル → フローズンビット挿入 → Polar符号化 → OOK
受信: 軟判定フィルタ／厳密LLR／硬判定 → SC復号 → デスクランブル → フレーム分解
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from channel.ook_channel import OOKChannel, exact_llr, hard_llr
from config import ChannelConfig, RunConfig
from framing.frame_codec import FRAME_BITS, DecapsulatedFrame, FrameCodec
from framing.scrambler import Scrambler
from polar.construction import PolarCode, code_from_config
from polar.decoder import SCDecoder
from polar.encoder import PolarEncoder
from receiver.soft_decision_filter import SoftDecisionFilter, estimate_peaks


@dataclass(eq=False)
class ReceivedBatch:
    """受信結果"""
    frames: np.ndarray                 # (B, 158) デスクランブル後のフレーム推定
    decapsulated: List[DecapsulatedFrame]


class BeaconLink:
    """送受信チェーン（インスタンスは1ワーカー専用）"""

    def __init__(self, config: RunConfig, code: Optional[PolarCode] = None):
        """
        初期化
        Args:
            config (RunConfig): 実行設定
            code (PolarCode): 符号（Noneの場合は設定から構成）
        """
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.uncoded = config.simulation.coding == 'uncoded'

        self.codec = FrameCodec(config.frame)
        self.scrambler = Scrambler(config.scrambler) if config.scrambler.enabled else None

        self.code = code or code_from_config(config.polar)
        if not self.uncoded and self.code.message_length != FRAME_BITS:
            raise ValueError(
                f"beacon chain needs K = {FRAME_BITS}, configured K = {self.code.message_length}"
            )
        self.encoder = PolarEncoder(self.code, config.polar.systematic)
        self.decoder = SCDecoder(self.code, config.polar.systematic, config.polar.f_kernel)

        q = config.quantizer
        if q.mode == '3bit' and q.peak_source == 'manual' and (q.v_peak_plus is None or q.v_peak_minus is None):
            raise ValueError("quantizer peaks undefined")

    @property
    def code_rate(self) -> float:
        return 1.0 if self.uncoded else self.code.rate

    @property
    def symbols_per_frame(self) -> int:
        return FRAME_BITS if self.uncoded else self.code.block_length

    # 送信側

    def scramble(self, frames: np.ndarray) -> np.ndarray:
        return self.scrambler.scramble(frames) if self.scrambler else np.asarray(frames, dtype=np.uint8)

    def transmit_bits(self, payloads: np.ndarray, frame_type: Optional[int] = None):
        """
        ペイロード → 送信ビット列
        Args:
            payloads: (B, 128)
        Returns:
            tuple: (フレーム (B, 158), 送信ビット (B, N))
        """
        frames = self.codec.encapsulate_batch(payloads, frame_type)
        scrambled = self.scramble(frames)
        if self.uncoded:
            return frames, scrambled
        return frames, self.encoder.encode(scrambled)

    # 受信側

    def channel(self, channel_config: Optional[ChannelConfig] = None) -> OOKChannel:
        return OOKChannel(channel_config or self.config.channel, self.code_rate)

    def build_filter(self, training_samples: Optional[np.ndarray] = None) -> SoftDecisionFilter:
        """ピーク電圧の決め方に従って軟判定フィルタを生成"""
        q = self.config.quantizer
        c = self.config.channel
        if q.peak_source == 'levels':
            peaks = (c.level1, c.level0)
        elif q.peak_source == 'manual':
            peaks = (q.v_peak_plus, q.v_peak_minus)
        else:
            if training_samples is None:
                raise ValueError("training samples required for peak estimation")
            peaks = estimate_peaks(training_samples)
        return SoftDecisionFilter.from_config(q, *peaks)

    def training_bits(self) -> np.ndarray:
        """ピーク推定用の交互ビット列"""
        return (np.arange(self.config.quantizer.training_length) % 2).astype(np.uint8)

    def llrs(self, samples: np.ndarray, sigma: float, training: Optional[np.ndarray] = None) -> np.ndarray:
        """
        受信サンプル → 復号器入力LLR
        Args:
            samples: (B, N) の電圧
            sigma (float): 雑音標準偏差（exact モード用）
            training: (B, L) のトレーニング区間サンプル（peak_source = training 用）
        Returns:
            (B, N) のLLR
        """
        mode = self.config.quantizer.mode
        if mode == 'exact':
            return np.asarray(exact_llr(samples, self.config.channel, sigma))
        if mode == 'hard':
            return np.asarray(hard_llr(samples, self.config.channel))

        if self.config.quantizer.peak_source != 'training':
            return self.build_filter().filter(samples).values

        samples = np.atleast_2d(samples)
        rows = [self.build_filter(t).filter(s).values for s, t in zip(samples, training)]
        return np.stack(rows)

    def decode_llrs(self, llrs: np.ndarray) -> ReceivedBatch:
        """LLR → デスクランブル後フレーム → フレーム分解"""
        llrs = np.atleast_2d(llrs)
        if self.uncoded:
            estimate = (llrs < 0).astype(np.uint8)
        else:
            estimate, _ = self.decoder.decode(llrs)
        frames = self.scramble(estimate)
        return ReceivedBatch(frames, [self.codec.decapsulate(f) for f in frames])
