"""
プリスクランブラ／デスクランブラ制御モジュール
- 加算型（同期型）LFSRスクランブラ
- 生成多項式: P(x) = x^4 + x^3 + 1（4レジスタ + XOR 1個）
- フレームごとに初期状態へリセット
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from config import ScramblerConfig
from framing.bit_utils import BitVector


def lfsr_next(state: int, cfg: ScramblerConfig) -> Tuple[int, int]:
    """
    LFSRを1ステップ進める（フィボナッチ型）
    レジスタkはビット(k-1)に格納、出力は最高次レジスタからシフトアウトされるビット
    Args:
        state (int): レジスタ内容
        cfg (ScramblerConfig): スクランブラ設定
    Returns:
        tuple: (キーストリームビット, 次状態)
    """
    degree = cfg.degree
    mask = (1 << degree) - 1
    if state & mask == 0:
        raise ValueError("degenerate LFSR state")

    output = (state >> (degree - 1)) & 1
    feedback = 0
    for tap in cfg.taps:
        feedback ^= (state >> (tap - 1)) & 1
    next_state = ((state << 1) | feedback) & mask
    return output, next_state


@lru_cache(maxsize=64)
def _keystream(coefficients: Tuple[int, ...], seed: int, length: int) -> bytes:
    cfg = ScramblerConfig(coefficients=coefficients, seed=seed)
    state = seed
    stream = bytearray(length)
    for i in range(length):
        stream[i], state = lfsr_next(state, cfg)
    return bytes(stream)


def keystream(cfg: ScramblerConfig, length: int) -> BitVector:
    """シード状態から始まるlengthビットのキーストリーム"""
    raw = _keystream(tuple(cfg.coefficients), cfg.seed, length)
    return np.frombuffer(raw, dtype=np.uint8).copy()


class Scrambler:
    """加算型スクランブラ（スクランブル／デスクランブルは同一演算）"""

    def __init__(self, config: Optional[ScramblerConfig] = None):
        """
        初期化
        Args:
            config (ScramblerConfig): スクランブラ設定
        """
        self.config = config or ScramblerConfig()
        self.logger = logging.getLogger(__name__)

        if self.config.coefficients[0] != 1:
            raise ValueError("scrambler polynomial needs c_0 = 1")
        if self.config.seed & ((1 << self.config.degree) - 1) == 0:
            raise ValueError("degenerate LFSR state")

        self.logger.debug(
            f"Scrambler initialized (taps: {self.config.taps}, seed: {self.config.seed:#x})"
        )

    def scramble(self, data: np.ndarray) -> np.ndarray:
        """
        スクランブル（フレーム単位、最終軸に沿ってXOR）
        Args:
            data: (L,) または (B, L) のビット配列
        Returns:
            同じ形状のビット配列
        """
        data = np.asarray(data, dtype=np.uint8)
        if data.shape[-1] == 0:
            return data.copy()
        return data ^ keystream(self.config, data.shape[-1])

    def descramble(self, data: np.ndarray) -> np.ndarray:
        """デスクランブル（加算型なので scramble と同一）"""
        return self.scramble(data)


def scramble(data: BitVector, cfg: Optional[ScramblerConfig] = None) -> BitVector:
    return Scrambler(cfg).scramble(data)


def descramble(data: BitVector, cfg: Optional[ScramblerConfig] = None) -> BitVector:
    return Scrambler(cfg).descramble(data)
