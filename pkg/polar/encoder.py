"""
Polar符号化モジュール
- フローズンビット挿入
- 非組織符号化 x = d・F^{⊗n}（バタフライ再帰、N/2・log2(N) XOR）
- 組織符号化（符号化 → 再フローズン → 符号化）
- 部分和生成（SC復号のg演算用）
"""

import logging
from typing import Optional

import numpy as np

from polar.construction import PolarCode

logger = logging.getLogger(__name__)


class XorCounter:
    """XOR演算回数の計測用カウンタ"""

    def __init__(self):
        self.count = 0

    def add(self, n: int):
        self.count += n


def _check_power_of_two(length: int):
    if length < 1 or length & (length - 1):
        raise ValueError(f"length must be a power of two, got {length}")


def encode_nonsystematic(d: np.ndarray, counter: Optional[XorCounter] = None) -> np.ndarray:
    """
    バタフライ構造による x = d・F^{⊗n}（GF(2)）
    Args:
        d: (N,) または (B, N) のビット配列
        counter (XorCounter): XOR回数カウンタ（任意）
    Returns:
        同じ形状の符号語
    """
    x = np.array(d, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    _check_power_of_two(n)
    frames = x.size // n if n else 0

    half = 1
    while half < n:
        # 各ブロック [a, b] → [a ^ b, b]
        view = x.reshape(x.shape[:-1] + (n // (2 * half), 2, half))
        view[..., 0, :] ^= view[..., 1, :]
        if counter is not None:
            counter.add(frames * n // 2)
        half *= 2
    return x


def insert_frozen(msg: np.ndarray, code: PolarCode) -> np.ndarray:
    """
    情報ビット集合Iの位置にメッセージを配置、それ以外はフローズン値
    Args:
        msg: (K,) または (B, K)
        code (PolarCode): 符号
    Returns:
        (N,) または (B, N)
    """
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape[-1] != code.message_length:
        raise ValueError(f"message must be {code.message_length} bits, got {msg.shape[-1]}")
    d = np.full(msg.shape[:-1] + (code.block_length,), code.frozen_value, dtype=np.uint8)
    d[..., code.info_mask] = msg
    return d


def extract_info(d: np.ndarray, code: PolarCode) -> np.ndarray:
    """情報ビット集合Iの位置を読み出す（insert_frozen の逆）"""
    d = np.asarray(d, dtype=np.uint8)
    if d.shape[-1] != code.block_length:
        raise ValueError(f"vector must be {code.block_length} bits, got {d.shape[-1]}")
    return d[..., code.info_mask]


def encode_systematic(msg: np.ndarray, code: PolarCode, counter: Optional[XorCounter] = None) -> np.ndarray:
    """
    組織符号化（符号語のI位置にメッセージがそのまま現れる）
    Args:
        msg: (K,) または (B, K)
        code (PolarCode): 符号
    Returns:
        符号語 (N,) または (B, N)
    """
    v = encode_nonsystematic(insert_frozen(msg, code), counter)
    v[..., ~code.info_mask] = code.frozen_value
    return encode_nonsystematic(v, counter)


def partial_sums(u_prefix: np.ndarray, stage: int) -> np.ndarray:
    """
    部分和生成器（PSG）: 判定済みビットを 2^stage 長の符号化器で再符号化
    Args:
        u_prefix: (L,) または (B, L)、L は 2^stage の倍数
        stage (int): 段番号（ブロック長 2^stage）
    Returns:
        g演算に渡す部分和ベクトル（同じ形状）
    """
    u_prefix = np.asarray(u_prefix, dtype=np.uint8)
    block = 1 << stage
    length = u_prefix.shape[-1]
    if length == 0 or length % block:
        raise ValueError(f"prefix length {length} is not a multiple of the stage block size {block}")

    blocks = u_prefix.reshape(u_prefix.shape[:-1] + (length // block, block))
    return encode_nonsystematic(blocks).reshape(u_prefix.shape)


class PolarEncoder:
    """送信側Polar符号化器（NSPE / SPE）"""

    def __init__(self, code: PolarCode, systematic: bool = False):
        """
        初期化
        Args:
            code (PolarCode): 符号
            systematic (bool): True で組織符号化（SPE）
        """
        self.code = code
        self.systematic = systematic
        self.counter = XorCounter()
        self.logger = logging.getLogger(__name__)
        self.logger.debug(
            f"Polar encoder initialized ({code.block_length};{code.message_length}, "
            f"{'SPE' if systematic else 'NSPE'})"
        )

    def encode(self, msg: np.ndarray) -> np.ndarray:
        """メッセージ（K ビット）を符号語（N ビット）に変換"""
        if self.systematic:
            return encode_systematic(msg, self.code, self.counter)
        return encode_nonsystematic(insert_frozen(msg, self.code), self.counter)

    def message_from_codeword(self, codeword: np.ndarray) -> np.ndarray:
        """組織符号の符号語からメッセージを読み出す"""
        return extract_info(codeword, self.code)
