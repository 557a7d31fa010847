"""
逐次除去（SC）Polar復号モジュール
- f演算（チェックノード）: min-sum 既定、tanh 領域の厳密式も選択可
- g演算（変数ノード）: 部分和によって加算／減算
- 部分和は PSG（各サイズのPolar符号化器による再符号化）で生成
- 複数フレームをまとめて (B, N) で復号
"""

import logging
from typing import Tuple

import numpy as np

from polar.construction import PolarCode
from polar.encoder import encode_nonsystematic, partial_sums

LLR_MAX = 20.0

logger = logging.getLogger(__name__)


def f_op(a, b, kernel: str = 'min-sum', llr_max: float = LLR_MAX):
    """
    チェックノード更新
    min-sum: sign(a)・sign(b)・min(|a|, |b|)
    exact:   2・atanh(tanh(a/2)・tanh(b/2))
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if kernel == 'min-sum':
        result = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    elif kernel == 'exact':
        product = np.tanh(a / 2.0) * np.tanh(b / 2.0)
        product = np.clip(product, -1.0 + 1e-15, 1.0 - 1e-15)
        result = 2.0 * np.arctanh(product)
    else:
        raise ValueError(f"unknown f kernel: {kernel}")
    return np.clip(result, -llr_max, llr_max)


def g_op(a, b, partial_sum, llr_max: float = LLR_MAX):
    """変数ノード更新: 部分和0なら b + a、1なら b - a"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sign = 1.0 - 2.0 * np.asarray(partial_sum, dtype=np.float64)
    return np.clip(b + sign * a, -llr_max, llr_max)


class SCDecoder:
    """SC Polar復号器（インスタンスは同時に1スレッドから使用）"""

    def __init__(self, code: PolarCode, systematic: bool = False,
                 kernel: str = 'min-sum', llr_max: float = LLR_MAX):
        """
        初期化
        Args:
            code (PolarCode): 符号
            systematic (bool): True で符号語のI位置をメッセージとして返す（SPE）
            kernel (str): f演算の種類（'min-sum' / 'exact'）
            llr_max (float): LLR飽和値
        """
        if kernel not in ('min-sum', 'exact'):
            raise ValueError(f"unknown f kernel: {kernel}")
        self.code = code
        self.systematic = systematic
        self.kernel = kernel
        self.llr_max = llr_max
        self.logger = logging.getLogger(__name__)

        # 部分木ごとの情報ビット数（全フローズンの部分木は探索を省略）
        self._info_prefix = np.concatenate([[0], np.cumsum(code.info_mask)])
        self._u_hat = None

    def _has_info(self, offset: int, size: int) -> bool:
        return self._info_prefix[offset + size] > self._info_prefix[offset]

    def decode(self, llrs) -> Tuple[np.ndarray, np.ndarray]:
        """
        SC復号
        Args:
            llrs: (N,) または (B, N) のLLR（正 ⇒ ビット0）
        Returns:
            tuple: (メッセージ (K,)/(B, K), 再符号化した符号語推定 (N,)/(B, N))
        """
        llrs = np.asarray(llrs, dtype=np.float64)
        single = llrs.ndim == 1
        alpha = np.atleast_2d(llrs)
        n = self.code.block_length
        if alpha.shape[-1] != n:
            raise ValueError(f"expected {n} LLRs, got {alpha.shape[-1]}")
        if np.isnan(alpha).any():
            raise ValueError("NaN LLR in decoder input")
        alpha = np.clip(alpha, -self.llr_max, self.llr_max)

        self._u_hat = np.zeros(alpha.shape, dtype=np.uint8)
        self._decode_node(alpha, 0)
        u_hat = self._u_hat
        self._u_hat = None

        codeword = encode_nonsystematic(u_hat)
        source = codeword if self.systematic else u_hat
        message = source[:, self.code.info_mask]

        if single:
            return message[0], codeword[0]
        return message, codeword

    def _decode_node(self, alpha: np.ndarray, offset: int):
        size = alpha.shape[-1]

        if not self._has_info(offset, size):
            self._u_hat[:, offset:offset + size] = self.code.frozen_value
            return

        if size == 1:
            # LLR = 0 はビット0
            self._u_hat[:, offset] = alpha[:, 0] < 0
            return

        half = size // 2
        a = alpha[:, :half]
        b = alpha[:, half:]

        self._decode_node(f_op(a, b, self.kernel, self.llr_max), offset)
        beta = partial_sums(self._u_hat[:, offset:offset + half], half.bit_length() - 1)
        self._decode_node(g_op(a, b, beta, self.llr_max), offset + half)


def sc_decode(llrs, code: PolarCode, systematic: bool = False,
              kernel: str = 'min-sum') -> Tuple[np.ndarray, np.ndarray]:
    """(メッセージ, 符号語推定) を返す"""
    return SCDecoder(code, systematic, kernel).decode(llrs)
