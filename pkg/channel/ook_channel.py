"""
OOK変調 / AWGNチャネル / 厳密LLR受信機モジュール
- OOK: ビット1 → level1、ビット0 → level0（1ビット1サンプル）
- AWGN: 平均0、標準偏差σのガウス雑音
- 厳密LLR: 等分散ガウス、等事前確率
"""

import logging
import math
from typing import Optional

import numpy as np
import numpy.typing as npt

from config import ChannelConfig
from polar.decoder import LLR_MAX

SampleBlock = npt.NDArray[np.float64]

logger = logging.getLogger(__name__)


def ook_modulate(bits, cfg: ChannelConfig) -> SampleBlock:
    """ビット列を電圧サンプル列に変換"""
    bits = np.asarray(bits, dtype=np.uint8)
    return np.where(bits == 1, cfg.level1, cfg.level0).astype(np.float64)


def eb_n0_to_sigma(eb_n0_db: float, code_rate: float, cfg: ChannelConfig) -> float:
    """
    情報ビットあたりEb/N0から雑音標準偏差を算出
    σ = (Δ/2)・10^(-(Eb/N0[dB] + 10・log10(R))/20)・√(1/2)、Δ = level1 - level0
    （Es = (Δ/2)^2 = R・Eb、N0 = 2σ^2）
    """
    if code_rate <= 0 or code_rate > 1:
        raise ValueError(f"code rate must be in (0, 1], got {code_rate}")
    delta = cfg.level1 - cfg.level0
    return (delta / 2.0) * 10.0 ** (-(eb_n0_db + 10.0 * math.log10(code_rate)) / 20.0) * math.sqrt(0.5)


def resolve_sigma(cfg: ChannelConfig, code_rate: float) -> float:
    """noise_sigma が未指定なら eb_n0_db から算出"""
    if cfg.noise_sigma is not None:
        return cfg.noise_sigma
    return eb_n0_to_sigma(cfg.eb_n0_db, code_rate, cfg)


def awgn(block: SampleBlock, cfg: ChannelConfig, rng: Optional[np.random.Generator] = None) -> SampleBlock:
    """
    AWGN付加（rng未指定時は cfg.seed から決定的に生成）
    Args:
        block: 電圧サンプル列
        cfg (ChannelConfig): チャネル設定（noise_sigma 必須）
    Returns:
        雑音付きサンプル列
    """
    if cfg.noise_sigma is None or cfg.noise_sigma <= 0:
        raise ValueError("noise sigma must be positive")
    rng = rng or np.random.default_rng(cfg.seed)
    block = np.asarray(block, dtype=np.float64)
    return block + cfg.noise_sigma * rng.standard_normal(block.shape)


def exact_llr(sample, cfg: ChannelConfig, sigma: Optional[float] = None):
    """
    厳密LLR ln P(x=0|y)/P(x=1|y)（正 ⇒ level0 に近い）
    σ0 = σ1 のとき [(y-μ1)^2 - (y-μ0)^2] / (2σ^2)
    """
    sigma0 = sigma if sigma is not None else cfg.noise_sigma
    if sigma0 is None or sigma0 <= 0:
        raise ValueError("noise sigma must be positive")
    sigma1 = cfg.noise_sigma1 or sigma0

    y = np.asarray(sample, dtype=np.float64)
    if sigma1 == sigma0:
        llr = ((y - cfg.level1) ** 2 - (y - cfg.level0) ** 2) / (2.0 * sigma0 ** 2)
    else:
        llr = (math.log(sigma1 / sigma0)
               + (y - cfg.level1) ** 2 / (2.0 * sigma1 ** 2)
               - (y - cfg.level0) ** 2 / (2.0 * sigma0 ** 2))
    llr = np.clip(llr, -LLR_MAX, LLR_MAX)
    return float(llr) if llr.ndim == 0 else llr


def hard_llr(sample, cfg: ChannelConfig):
    """硬判定: 最近接レベル判定を ±1 のLLRとして返す（中点は +1）"""
    y = np.asarray(sample, dtype=np.float64)
    midpoint = (cfg.level0 + cfg.level1) / 2.0
    llr = np.where(y <= midpoint, 1.0, -1.0)
    return float(llr) if llr.ndim == 0 else llr


class OOKChannel:
    """OOK送信 + AWGNチャネル（インスタンスごとに独立した乱数ストリーム）"""

    def __init__(self, config: ChannelConfig, code_rate: float = 1.0):
        """
        初期化
        Args:
            config (ChannelConfig): チャネル設定
            code_rate (float): Eb/N0換算用の符号化率
        """
        if config.level1 <= config.level0:
            raise ValueError("OOK levels must satisfy level1 > level0")
        self.config = config
        self.code_rate = code_rate
        self.sigma = resolve_sigma(config, code_rate)
        self.sigma1 = config.noise_sigma1 or self.sigma
        self.rng = np.random.default_rng(config.seed)
        self.logger = logging.getLogger(__name__)
        self.logger.debug(f"OOK channel initialized (sigma={self.sigma:.5g}, pairing={config.noise_pairing})")

    def modulate(self, bits) -> SampleBlock:
        return ook_modulate(bits, self.config)

    def transmit(self, bits, noise: Optional[np.ndarray] = None) -> SampleBlock:
        """
        変調 + 雑音付加
        Args:
            bits: 送信ビット列
            noise: 標準正規雑音（未指定時は自身の乱数ストリームから生成）
        Returns:
            受信サンプル列
        """
        bits = np.asarray(bits, dtype=np.uint8)
        if noise is None:
            noise = self.rng.standard_normal(bits.shape)
        # mirrored: 雑音を送信ビットの向きに揃える
        if self.config.noise_pairing == 'mirrored':
            noise = noise * (1.0 - 2.0 * bits)
        sigma = np.where(bits == 1, self.sigma1, self.sigma)
        return self.modulate(bits) + sigma * noise

    def llr(self, samples):
        return exact_llr(samples, self.config, self.sigma)

    def hard_llr(self, samples):
        return hard_llr(samples, self.config)
