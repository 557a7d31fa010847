"""
3ビット軟判定フィルタ制御モジュール
- ピーク電圧から7つのしきい値電圧 V_t-3 .. V_t+3 を算出
- 8領域コンパレータバンク → LLRマッピングテーブル（Table 3）
- Transformer: 9ビット固定小数点（Q2.6）へ量子化
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config import TABLE3_LLR_MAPPING, QuantizerConfig

N_REGIONS = 8
FRACTION_BITS = 6
RAW_MIN = -256
RAW_MAX = 255

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdSet:
    """しきい値電圧（昇順: V_t-3, V_t-2, V_t-1, V_t, V_t+1, V_t+2, V_t+3）"""
    v_peak_plus: float
    v_peak_minus: float
    levels: Tuple[float, ...]

    @property
    def v_t(self) -> float:
        return self.levels[3]

    @property
    def step(self) -> float:
        return (self.v_peak_plus - self.v_t) / 4.0


@dataclass(frozen=True)
class LlrMapping:
    """領域番号 → LLR値（領域0 = [V_peak+; V_t+3]）"""
    values: Tuple[float, ...] = TABLE3_LLR_MAPPING

    def __post_init__(self):
        if len(self.values) != N_REGIONS:
            raise ValueError(f"LLR mapping needs {N_REGIONS} entries, got {len(self.values)}")
        if any(a < b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("LLR mapping must be non-increasing with region index")

    def lookup(self, regions) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)[np.asarray(regions)]


@dataclass(frozen=True, eq=False)
class LlrFixed:
    """9ビット2の補数 Q2.6 のLLR（範囲 [-4.0, +3.984375]、分解能 1/64）"""
    raw: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.raw.astype(np.float64) / (1 << FRACTION_BITS)

    def __len__(self):
        return self.raw.shape[-1]


def compute_thresholds(v_peak_plus: float, v_peak_minus: float) -> ThresholdSet:
    """
    しきい値電圧の算出
    V_t = (V_peak+ + V_peak-)/2, V_t±k = V_t ± k・(V_peak+ - V_t)/4
    """
    if not v_peak_plus > v_peak_minus:
        raise ValueError("degenerate peak levels")
    v_t = (v_peak_plus + v_peak_minus) / 2.0
    step = (v_peak_plus - v_t) / 4.0
    levels = tuple(v_t + k * step for k in range(-3, 4))
    return ThresholdSet(v_peak_plus, v_peak_minus, levels)


def classify(samples, thr: ThresholdSet) -> np.ndarray:
    """
    コンパレータバンク: 電圧を領域0..7に分類
    しきい値と等しいサンプルは上側の領域、ピーク外はそれぞれ端の領域に入る
    """
    above = np.searchsorted(np.asarray(thr.levels), np.asarray(samples, dtype=np.float64), side='right')
    return (N_REGIONS - 1) - above


def quantize_sample(sample, thr: ThresholdSet, mapping: Optional[LlrMapping] = None):
    """電圧（スカラーまたは配列）をTable 3のLLRに変換"""
    mapping = mapping or LlrMapping()
    llr = mapping.lookup(classify(sample, thr))
    return float(llr) if np.ndim(llr) == 0 else llr


def transform(llr) -> LlrFixed:
    """
    Transformer: Q2.6 へ最近接偶数丸め、範囲外は飽和
    Args:
        llr: 実数LLR（スカラーまたは配列）
    Returns:
        LlrFixed: 9ビット固定小数点LLR
    """
    scaled = np.rint(np.asarray(llr, dtype=np.float64) * (1 << FRACTION_BITS))
    raw = np.clip(scaled, RAW_MIN, RAW_MAX).astype(np.int16)
    return LlrFixed(raw)


def quantize_frame(samples, thr: ThresholdSet, mapping: Optional[LlrMapping] = None,
                   expected_length: Optional[int] = None) -> LlrFixed:
    """フレーム単位の quantize_sample ∘ transform"""
    samples = np.asarray(samples, dtype=np.float64)
    if expected_length is not None and samples.shape[-1] != expected_length:
        raise ValueError(f"expected {expected_length} samples, got {samples.shape[-1]}")
    return transform(quantize_sample(samples, thr, mapping))


def estimate_peaks(training_samples) -> Tuple[float, float]:
    """トレーニング区間の最大値／最小値をピーク電圧とする"""
    samples = np.asarray(training_samples, dtype=np.float64)
    if samples.size < 2:
        raise ValueError("training prefix needs at least 2 samples")
    if samples.size < 16:
        logger.warning(f"Peak estimate from a short training prefix ({samples.size} samples)")
    return float(samples.max()), float(samples.min())


def calibrate_mapping(samples, bits, thr: ThresholdSet, inverting_front_end: bool = True) -> LlrMapping:
    """
    ラベル付きサンプルから領域ごとの経験LLR ln(P(領域|0)/P(領域|1)) を算出
    （ラプラス平滑化、単調性は累積最大で補正）
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    bits = np.asarray(bits).ravel()
    if samples.shape != bits.shape:
        raise ValueError("samples and bits must have the same length")
    if inverting_front_end:
        samples = 2.0 * thr.v_t - samples

    regions = classify(samples, thr)
    zeros = np.bincount(regions[bits == 0], minlength=N_REGIONS) + 1.0
    ones = np.bincount(regions[bits == 1], minlength=N_REGIONS) + 1.0
    llr = np.log((zeros / zeros.sum()) / (ones / ones.sum()))

    # 非増加列に補正
    llr = np.minimum.accumulate(llr)
    return LlrMapping(tuple(float(v) for v in llr))


def load_mapping(path: str) -> LlrMapping:
    """マッピングファイル（8行: 領域番号 LLR）の読み込み"""
    values = [None] * N_REGIONS
    with open(path, 'r', encoding='utf-8') as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            parts = line.replace(',', ' ').split()
            if len(parts) != 2:
                raise ValueError(f"malformed mapping line: {line!r}")
            region, value = int(parts[0]), float(parts[1])
            if not 0 <= region < N_REGIONS:
                raise ValueError(f"region index out of range: {region}")
            values[region] = value
    if any(v is None for v in values):
        raise ValueError("mapping file must define all 8 regions")
    return LlrMapping(tuple(values))


def save_mapping(mapping: LlrMapping, path: str):
    with open(path, 'w', encoding='utf-8') as handle:
        for region, value in enumerate(mapping.values):
            handle.write(f"{region} {value!r}\n")


class SoftDecisionFilter:
    """受信側3ビット軟判定フィルタ"""

    def __init__(self, thresholds: ThresholdSet, mapping: Optional[LlrMapping] = None,
                 inverting_front_end: bool = True):
        """
        初期化
        Args:
            thresholds (ThresholdSet): しきい値電圧
            mapping (LlrMapping): 出力LLRテーブル
            inverting_front_end (bool): 反転型フロントエンド（V_t で折り返してから比較）
        """
        self.thresholds = thresholds
        self.mapping = mapping or LlrMapping()
        self.inverting_front_end = inverting_front_end
        self.logger = logging.getLogger(__name__)
        self.logger.debug(
            f"Soft-decision filter initialized (V_t={thresholds.v_t:.4f}, step={thresholds.step:.4f})"
        )

    @classmethod
    def from_config(cls, config: QuantizerConfig, v_peak_plus: float, v_peak_minus: float) -> 'SoftDecisionFilter':
        mapping = load_mapping(config.mapping_file) if config.mapping_file else LlrMapping(tuple(config.mapping))
        return cls(compute_thresholds(v_peak_plus, v_peak_minus), mapping, config.inverting_front_end)

    def front_end(self, samples) -> np.ndarray:
        samples = np.asarray(samples, dtype=np.float64)
        if self.inverting_front_end:
            return 2.0 * self.thresholds.v_t - samples
        return samples

    def filter(self, samples, expected_length: Optional[int] = None) -> LlrFixed:
        """
        サンプル列 → 9ビットLLR列
        Args:
            samples: (N,) または (B, N) の電圧
        Returns:
            LlrFixed: 固定小数点LLR
        """
        return quantize_frame(self.front_end(samples), self.thresholds, self.mapping, expected_length)

    def regions(self, samples: Sequence[float]) -> np.ndarray:
        return classify(self.front_end(samples), self.thresholds)
