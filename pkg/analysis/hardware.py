"""
ハードウェア性能指標の計算
スループット = N / D_N、エネルギー/ビット = 電力 / スループット、ハードウェア効率 = スループット / 面積
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class HardwareMetrics:
    throughput_bps: float
    energy_per_bit_j: float
    hw_efficiency_bps_per_m2: float

    @property
    def throughput_mbps(self) -> float:
        return self.throughput_bps / 1e6

    @property
    def energy_per_bit_pj(self) -> float:
        return self.energy_per_bit_j * 1e12

    @property
    def hw_efficiency_mbps_per_mm2(self) -> float:
        # 1 mm^2 = 1e-6 m^2
        return self.hw_efficiency_bps_per_m2 / 1e6 * 1e-6


def latency_from_clocks(clocks: int, frequency_hz: float) -> float:
    """クロック数と動作周波数から処理時間（秒）"""
    if clocks <= 0 or frequency_hz <= 0:
        raise ValueError("clocks and frequency must be positive")
    return clocks / frequency_hz


def hw_metrics(n_bits: float, latency_s: float, power_w: float, area_m2: float) -> HardwareMetrics:
    """
    Args:
        n_bits: 1ブロックのビット数
        latency_s: 1ブロックの処理時間（秒）
        power_w: 消費電力（W）
        area_m2: 面積（m^2）
    Returns:
        HardwareMetrics
    """
    if min(n_bits, latency_s, power_w, area_m2) <= 0:
        raise ValueError("all hardware inputs must be positive")
    throughput = n_bits / latency_s
    return HardwareMetrics(throughput, power_w / throughput, throughput / area_m2)


def metrics_from_throughput(throughput_bps: float, power_w: float, area_m2: float) -> HardwareMetrics:
    """スループットが既知の場合"""
    return hw_metrics(throughput_bps, 1.0, power_w, area_m2)


# ASIC合成結果（180nm、1.8V、25MHz）: スループット b/s、電力 W、面積 m^2
PRESETS = {
    'transmitter': {'throughput_bps': 15.38e6, 'power_w': 1.3137e-3, 'area_m2': 48761.39e-12},
    'receiver': {'throughput_bps': 16.58e6, 'power_w': 3.5022e-3, 'area_m2': 573724.56e-12},
}


def preset_metrics(name: str) -> HardwareMetrics:
    if name not in PRESETS:
        raise ValueError(f"unknown hardware preset: {name}")
    return metrics_from_throughput(**PRESETS[name])
