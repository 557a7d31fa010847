"""
システム設定ファイル
フレーム構成、スクランブラ、Polar符号、受信フィルタ、チャネル、シミュレーションのパラメータ管理
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import os
import typing
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

# Table 3 の出力LLR値（領域0 = 最上位電圧側）
TABLE3_LLR_MAPPING: Tuple[float, ...] = (
    1.2017, 0.3630, 0.2185, 0.0656, -0.0702, -0.2116, -0.3547, -1.1943
)

QUANTIZER_MODES = ('exact', '3bit', 'hard')
PEAK_SOURCES = ('levels', 'manual', 'training')
NOISE_PAIRINGS = ('additive', 'mirrored')
F_KERNELS = ('min-sum', 'exact')
CODINGS = ('polar', 'uncoded')


@dataclass
class FrameConfig:
    """ビーコンフレーム設定（JEITA 158ビットフレーム）"""
    # SOF: プリアンブル（6ビット）+ フレームタイプ（8ビット）
    preamble: str = '101010'
    frame_type: int = 0x01

    # CRC-16/CCITT-FALSE
    crc_poly: int = 0x1021
    crc_init: int = 0xFFFF
    crc_xorout: int = 0x0000

    # True: SOF+ペイロードにCRC計算、False: ペイロードのみ
    crc_covers_sof: bool = True


@dataclass
class ScramblerConfig:
    """プリスクランブラ設定"""
    # 生成多項式の係数 c_0..c_degree（既定 P(x) = x^4 + x^3 + 1）
    coefficients: Tuple[int, ...] = (1, 0, 0, 1, 1)

    # 初期状態（0以外）
    seed: int = 0b1111

    enabled: bool = True

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def taps(self) -> Tuple[int, ...]:
        """帰還に使う次数（c_q = 1, q >= 1）"""
        return tuple(q for q, c in enumerate(self.coefficients) if q >= 1 and c)


@dataclass
class PolarConfig:
    """Polar符号設定"""
    block_length: int = 256
    message_length: int = 158

    # Bhattacharyya構成の設計Eb/N0（dB）
    design_snr_db: float = 2.0

    systematic: bool = False
    f_kernel: str = 'min-sum'

    # 符号記述ファイル（指定時はフローズン集合をファイルから読み込み）
    code_file: Optional[str] = None


@dataclass
class QuantizerConfig:
    """3ビット軟判定フィルタ設定"""
    # exact: 厳密LLR / 3bit: 軟判定フィルタ / hard: 硬判定
    mode: str = '3bit'

    # ピーク電圧の決め方
    peak_source: str = 'levels'
    v_peak_plus: Optional[float] = None
    v_peak_minus: Optional[float] = None
    training_length: int = 32

    # 反転型受信フロントエンド（TIA）
    inverting_front_end: bool = True

    mapping: Tuple[float, ...] = TABLE3_LLR_MAPPING
    mapping_file: Optional[str] = None


@dataclass
class ChannelConfig:
    """OOK / AWGNチャネル設定"""
    level0: float = -1.0
    level1: float = 1.0

    # None の場合は eb_n0_db と符号化率から算出
    noise_sigma: Optional[float] = None
    noise_sigma1: Optional[float] = None
    eb_n0_db: float = 4.0

    noise_pairing: str = 'additive'
    seed: int = 0


@dataclass
class SimulationConfig:
    """BER/FERシミュレーション設定"""
    eb_n0_start: float = 0.0
    eb_n0_stop: float = 8.0
    eb_n0_step: float = 1.0
    trials: int = 10000
    batch_size: int = 500
    coding: str = 'polar'

    def grid(self) -> List[float]:
        count = math.floor((self.eb_n0_stop - self.eb_n0_start) / self.eb_n0_step + 1e-9) + 1
        return [round(self.eb_n0_start + i * self.eb_n0_step, 10) for i in range(count)]


@dataclass
class FlickerConfig:
    """フリッカー解析設定"""
    frames: int = 10000
    zero_pct_start: int = 0
    zero_pct_stop: int = 100
    zero_pct_step: int = 1

    # True: ゼロ数を固定してシャッフル、False: ベルヌーイ
    exact_count: bool = False

    # 比率範囲を報告する最悪ケース入力（0ビット割合 %）
    worst_case_zero_pct: int = 10

    # 最大フリッカー時間周期（秒）
    mftp_s: float = 0.005
    literal_fmin: bool = False

    def grid(self) -> List[int]:
        return list(range(self.zero_pct_start, self.zero_pct_stop + 1, self.zero_pct_step))


@dataclass
class OutputConfig:
    """出力設定"""
    ber_csv: str = 'ber_curve.csv'
    flicker_csv: str = 'flicker.csv'
    code_file: str = 'polar_code.txt'
    plot_script: bool = False


@dataclass
class SystemConfig:
    """システム設定"""
    log_level: str = 'INFO'
    log_file_path: Optional[str] = None
    master_seed: int = 20200101
    workers: int = 1


SECTIONS = {
    'frame': FrameConfig,
    'scrambler': ScramblerConfig,
    'polar': PolarConfig,
    'quantizer': QuantizerConfig,
    'channel': ChannelConfig,
    'simulation': SimulationConfig,
    'flicker': FlickerConfig,
    'output': OutputConfig,
    'system': SystemConfig,
}

# 環境変数 → (セクション, フィールド)
ENVIRONMENT_OVERRIDES = {
    'VLC_MASTER_SEED': ('system', 'master_seed'),
    'VLC_LOG_LEVEL': ('system', 'log_level'),
    'VLC_LOG_FILE': ('system', 'log_file_path'),
    'VLC_WORKERS': ('system', 'workers'),
    'VLC_SCRAMBLER_SEED': ('scrambler', 'seed'),
    'VLC_DESIGN_SNR_DB': ('polar', 'design_snr_db'),
    'VLC_TRIALS': ('simulation', 'trials'),
}

CONFIG_PATH_ENV = 'VLC_BEACON_CONFIG'


def _parse_value(text: str, hint):
    """INI文字列をフィールド型に変換"""
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)

    if origin is typing.Union:
        # Optional[T]
        if text.strip() == '':
            return None
        inner = [a for a in args if a is not type(None)][0]
        return _parse_value(text, inner)

    if origin is tuple:
        item_type = args[0]
        return tuple(_parse_value(part.strip(), item_type) for part in text.split(',') if part.strip())

    if hint is bool:
        lowered = text.strip().lower()
        if lowered in ('1', 'true', 'yes', 'on'):
            return True
        if lowered in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError(f"Invalid boolean value: {text!r}")

    if hint is int:
        return int(text.strip(), 0)

    if hint is float:
        return float(text)

    return text.strip()


def _format_value(value) -> str:
    """フィールド値をINI文字列に変換"""
    if value is None:
        return ''
    if isinstance(value, tuple):
        return ', '.join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """設定管理クラス"""

    def __init__(self, load_environment: bool = True):
        self.frame = FrameConfig()
        self.scrambler = ScramblerConfig()
        self.polar = PolarConfig()
        self.quantizer = QuantizerConfig()
        self.channel = ChannelConfig()
        self.simulation = SimulationConfig()
        self.flicker = FlickerConfig()
        self.output = OutputConfig()
        self.system = SystemConfig()

        # 環境変数から設定を上書き
        if load_environment:
            self.load_from_environment()

    def set_value(self, section: str, name: str, text: str):
        """文字列値をセクションのフィールドに設定"""
        if section not in SECTIONS:
            raise ValueError(f"Unknown config section: [{section}]")
        cls = SECTIONS[section]
        hints = typing.get_type_hints(cls)
        if name not in hints:
            raise ValueError(f"Unknown config key: [{section}] {name}")
        setattr(getattr(self, section), name, _parse_value(text, hints[name]))

    def load_from_environment(self):
        """環境変数からの設定読み込み"""
        for variable, (section, name) in ENVIRONMENT_OVERRIDES.items():
            value = os.getenv(variable)
            if value:
                self.set_value(section, name, value)

    def load(self, path: str) -> 'RunConfig':
        """設定ファイル（INI形式）の読み込み"""
        parser = configparser.ConfigParser()
        with open(path, 'r', encoding='utf-8') as handle:
            parser.read_file(handle)

        for section in parser.sections():
            for name, text in parser.items(section):
                self.set_value(section, name, text)
        return self

    def save(self, path: str):
        """設定ファイル（INI形式）の書き出し"""
        parser = configparser.ConfigParser()
        for section, values in self.get_all_config().items():
            parser[section] = {
                f.name: _format_value(getattr(values, f.name))
                for f in dataclasses.fields(values)
            }
        with open(path, 'w', encoding='utf-8') as handle:
            parser.write(handle)

    def get_all_config(self) -> Dict[str, object]:
        """全設定の取得"""
        return {section: getattr(self, section) for section in SECTIONS}

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.get_all_config() == other.get_all_config()

    def validate_config(self) -> List[str]:
        """設定の妥当性チェック"""
        errors = []

        # フレーム
        if len(self.frame.preamble) != 6 or set(self.frame.preamble) - {'0', '1'}:
            errors.append("Preamble must be a 6-bit pattern of 0/1")
        if not 0 <= self.frame.frame_type <= 0xFF:
            errors.append(f"Frame type out of 8-bit range: {self.frame.frame_type}")
        for name in ('crc_poly', 'crc_init', 'crc_xorout'):
            if not 0 <= getattr(self.frame, name) <= 0xFFFF:
                errors.append(f"CRC parameter {name} out of 16-bit range")

        # スクランブラ
        coefficients = self.scrambler.coefficients
        if len(coefficients) < 2 or set(coefficients) - {0, 1}:
            errors.append("Scrambler coefficients must be 0/1 with degree >= 1")
        elif coefficients[0] != 1 or coefficients[-1] != 1:
            errors.append("Scrambler polynomial needs c_0 = 1 and a leading coefficient of 1")
        elif not 0 < self.scrambler.seed < (1 << self.scrambler.degree):
            errors.append(f"Scrambler seed must be nonzero and fit {self.scrambler.degree} bits")

        # Polar符号
        n = self.polar.block_length
        if n < 2 or n & (n - 1):
            errors.append(f"Block length must be a power of two: {n}")
        if not 0 < self.polar.message_length <= n:
            errors.append(f"Message length must satisfy 0 < K <= N: {self.polar.message_length}")
        if self.polar.f_kernel not in F_KERNELS:
            errors.append(f"Unknown f kernel: {self.polar.f_kernel}")

        # 量子化器
        q = self.quantizer
        if q.mode not in QUANTIZER_MODES:
            errors.append(f"Unknown quantizer mode: {q.mode}")
        if q.peak_source not in PEAK_SOURCES:
            errors.append(f"Unknown peak source: {q.peak_source}")
        if q.mode == '3bit' and q.peak_source == 'manual':
            if q.v_peak_plus is None or q.v_peak_minus is None:
                errors.append("Quantizer peaks undefined for manual peak source")
            elif q.v_peak_plus <= q.v_peak_minus:
                errors.append("Quantizer peak levels must satisfy v_peak_plus > v_peak_minus")
        if q.peak_source == 'training' and q.training_length < 2:
            errors.append("Training prefix needs at least 2 samples")
        if len(q.mapping) != 8:
            errors.append(f"LLR mapping needs 8 entries, got {len(q.mapping)}")
        elif any(a < b for a, b in zip(q.mapping, q.mapping[1:])):
            errors.append("LLR mapping must be non-increasing with region index")

        # チャネル
        c = self.channel
        if c.level1 <= c.level0:
            errors.append("OOK levels must satisfy level1 > level0")
        if c.noise_sigma is not None and c.noise_sigma <= 0:
            errors.append("Noise sigma must be positive")
        if c.noise_sigma1 is not None and c.noise_sigma1 <= 0:
            errors.append("Per-level noise sigma must be positive")
        if c.noise_pairing not in NOISE_PAIRINGS:
            errors.append(f"Unknown noise pairing: {c.noise_pairing}")

        # シミュレーション
        s = self.simulation
        if s.eb_n0_step <= 0 or s.eb_n0_stop < s.eb_n0_start:
            errors.append("Invalid Eb/N0 grid")
        if s.trials < 1 or s.batch_size < 1:
            errors.append("Trials and batch size must be >= 1")
        if s.coding not in CODINGS:
            errors.append(f"Unknown coding: {s.coding}")

        # フリッカー
        fl = self.flicker
        if fl.frames < 1:
            errors.append("Flicker frames must be >= 1")
        if not (0 <= fl.zero_pct_start <= fl.zero_pct_stop <= 100) or fl.zero_pct_step < 1:
            errors.append("Invalid zero-percentage grid")
        if not 0 <= fl.worst_case_zero_pct <= 100:
            errors.append("Worst-case zero percentage must be within 0..100")
        if fl.mftp_s <= 0:
            errors.append("MFTP must be positive")

        if self.system.workers < 1:
            errors.append("Workers must be >= 1")

        return errors


def load_config(path: Optional[str] = None) -> RunConfig:
    """
    既定値 < 設定ファイル < 環境変数 の順で設定を構築
    Args:
        path (str): 設定ファイルパス（Noneの場合は VLC_BEACON_CONFIG を参照）
    Returns:
        RunConfig: 設定
    """
    config = RunConfig(load_environment=False)
    path = path or os.getenv(CONFIG_PATH_ENV)
    if path:
        config.load(path)
    config.load_from_environment()
    return config
