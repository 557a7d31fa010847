"""
Polar符号構成モジュール
Bhattacharyyaパラメータ再帰による情報ビット集合の選択と符号記述ファイルの入出力
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from config import PolarConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolarCode:
    """Polar符号 (N, K, I)"""
    block_length: int
    message_length: int
    info_set: Tuple[int, ...]
    frozen_value: int = 0
    method: str = 'bhattacharyya'
    design_param: float = 2.0
    info_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.block_length
        if n < 1 or n & (n - 1):
            raise ValueError(f"block length must be a power of two, got {n}")
        if len(self.info_set) != self.message_length:
            raise ValueError("info set size must equal K")
        if len(set(self.info_set)) != len(self.info_set):
            raise ValueError("info set contains duplicate indices")
        if any(i < 0 or i >= n for i in self.info_set):
            raise ValueError("info set index out of range")
        if self.frozen_value not in (0, 1):
            raise ValueError("frozen value must be a bit")

        object.__setattr__(self, 'info_set', tuple(sorted(self.info_set)))
        mask = np.zeros(n, dtype=bool)
        mask[list(self.info_set)] = True
        mask.setflags(write=False)
        object.__setattr__(self, 'info_mask', mask)

    @property
    def n_stages(self) -> int:
        return self.block_length.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.message_length / self.block_length

    @property
    def frozen_set(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(~self.info_mask))


def bhattacharyya_parameters(block_length: int, design_param: float) -> np.ndarray:
    """
    合成チャネルのBhattacharyyaパラメータ（対数領域）
    自然順インデックス（x = d・F^n）では、インデックスの上位ビットが最初の分極段に対応する
    Args:
        block_length (int): 符号長N
        design_param (float): 設計Eb/N0（dB）、z0 = exp(-10^(dB/10))
    Returns:
        ndarray: log z（小さいほど信頼性が高い）
    """
    log_z = np.array([-(10.0 ** (design_param / 10.0))])
    stages = block_length.bit_length() - 1
    for _ in range(stages):
        z = np.exp(log_z)
        worse = log_z + np.log(2.0 - z)  # 2z - z^2
        better = 2.0 * log_z             # z^2
        log_z = np.stack([worse, better], axis=1).ravel()
    return log_z


def construct_code(block_length: int, message_length: int, design_param: float = 2.0) -> PolarCode:
    """
    信頼性上位K個のインデックスを情報ビット集合に選ぶ（同値はインデックスの小さい方を優先）
    Args:
        block_length (int): N（2のべき）
        message_length (int): K
        design_param (float): 設計Eb/N0（dB）
    Returns:
        PolarCode: 符号
    """
    if block_length < 1 or block_length & (block_length - 1):
        raise ValueError(f"block length must be a power of two, got {block_length}")
    if not 0 < message_length <= block_length:
        raise ValueError(f"K must satisfy 0 < K <= N, got K={message_length}, N={block_length}")

    log_z = bhattacharyya_parameters(block_length, design_param)
    order = np.lexsort((np.arange(block_length), log_z))
    info_set = tuple(sorted(int(i) for i in order[:message_length]))

    logger.debug(f"Constructed ({block_length};{message_length}) polar code at {design_param} dB")
    return PolarCode(block_length, message_length, info_set, design_param=design_param)


def save_code(code: PolarCode, path: str):
    """符号記述ファイルの書き出し（N, K, design_param, フローズンインデックス一覧）"""
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write("# polar code description\n")
        handle.write(f"N {code.block_length}\n")
        handle.write(f"K {code.message_length}\n")
        handle.write(f"method {code.method}\n")
        handle.write(f"design_param {code.design_param!r}\n")
        handle.write("frozen " + ' '.join(str(i) for i in code.frozen_set) + "\n")


def load_code(path: str) -> PolarCode:
    """符号記述ファイルの読み込み"""
    values = {}
    with open(path, 'r', encoding='utf-8') as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, _, rest = line.partition(' ')
            values[key] = rest.strip()

    try:
        n = int(values['N'])
        k = int(values['K'])
        frozen = {int(i) for i in values.get('frozen', '').split()}
    except (KeyError, ValueError) as e:
        raise ValueError(f"malformed code description file {path}: {e}") from None

    if len(frozen) != n - k:
        raise ValueError(f"code description lists {len(frozen)} frozen indices, expected {n - k}")
    info_set = tuple(i for i in range(n) if i not in frozen)
    return PolarCode(
        n, k, info_set,
        method=values.get('method', 'file'),
        design_param=float(values.get('design_param', 'nan')),
    )


def code_from_config(config: Optional[PolarConfig] = None) -> PolarCode:
    """設定から符号を取得（符号記述ファイル優先）"""
    config = config or PolarConfig()
    if config.code_file:
        code = load_code(config.code_file)
        if (code.block_length, code.message_length) != (config.block_length, config.message_length):
            raise ValueError("code description file does not match configured N/K")
        return code
    return construct_code(config.block_length, config.message_length, config.design_snr_db)
