"""
ビット列ユーティリティ
BitVector（uint8の0/1配列、インデックス0が最初に送信されるビット）の変換
"""

from typing import Iterable, Union

import numpy as np
import numpy.typing as npt

BitVector = npt.NDArray[np.uint8]


def as_bits(data: Union[Iterable[int], np.ndarray, str]) -> BitVector:
    """
    0/1の列をBitVectorに変換
    Args:
        data: 0/1の整数列、配列、または '0'/'1' の文字列
    Returns:
        BitVector: uint8配列（コピー）
    """
    if isinstance(data, str):
        if set(data) - {'0', '1'}:
            raise ValueError(f"bit string may contain only 0/1: {data!r}")
        return np.array([int(c) for c in data], dtype=np.uint8)

    bits = np.array(data, dtype=np.int64)
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    return bits.astype(np.uint8)


def int_to_bits(value: int, width: int) -> BitVector:
    """整数をMSBファーストのwidthビット列に変換"""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits: BitVector) -> int:
    """MSBファーストのビット列を整数に変換"""
    value = 0
    for bit in np.asarray(bits).ravel():
        value = (value << 1) | int(bit)
    return value


def bits_to_hex(bits: BitVector) -> str:
    """
    ビット列を16進文字列に変換（4ビット境界まで末尾をゼロ詰め、MSBファースト）
    158ビットのフレームは160ビットに詰めて40桁になる
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    padding = (-len(bits)) % 4
    padded = np.concatenate([bits, np.zeros(padding, dtype=np.uint8)])
    nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    return ''.join(f'{int(n):x}' for n in nibbles).upper()


def hex_to_bits(text: str, n_bits: int) -> BitVector:
    """
    16進文字列をn_bitsビットに変換（末尾の詰めビットは捨てる）
    Args:
        text (str): 16進文字列
        n_bits (int): 取り出すビット数
    Returns:
        BitVector: ビット列
    """
    text = text.strip()
    if text.lower().startswith('0x'):
        text = text[2:]
    expected = (n_bits + 3) // 4
    if len(text) != expected:
        raise ValueError(f"expected {expected} hex characters for {n_bits} bits, got {len(text)}")
    try:
        value = int(text, 16)
    except ValueError:
        raise ValueError(f"malformed hex string: {text!r}") from None
    bits = int_to_bits(value, expected * 4)
    return bits[:n_bits]
