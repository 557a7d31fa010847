"""
JEITAビーコンフレーム符号化モジュール
- SOF: 6ビットプリアンブル + 8ビットフレームタイプ
- ペイロード: 128ビットID
- CRC: 16ビット
- 合計158ビット（フィールド境界 0, 6, 14, 142）
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config import FrameConfig
from framing.bit_utils import BitVector, as_bits, bits_to_int, int_to_bits

PREAMBLE_BITS = 6
FRAME_TYPE_BITS = 8
PAYLOAD_BITS = 128
CRC_BITS = 16
FRAME_BITS = PREAMBLE_BITS + FRAME_TYPE_BITS + PAYLOAD_BITS + CRC_BITS

FRAME_TYPE_OFFSET = PREAMBLE_BITS
PAYLOAD_OFFSET = FRAME_TYPE_OFFSET + FRAME_TYPE_BITS
CRC_OFFSET = PAYLOAD_OFFSET + PAYLOAD_BITS


def crc16(data: BitVector, poly: int = 0x1021, init: int = 0xFFFF, xorout: int = 0x0000) -> int:
    """
    ビットシリアルCRC-16（非反転、MSBファースト）
    Args:
        data (BitVector): 入力ビット列
        poly (int): 生成多項式（x^16 を除く）
        init (int): レジスタ初期値
        xorout (int): 出力XOR
    Returns:
        int: 16ビットCRC値
    """
    bits = np.asarray(data).ravel()
    if bits.size == 0:
        raise ValueError("empty data")

    crc = init
    for bit in bits:
        msb = (crc >> 15) & 1
        crc = (crc << 1) & 0xFFFF
        if msb ^ int(bit):
            crc ^= poly
    return crc ^ xorout


@dataclass(frozen=True, eq=False)
class BeaconFrame:
    """構造化されたビーコンフレーム"""
    preamble: BitVector
    frame_type: int
    payload: BitVector
    crc: int

    def to_bits(self) -> BitVector:
        return np.concatenate([
            self.preamble,
            int_to_bits(self.frame_type, FRAME_TYPE_BITS),
            self.payload,
            int_to_bits(self.crc, CRC_BITS),
        ]).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class DecapsulatedFrame:
    """フレーム分解結果"""
    payload: BitVector
    frame_type: int
    crc_ok: bool
    preamble_ok: bool


class FrameCodec:
    """ビーコンフレームのカプセル化／分解"""

    def __init__(self, config: Optional[FrameConfig] = None):
        """
        初期化
        Args:
            config (FrameConfig): フレーム設定
        """
        self.config = config or FrameConfig()
        self.logger = logging.getLogger(__name__)
        self.preamble = as_bits(self.config.preamble)
        if len(self.preamble) != PREAMBLE_BITS:
            raise ValueError(f"preamble must be {PREAMBLE_BITS} bits")

    def checksum(self, sof_and_payload: BitVector) -> int:
        """設定に従ってCRCを計算（SOF+ペイロード または ペイロードのみ）"""
        covered = sof_and_payload if self.config.crc_covers_sof else sof_and_payload[PAYLOAD_OFFSET:]
        return crc16(covered, self.config.crc_poly, self.config.crc_init, self.config.crc_xorout)

    def build(self, payload: BitVector, frame_type: Optional[int] = None) -> BeaconFrame:
        """
        構造化フレームを生成
        Args:
            payload (BitVector): 128ビットID
            frame_type (int): フレームタイプ（Noneの場合は設定値）
        Returns:
            BeaconFrame: フレーム
        """
        payload = as_bits(payload)
        if payload.shape != (PAYLOAD_BITS,):
            raise ValueError("payload must be 128 bits")
        frame_type = self.config.frame_type if frame_type is None else frame_type
        if not 0 <= frame_type <= 0xFF:
            raise ValueError("frame_type must fit 8 bits")

        head = np.concatenate([self.preamble, int_to_bits(frame_type, FRAME_TYPE_BITS), payload])
        return BeaconFrame(self.preamble.copy(), frame_type, payload, self.checksum(head))

    def encapsulate(self, payload: BitVector, frame_type: Optional[int] = None) -> BitVector:
        """ペイロードを158ビットフレームに変換"""
        return self.build(payload, frame_type).to_bits()

    def encapsulate_batch(self, payloads: np.ndarray, frame_type: Optional[int] = None) -> np.ndarray:
        """(B, 128) のペイロードを (B, 158) のフレームに変換"""
        payloads = np.atleast_2d(payloads)
        return np.stack([self.encapsulate(p, frame_type) for p in payloads])

    def decapsulate(self, frame: BitVector) -> DecapsulatedFrame:
        """
        フレーム分解（SOF/CRCを除去しIDを取り出す）
        Args:
            frame (BitVector): 158ビットフレーム
        Returns:
            DecapsulatedFrame: ペイロード、フレームタイプ、CRC/プリアンブル判定
        """
        frame = as_bits(frame)
        if frame.shape != (FRAME_BITS,):
            raise ValueError("frame must be 158 bits")

        preamble = frame[:FRAME_TYPE_OFFSET]
        frame_type = bits_to_int(frame[FRAME_TYPE_OFFSET:PAYLOAD_OFFSET])
        payload = frame[PAYLOAD_OFFSET:CRC_OFFSET].copy()
        received_crc = bits_to_int(frame[CRC_OFFSET:])

        crc_ok = self.checksum(frame[:CRC_OFFSET]) == received_crc
        preamble_ok = bool(np.array_equal(preamble, self.preamble))

        if not crc_ok:
            self.logger.debug("CRC mismatch in decapsulated frame")
        return DecapsulatedFrame(payload, frame_type, crc_ok, preamble_ok)


def encapsulate(payload: BitVector, frame_type: int = 0x01, config: Optional[FrameConfig] = None) -> BitVector:
    """preamble ‖ frame_type ‖ payload ‖ crc16(...) を返す"""
    return FrameCodec(config).encapsulate(payload, frame_type)


def decapsulate(frame: BitVector, config: Optional[FrameConfig] = None) -> Tuple[BitVector, int, bool, bool]:
    """(payload, frame_type, crc_ok, preamble_ok) を返す"""
    result = FrameCodec(config).decapsulate(frame)
    return result.payload, result.frame_type, result.crc_ok, result.preamble_ok
