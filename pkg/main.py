#!/usr/bin/env python3
"""
Non-RLL VLC Beacon System
ビーコンフレームの符号化・復号、BER/FERシミュレーション、フリッカー解析のコマンドライン
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from analysis.beacon_link import BeaconLink
from analysis.flicker import bit_ratio, f_min_flicker, flicker_sweep, run_length_stats
from analysis.hardware import PRESETS, hw_metrics, preset_metrics
from analysis.monte_carlo import MonteCarloSimulator
from channel.ook_channel import resolve_sigma
from config import QUANTIZER_MODES, RunConfig, load_config
from display.report_writer import (ReportWriter, format_ber_summary, format_flicker_summary,
                                   format_hw_metrics)
from framing.bit_utils import bits_to_hex, hex_to_bits
from framing.frame_codec import PAYLOAD_BITS
from polar.construction import code_from_config, construct_code, save_code

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
EXIT_USAGE_ERROR = 2


def setup_logging(config: RunConfig):
    """ログ設定"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.system.log_file_path:
        handlers.append(logging.FileHandler(config.system.log_file_path))
    logging.basicConfig(
        level=getattr(logging, config.system.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


def parse_grid(text: str, cast=float) -> List:
    """START:STOP:STEP 形式のグリッド"""
    parts = text.split(':')
    if len(parts) != 3:
        raise ValueError(f"grid must be START:STOP:STEP, got {text!r}")
    try:
        return [cast(p) for p in parts]
    except ValueError:
        raise ValueError(f"invalid grid: {text!r}")


def parse_hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise ValueError(f"malformed hex value: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Non-RLL VLC beacon system")
    parser.add_argument('--config', help="設定ファイル（INI）")
    parser.add_argument('--log-level', help="ログレベル")
    sub = parser.add_subparsers(dest='command', required=True)

    def chain_options(p):
        p.add_argument('--systematic', action='store_true', help="SPE（systematic）")
        p.add_argument('--no-prescramble', action='store_true', help="プリスクランブラ無効")
        p.add_argument('--scrambler-seed', help="スクランブラ初期状態（16進）")

    p = sub.add_parser('encode', help="ペイロードを符号化")
    p.add_argument('--payload', required=True, help="128ビットペイロード（16進32文字）")
    p.add_argument('--frame-type', help="フレームタイプ（16進）")
    chain_options(p)

    p = sub.add_parser('decode', help="受信値を復号")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--llr-file', help="LLRファイル")
    source.add_argument('--sample-file', help="受信電圧ファイル")
    p.add_argument('--quantizer', choices=QUANTIZER_MODES)
    p.add_argument('--ebn0', type=float, help="exact モードのEb/N0（dB）")
    chain_options(p)

    p = sub.add_parser('simulate', help="BER/FERシミュレーション")
    p.add_argument('--ebn0', help="START:STOP:STEP（dB）")
    p.add_argument('--trials', type=int)
    p.add_argument('--quantizer', choices=QUANTIZER_MODES)
    p.add_argument('--uncoded', action='store_true', help="非符号化OOK基準")
    p.add_argument('--workers', type=int)
    p.add_argument('--seed', type=int, help="マスターシード")
    p.add_argument('--output', help="出力CSV")
    p.add_argument('--plot-script', action='store_true')
    chain_options(p)

    p = sub.add_parser('flicker', help="フリッカー解析")
    p.add_argument('--frames', type=int)
    p.add_argument('--grid', help="START:STOP:STEP（%%）")
    p.add_argument('--exact-count', action='store_true', help="ゼロ数固定フレーム")
    p.add_argument('--worst-case', type=int, help="比率範囲を報告する0ビット割合（%%）")
    p.add_argument('--seed', type=int, help="マスターシード")
    p.add_argument('--output', help="出力CSV")
    p.add_argument('--plot-script', action='store_true')
    chain_options(p)

    p = sub.add_parser('code-construct', help="符号記述ファイルの生成")
    p.add_argument('--n', type=int)
    p.add_argument('--k', type=int)
    p.add_argument('--design-snr', type=float)
    p.add_argument('--output')

    p = sub.add_parser('hw-metrics', help="ハードウェア性能指標")
    p.add_argument('--preset', choices=sorted(PRESETS))
    p.add_argument('--bits', type=float)
    p.add_argument('--latency', type=float, help="秒")
    p.add_argument('--power', type=float, help="W")
    p.add_argument('--area', type=float, help="m^2")

    return parser


def apply_arguments(config: RunConfig, args: argparse.Namespace):
    """コマンドライン引数で設定を上書き"""
    if args.log_level:
        config.system.log_level = args.log_level
    if getattr(args, 'systematic', False):
        config.polar.systematic = True
    if getattr(args, 'no_prescramble', False):
        config.scrambler.enabled = False
    if getattr(args, 'scrambler_seed', None):
        config.scrambler.seed = parse_hex(args.scrambler_seed)
    if getattr(args, 'quantizer', None):
        config.quantizer.mode = args.quantizer
    if getattr(args, 'seed', None) is not None:
        config.system.master_seed = args.seed

    if args.command == 'encode' and args.frame_type:
        config.frame.frame_type = parse_hex(args.frame_type)
    elif args.command == 'decode' and args.ebn0 is not None:
        config.channel.eb_n0_db = args.ebn0
    elif args.command == 'simulate':
        if args.ebn0:
            s = config.simulation
            s.eb_n0_start, s.eb_n0_stop, s.eb_n0_step = parse_grid(args.ebn0, float)
        if args.trials is not None:
            config.simulation.trials = args.trials
        if args.uncoded:
            config.simulation.coding = 'uncoded'
        if args.workers is not None:
            config.system.workers = args.workers
        if args.output:
            config.output.ber_csv = args.output
        if args.plot_script:
            config.output.plot_script = True
    elif args.command == 'flicker':
        if args.frames is not None:
            config.flicker.frames = args.frames
        if args.grid:
            f = config.flicker
            f.zero_pct_start, f.zero_pct_stop, f.zero_pct_step = parse_grid(args.grid, int)
        if args.exact_count:
            config.flicker.exact_count = True
        if args.worst_case is not None:
            config.flicker.worst_case_zero_pct = args.worst_case
        if args.output:
            config.output.flicker_csv = args.output
        if args.plot_script:
            config.output.plot_script = True
    elif args.command == 'code-construct':
        if args.n is not None:
            config.polar.block_length = args.n
        if args.k is not None:
            config.polar.message_length = args.k
        if args.design_snr is not None:
            config.polar.design_snr_db = args.design_snr
        if args.output:
            config.output.code_file = args.output


def cmd_encode(args, config: RunConfig) -> int:
    payload = hex_to_bits(args.payload, PAYLOAD_BITS)
    link = BeaconLink(config)
    _, codeword = link.transmit_bits(payload[np.newaxis, :])
    codeword = codeword[0]

    stats = run_length_stats(codeword)
    print(bits_to_hex(codeword))
    print(f"bit-1 ratio: {bit_ratio(codeword):.2f}%")
    print(f"max run length: {stats.max_run} (zeros {stats.max_run_zeros}, ones {stats.max_run_ones})")
    return EXIT_OK


def cmd_decode(args, config: RunConfig) -> int:
    logger = logging.getLogger(__name__)
    link = BeaconLink(config)
    path = args.llr_file or args.sample_file
    values = np.loadtxt(path, dtype=np.float64, ndmin=1).ravel()
    if values.size != link.symbols_per_frame:
        raise ValueError(f"expected {link.symbols_per_frame} entries, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise ValueError("input contains non-finite values")

    if args.llr_file:
        llrs = values
    else:
        sigma = resolve_sigma(config.channel, link.code_rate)
        # 単一フレームではフレーム自身をピーク推定に使う
        training = values[np.newaxis, :] if config.quantizer.peak_source == 'training' else None
        llrs = link.llrs(values[np.newaxis, :], sigma, training)

    result = link.decode_llrs(llrs).decapsulated[0]
    if not result.crc_ok:
        logger.warning("CRC check failed")
    print(bits_to_hex(result.payload))
    print(f"frame_type=0x{result.frame_type:02X} crc_ok={result.crc_ok} preamble_ok={result.preamble_ok}")
    return EXIT_OK


def cmd_simulate(args, config: RunConfig) -> int:
    logger = logging.getLogger(__name__)
    simulator = MonteCarloSimulator(config)

    def progress(index, total, report):
        logger.info(f"[{index + 1}/{total}] Eb/N0={report.eb_n0_db} dB done")

    reports = simulator.sweep(progress=progress)
    ReportWriter(config).write_ber_curve(reports, config.output.ber_csv, config.output.plot_script)
    for line in format_ber_summary(reports):
        print(line)
    return EXIT_OK


def cmd_flicker(args, config: RunConfig) -> int:
    code = code_from_config(config.polar)
    fl = config.flicker
    sweep = flicker_sweep(
        code,
        fl.frames,
        fl.grid(),
        systematic=config.polar.systematic,
        prescramble=config.scrambler.enabled,
        scrambler_config=config.scrambler,
        master_seed=config.system.master_seed,
        exact_count=fl.exact_count,
        worst_case_zero_pct=fl.worst_case_zero_pct,
    )
    ReportWriter(config).write_flicker(sweep, config.output.flicker_csv, config.output.plot_script)
    f_min = f_min_flicker(sweep.max_run, fl.mftp_s, fl.literal_fmin)
    for line in format_flicker_summary(sweep, f_min):
        print(line)
    return EXIT_OK


def cmd_code_construct(args, config: RunConfig) -> int:
    p = config.polar
    code = construct_code(p.block_length, p.message_length, p.design_snr_db)
    save_code(code, config.output.code_file)
    logging.getLogger(__name__).info(f"Code description saved: {config.output.code_file}")
    print(f"N={code.block_length} K={code.message_length} rate={code.rate:.4f} -> {config.output.code_file}")
    return EXIT_OK


def cmd_hw_metrics(args, config: RunConfig) -> int:
    if args.preset:
        metrics = preset_metrics(args.preset)
    else:
        inputs = (args.bits, args.latency, args.power, args.area)
        if any(v is None for v in inputs):
            raise ValueError("hw-metrics needs --preset or all of --bits --latency --power --area")
        metrics = hw_metrics(*inputs)
    for line in format_hw_metrics(metrics):
        print(line)
    return EXIT_OK


COMMANDS = {
    'encode': cmd_encode,
    'decode': cmd_decode,
    'simulate': cmd_simulate,
    'flicker': cmd_flicker,
    'code-construct': cmd_code_construct,
    'hw-metrics': cmd_hw_metrics,
}


def main(argv: Optional[List[str]] = None) -> int:
    """メイン関数"""
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
        apply_arguments(config, args)
    except (ValueError, OSError) as e:
        logging.error(f"Configuration error: {e}")
        return EXIT_USAGE_ERROR

    setup_logging(config)
    logger = logging.getLogger(__name__)

    errors = config.validate_config()
    if errors:
        for error in errors:
            logger.error(f"Invalid configuration: {error}")
        return EXIT_USAGE_ERROR

    try:
        return COMMANDS[args.command](args, config)
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE_ERROR
    except Exception as e:
        logger.exception(f"System error: {e}")
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
