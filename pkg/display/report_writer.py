"""
結果出力モジュール
BER/FER曲線・フリッカー解析のCSV、gnuplotスクリプト、実行記録、コンソール表示
"""

import logging
import os
from typing import List, Sequence

import pandas as pd

from analysis.flicker import FlickerSweep
from analysis.hardware import HardwareMetrics
from analysis.monte_carlo import TrialReport
from config import RunConfig

BER_COLUMNS = ['eb_n0_db', 'ber', 'fer', 'trials', 'ci']
FLICKER_COLUMNS = ['zero_pct', 'min_ratio', 'max_ratio', 'max_run_scrambled', 'max_run_plain', 'gain']


def ber_frame(reports: Sequence[TrialReport]) -> pd.DataFrame:
    rows = [
        {'eb_n0_db': r.eb_n0_db, 'ber': r.ber, 'fer': r.fer, 'trials': r.trials, 'ci': r.fer_ci}
        for r in reports
    ]
    return pd.DataFrame(rows, columns=BER_COLUMNS)


def flicker_frame(sweep: FlickerSweep) -> pd.DataFrame:
    rows = [
        {
            'zero_pct': p.zero_pct,
            'min_ratio': p.min_ratio,
            'max_ratio': p.max_ratio,
            'max_run_scrambled': p.max_run_scrambled,
            'max_run_plain': p.max_run_plain,
            'gain': p.gain,
        }
        for p in sweep.points
    ]
    return pd.DataFrame(rows, columns=FLICKER_COLUMNS)


def run_record_path(csv_path: str) -> str:
    return f"{csv_path}.run.ini"


class ReportWriter:
    """結果ファイル出力"""

    def __init__(self, config: RunConfig):
        """
        初期化
        Args:
            config (RunConfig): 実行設定（実行記録として保存）
        """
        self.config = config
        self.logger = logging.getLogger(__name__)

    def _prepare(self, path: str):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)

    def write_ber_curve(self, reports: Sequence[TrialReport], path: str, plot_script: bool = False) -> pd.DataFrame:
        """BER/FER曲線をCSVに保存"""
        self._prepare(path)
        frame = ber_frame(reports)
        frame.to_csv(path, index=False, float_format='%.10g')
        self.config.save(run_record_path(path))
        self.logger.info(f"BER curve saved: {path} ({len(frame)} rows)")
        if plot_script:
            self.write_plot_script(path, 'ber')
        return frame

    def write_flicker(self, sweep: FlickerSweep, path: str, plot_script: bool = False) -> pd.DataFrame:
        """フリッカー解析をCSVに保存"""
        self._prepare(path)
        frame = flicker_frame(sweep)
        frame.to_csv(path, index=False, float_format='%.10g')
        self.config.save(run_record_path(path))
        self.logger.info(f"Flicker sweep saved: {path} ({len(frame)} rows)")
        if plot_script:
            self.write_plot_script(path, 'flicker')
        return frame

    def write_plot_script(self, csv_path: str, kind: str) -> str:
        """gnuplotスクリプトをCSVの隣に出力"""
        stem = os.path.splitext(csv_path)[0]
        script_path = f"{stem}.gp"
        data = os.path.basename(csv_path)

        lines = [
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set grid",
            f"set output '{os.path.basename(stem)}.png'",
            "set terminal pngcairo size 800,600",
        ]
        if kind == 'ber':
            lines += [
                "set logscale y",
                "set format y '10^{%L}'",
                "set xlabel 'Eb/N0 (dB)'",
                "set ylabel 'error rate'",
                f"plot '{data}' using 1:2 with linespoints title 'BER', \\",
                f"     '{data}' using 1:3 with linespoints title 'FER'",
            ]
        else:
            lines += [
                "set xlabel 'percentage of bit-0 in input (%)'",
                "set ylabel 'percentage of bit-1 in output (%)'",
                "set yrange [0:100]",
                f"plot '{data}' using 1:2 with lines title 'min', \\",
                f"     '{data}' using 1:3 with lines title 'max'",
            ]

        with open(script_path, 'w', encoding='utf-8') as handle:
            handle.write('\n'.join(lines) + '\n')
        self.logger.info(f"Plot script saved: {script_path}")
        return script_path


def load_ber_curve(path: str) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = [c for c in BER_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"BER curve file missing columns: {missing}")
    return frame[BER_COLUMNS]


def format_ber_summary(reports: Sequence[TrialReport]) -> List[str]:
    """コンソール表示用のBER/FER要約"""
    lines = [f"{'Eb/N0':>7}  {'BER':>10}  {'FER':>10}  {'FER 95% CI':>23}  {'trials':>7}"]
    for r in reports:
        low, high = r.fer_interval
        line = f"{r.eb_n0_db:7.2f}  {r.ber:10.3e}  {r.fer:10.3e}  [{low:9.3e}, {high:9.3e}]  {r.trials:7d}"
        if r.theoretical_ber is not None:
            line += f"  (theory {r.theoretical_ber:.3e})"
        lines.append(line)
    return lines


def format_flicker_summary(sweep: FlickerSweep, f_min_hz: float) -> List[str]:
    lines = []
    report = sweep.ratio_report
    if sweep.worst_case_zero_pct is not None:
        lines.append(f"bit-1 ratio range at {sweep.worst_case_zero_pct}% zeros: "
                     f"({report.min_pct:.2f}%, {report.max_pct:.2f}%)")
    grid = sweep.grid_report or report
    lines.append(f"bit-1 ratio range over grid: ({grid.min_pct:.2f}%, {grid.max_pct:.2f}%)")
    chain = 'prescrambled' if sweep.prescramble else 'unscrambled'
    lines.append(f"max run length ({chain}): {sweep.max_run}")
    lines.append(f"minimum flicker-free frequency: {f_min_hz / 1e3:.3f} kHz")
    return lines


def format_hw_metrics(metrics: HardwareMetrics) -> List[str]:
    return [
        f"throughput:          {metrics.throughput_mbps:.2f} Mb/s",
        f"energy per bit:      {metrics.energy_per_bit_pj:.2f} pJ/b",
        f"hardware efficiency: {metrics.hw_efficiency_mbps_per_mm2:.2f} Mb/s/mm^2",
    ]
