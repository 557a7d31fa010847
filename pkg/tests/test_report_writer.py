import pandas as pd
import pytest

from analysis.flicker import BitRatioReport, FlickerPoint, FlickerSweep
from analysis.monte_carlo import TrialReport
from display.report_writer import (BER_COLUMNS, ReportWriter, format_ber_summary, format_flicker_summary,
                                   load_ber_curve, run_record_path)


@pytest.fixture
def reports():
    return [
        TrialReport(trials=100, bit_errors=30, frame_errors=10, eb_n0_db=1.0),
        TrialReport(trials=100, bit_errors=0, frame_errors=0, eb_n0_db=2.0, theoretical_ber=1e-3),
    ]


def test_ber_csv(tmp_path, config, reports):
    path = tmp_path / 'out' / 'ber.csv'
    ReportWriter(config).write_ber_curve(reports, str(path))
    frame = load_ber_curve(str(path))
    assert list(frame.columns) == BER_COLUMNS
    assert frame['fer'].tolist() == pytest.approx([0.1, 0.0])
    assert (tmp_path / 'out' / 'ber.csv.run.ini').exists()


def test_flicker_csv(tmp_path, config):
    sweep = FlickerSweep([FlickerPoint(50, 45.0, 55.0, 10, 20)], BitRatioReport.from_percentages([45.0, 55.0]))
    path = tmp_path / 'flicker.csv'
    ReportWriter(config).write_flicker(sweep, str(path), plot_script=True)
    frame = pd.read_csv(path)
    assert frame.loc[0, 'gain'] == 2.0
    assert 'using 1:2' in (tmp_path / 'flicker.gp').read_text()


def test_missing_columns(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text("eb_n0_db,ber\n1,0.1\n")
    with pytest.raises(ValueError):
        load_ber_curve(str(path))


def test_summaries(reports):
    lines = format_ber_summary(reports)
    assert len(lines) == 3
    assert 'theory' in lines[2]
    sweep = FlickerSweep([FlickerPoint(0, 40.0, 60.0, 12, 30)], BitRatioReport.from_percentages([40.0, 60.0]))
    assert format_flicker_summary(sweep, 2400.0)[-1].endswith('2.400 kHz')


def test_flicker_summary_ranges():
    worst = BitRatioReport.from_percentages([41.0, 63.0])
    grid = BitRatioReport.from_percentages([0.0, 100.0])
    points = [FlickerPoint(10, 41.0, 63.0, 20, 90)]
    lines = format_flicker_summary(FlickerSweep(points, worst, grid, False, 10), 18000.0)
    assert lines[0] == "bit-1 ratio range at 10% zeros: (41.00%, 63.00%)"
    assert lines[1] == "bit-1 ratio range over grid: (0.00%, 100.00%)"
    assert lines[2] == "max run length (unscrambled): 90"


def test_run_record_path():
    assert run_record_path('a/b.csv') == 'a/b.csv.run.ini'
