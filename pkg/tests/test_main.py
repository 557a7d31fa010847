import numpy as np
import pandas as pd
import pytest

from display.report_writer import BER_COLUMNS, FLICKER_COLUMNS
from framing.bit_utils import hex_to_bits
from main import main
from polar.construction import load_code

PAYLOAD = '0123456789ABCDEF0123456789ABCDEF'


def encode(capsys, *extra):
    assert main(['encode', '--payload', PAYLOAD, *extra]) == 0
    return capsys.readouterr().out.splitlines()


class TestEncode:
    def test_zero_payload(self, capsys):
        assert main(['encode', '--payload', '0' * 32]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines[0]) == 64
        assert lines[1].startswith('bit-1 ratio:')
        assert lines[2].startswith('max run length:')

    def test_deterministic(self, capsys):
        assert encode(capsys) == encode(capsys)

    def test_options_change_codeword(self, capsys):
        base = encode(capsys)[0]
        assert encode(capsys, '--no-prescramble')[0] != base
        assert encode(capsys, '--systematic')[0] != base
        assert encode(capsys, '--scrambler-seed', '9')[0] != base

    @pytest.mark.parametrize('payload', ['zz' * 16, '00', PAYLOAD + '0'])
    def test_malformed_payload(self, payload):
        assert main(['encode', '--payload', payload]) == 2


class TestDecode:
    def codeword(self, capsys, *extra):
        return hex_to_bits(encode(capsys, *extra)[0], 256)

    def test_samples_round_trip(self, capsys, tmp_path):
        x = self.codeword(capsys)
        path = tmp_path / 'samples.txt'
        np.savetxt(path, 2.0 * x - 1.0)
        assert main(['decode', '--sample-file', str(path)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == PAYLOAD
        assert 'crc_ok=True' in lines[1]

    @pytest.mark.parametrize('quantizer', ['exact', 'hard'])
    def test_other_receivers(self, capsys, tmp_path, quantizer):
        x = self.codeword(capsys, '--systematic')
        path = tmp_path / 'samples.txt'
        np.savetxt(path, 2.0 * x - 1.0)
        assert main(['decode', '--sample-file', str(path), '--systematic', '--quantizer', quantizer]) == 0
        assert capsys.readouterr().out.splitlines()[0] == PAYLOAD

    def test_llr_file(self, capsys, tmp_path):
        x = self.codeword(capsys)
        path = tmp_path / 'llrs.txt'
        np.savetxt(path, 5.0 * (1.0 - 2.0 * x))
        assert main(['decode', '--llr-file', str(path)]) == 0
        assert capsys.readouterr().out.splitlines()[0] == PAYLOAD

    def test_corrupted_samples_are_data(self, capsys, tmp_path):
        path = tmp_path / 'noise.txt'
        np.savetxt(path, np.random.default_rng(0).standard_normal(256))
        assert main(['decode', '--sample-file', str(path)]) == 0
        assert 'crc_ok=False' in capsys.readouterr().out

    def test_missing_file(self, tmp_path):
        assert main(['decode', '--sample-file', str(tmp_path / 'missing.txt')]) == 2

    def test_wrong_length(self, tmp_path):
        path = tmp_path / 'short.txt'
        np.savetxt(path, np.ones(10))
        assert main(['decode', '--llr-file', str(path)]) == 2


class TestSimulate:
    def test_csv_and_replay(self, capsys, tmp_path):
        first = tmp_path / 'ber_curve.csv'
        args = ['simulate', '--ebn0', '0:2:1', '--trials', '6', '--output', str(first)]
        assert main(args) == 0
        frame = pd.read_csv(first)
        assert list(frame.columns) == BER_COLUMNS
        assert frame['eb_n0_db'].tolist() == [0.0, 1.0, 2.0]
        assert (frame['trials'] == 6).all()

        record = tmp_path / 'ber_curve.csv.run.ini'
        assert record.exists()
        second = tmp_path / 'replay.csv'
        assert main(['--config', str(record), 'simulate', '--output', str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_noiseless_row(self, tmp_path):
        output = tmp_path / 'quiet.csv'
        assert main(['simulate', '--ebn0', '40:40:1', '--trials', '4',
                     '--output', str(output)]) == 0
        assert pd.read_csv(output)['ber'].tolist() == [0.0]

    def test_plot_script(self, tmp_path):
        output = tmp_path / 'curve.csv'
        assert main(['simulate', '--ebn0', '3:3:1', '--trials', '2', '--output', str(output),
                     '--plot-script']) == 0
        assert 'logscale y' in (tmp_path / 'curve.gp').read_text()

    @pytest.mark.parametrize('grid', ['2:0:1', '0:2', 'a:b:c'])
    def test_invalid_grid(self, tmp_path, grid):
        assert main(['simulate', '--ebn0', grid, '--output', str(tmp_path / 'x.csv')]) == 2


def test_flicker(capsys, tmp_path):
    output = tmp_path / 'flicker.csv'
    assert main(['flicker', '--frames', '5', '--grid', '0:100:50', '--output', str(output),
                 '--plot-script']) == 0
    frame = pd.read_csv(output)
    assert list(frame.columns) == FLICKER_COLUMNS
    assert frame['zero_pct'].tolist() == [0, 50, 100]
    assert (tmp_path / 'flicker.gp').exists()
    assert 'kHz' in capsys.readouterr().out


def test_flicker_summary_per_chain(capsys, tmp_path):
    args = ['flicker', '--frames', '5', '--grid', '0:100:10', '--output', str(tmp_path / 'f.csv')]
    assert main(args + ['--no-prescramble']) == 0
    out = capsys.readouterr().out
    # 全ゼロ入力の平文符号語は256ビットのラン
    assert 'max run length (unscrambled): 256' in out
    assert '51.200 kHz' in out
    assert 'at 10% zeros' in out

    assert main(args) == 0
    out = capsys.readouterr().out
    assert 'max run length (prescrambled):' in out
    assert 'max run length (prescrambled): 256' not in out


def test_flicker_worst_case_option(capsys, tmp_path):
    assert main(['flicker', '--frames', '5', '--grid', '0:100:50', '--worst-case', '50',
                 '--output', str(tmp_path / 'f.csv')]) == 0
    assert 'at 50% zeros' in capsys.readouterr().out


def test_flicker_replay(tmp_path):
    first = tmp_path / 'flicker.csv'
    assert main(['flicker', '--frames', '8', '--grid', '0:100:25', '--seed', '3', '--output', str(first)]) == 0
    second = tmp_path / 'replay.csv'
    assert main(['--config', str(tmp_path / 'flicker.csv.run.ini'), 'flicker', '--output', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_code_construct(tmp_path):
    output = tmp_path / 'code.txt'
    assert main(['code-construct', '--n', '8', '--k', '4', '--output', str(output)]) == 0
    code = load_code(str(output))
    assert (code.block_length, code.message_length) == (8, 4)


def test_code_construct_invalid(tmp_path):
    assert main(['code-construct', '--n', '12', '--k', '4', '--output', str(tmp_path / 'c.txt')]) == 2


def test_hw_metrics(capsys):
    assert main(['hw-metrics', '--preset', 'transmitter']) == 0
    out = capsys.readouterr().out
    assert '15.38 Mb/s' in out
    assert '85.42 pJ/b' in out
    assert '315.41' in out


def test_hw_metrics_needs_inputs():
    assert main(['hw-metrics', '--bits', '256']) == 2


def test_no_subcommand():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2
