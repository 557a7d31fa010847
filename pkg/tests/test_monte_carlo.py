import dataclasses

import numpy as np
import pytest
from scipy.stats import norm

from analysis.beacon_link import BeaconLink
from analysis.monte_carlo import MonteCarloSimulator, TrialReport, monte_carlo, uncoded_ook_ber, wilson_interval
from config import RunConfig


def small_config(**simulation) -> RunConfig:
    config = RunConfig(load_environment=False)
    config.simulation.trials = 12
    config.simulation.batch_size = 5
    for name, value in simulation.items():
        setattr(config.simulation, name, value)
    return config


def counts(report: TrialReport):
    return (report.trials, report.bit_errors, report.frame_errors, report.crc_failures, report.payload_errors)


class TestWilson:
    def test_no_successes(self):
        low, high = wilson_interval(0, 100)
        assert low == pytest.approx(0.0, abs=1e-12)
        assert high == pytest.approx(0.037, abs=1e-3)

    def test_symmetric(self):
        low, high = wilson_interval(50, 100)
        assert 0.5 - low == pytest.approx(high - 0.5)

    def test_no_trials(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)


def test_report_merge():
    a = TrialReport(trials=10, bit_errors=3, frame_errors=1)
    b = TrialReport(trials=5, bit_errors=2, frame_errors=2, crc_failures=1)
    merged = TrialReport().merge(a).merge(b)
    assert counts(merged) == (15, 5, 3, 1, 0)
    assert merged.fer == pytest.approx(0.2)
    assert merged.ber == pytest.approx(5 / (15 * 158))


@pytest.mark.parametrize('mode', ['3bit', 'exact', 'hard'])
def test_noiseless_chain(mode):
    config = small_config()
    config.quantizer.mode = mode
    config.channel.noise_sigma = 1e-6
    report = monte_carlo(config)
    assert counts(report) == (12, 0, 0, 0, 0)


def test_noiseless_training_peaks():
    config = small_config()
    config.quantizer.peak_source = 'training'
    config.channel.noise_sigma = 1e-6
    assert monte_carlo(config).frame_errors == 0


def test_deterministic_across_batching():
    config = small_config()
    first = monte_carlo(config, eb_n0_db=0.0)

    config.simulation.batch_size = 12
    second = monte_carlo(config, eb_n0_db=0.0)

    config.simulation.batch_size = 2
    config.system.workers = 3
    third = monte_carlo(config, eb_n0_db=0.0)

    assert counts(first) == counts(second) == counts(third)
    assert first.frame_errors > 0


def test_seed_changes_outcome():
    config = small_config(trials=40)
    first = monte_carlo(config, eb_n0_db=0.0)
    config.system.master_seed += 1
    second = monte_carlo(config, eb_n0_db=0.0)
    assert counts(first) != counts(second)


def test_scrambling_is_error_transparent():
    config = small_config(trials=30)
    config.quantizer.mode = 'exact'
    config.channel.noise_pairing = 'mirrored'
    scrambled = monte_carlo(config, eb_n0_db=1.0)
    config.scrambler.enabled = False
    plain = monte_carlo(config, eb_n0_db=1.0)
    assert scrambled.bit_errors == plain.bit_errors
    assert scrambled.frame_errors == plain.frame_errors


def test_systematic_and_nonsystematic_fer_match():
    config = small_config(trials=30)
    config.quantizer.mode = 'exact'
    config.channel.noise_pairing = 'mirrored'
    nonsystematic = monte_carlo(config, eb_n0_db=1.0)
    config.polar.systematic = True
    systematic = monte_carlo(config, eb_n0_db=1.0)
    assert systematic.frame_errors == nonsystematic.frame_errors


def test_uncoded_reference():
    config = small_config(trials=2000, batch_size=500, coding='uncoded')
    config.quantizer.mode = 'hard'
    report = monte_carlo(config, eb_n0_db=4.0)
    sigma = report.sigma
    assert report.theoretical_ber == pytest.approx(norm.sf(1.0 / sigma))
    assert report.theoretical_ber == pytest.approx(uncoded_ook_ber(sigma, -1.0, 1.0))
    assert report.ber == pytest.approx(report.theoretical_ber, rel=0.1)


def test_sweep_grid():
    config = small_config(eb_n0_start=2.0, eb_n0_stop=4.0, eb_n0_step=1.0, trials=4)
    seen = []
    reports = MonteCarloSimulator(config).sweep(progress=lambda i, n, r: seen.append((i, n)))
    assert [r.eb_n0_db for r in reports] == [2.0, 3.0, 4.0]
    assert seen == [(0, 3), (1, 3), (2, 3)]


def test_invalid_config():
    config = small_config()
    config.polar.message_length = 100
    with pytest.raises(ValueError):
        MonteCarloSimulator(config)


def test_manual_peaks_required():
    config = RunConfig(load_environment=False)
    config.quantizer.peak_source = 'manual'
    with pytest.raises(ValueError, match="quantizer peaks undefined"):
        BeaconLink(config)


def test_rejects_zero_trials():
    with pytest.raises(ValueError):
        MonteCarloSimulator(small_config()).run_point(2.0, trials=0)


@pytest.mark.slow
def test_coded_beats_uncoded_at_high_snr():
    config = small_config(trials=2000, batch_size=500)
    config.quantizer.mode = 'exact'
    coded = monte_carlo(config, eb_n0_db=6.0)
    config.simulation.coding = 'uncoded'
    uncoded = monte_carlo(config, eb_n0_db=6.0)
    assert coded.ber < uncoded.ber


def test_error_count_bounds():
    config = small_config(trials=60, batch_size=20)
    reports = MonteCarloSimulator(config).sweep([0.0, 1.0, 2.0])
    for report in reports:
        # 誤りフレームには1ビット以上の誤りがあり、1フレームの誤りは高々158ビット
        assert report.frame_errors <= report.bit_errors <= report.bits_per_frame * report.frame_errors
        assert report.fer >= report.ber
    assert reports[0].frame_errors > 0


def decoded_frames(mode: str, eb_n0_db: float, trials: int, seed: int = 7) -> np.ndarray:
    """同じ雑音系列を指定モードで復号したフレーム推定"""
    config = RunConfig(load_environment=False)
    config.quantizer.mode = mode
    link = BeaconLink(config)
    sigma = MonteCarloSimulator(config).sigma_for(eb_n0_db)
    rng = np.random.default_rng(seed)
    payloads = rng.integers(0, 2, (trials, 128), dtype=np.uint8)
    noise = rng.standard_normal((trials, link.symbols_per_frame))
    _, tx_bits = link.transmit_bits(payloads)
    channel = link.channel(dataclasses.replace(config.channel, noise_sigma=sigma))
    return link.decode_llrs(link.llrs(channel.transmit(tx_bits, noise), sigma)).frames


@pytest.mark.slow
class TestLongRuns:
    """10^4 試行、同一シードで雑音を共有"""

    def test_noiseless_round_trip(self):
        config = small_config(trials=10000, batch_size=1000)
        config.channel.noise_sigma = 1e-6
        assert counts(monte_carlo(config)) == (10000, 0, 0, 0, 0)

    def test_quantizer_ordering(self):
        fer = {}
        for mode in ('exact', '3bit', 'hard'):
            config = small_config(trials=10000, batch_size=1000)
            config.system.workers = 4
            config.quantizer.mode = mode
            fer[mode] = [r.fer for r in MonteCarloSimulator(config).sweep()]
        assert len(fer['exact']) == 9
        for exact, quantized, hard in zip(fer['exact'], fer['3bit'], fer['hard']):
            assert exact <= quantized <= hard

    @pytest.mark.parametrize('eb_n0_db', [1.0, 2.0, 3.0])
    def test_systematic_matches_nonsystematic(self, eb_n0_db):
        config = small_config(trials=10000, batch_size=1000)
        config.quantizer.mode = 'exact'
        config.channel.noise_pairing = 'mirrored'
        nonsystematic = monte_carlo(config, eb_n0_db=eb_n0_db)
        config.polar.systematic = True
        systematic = monte_carlo(config, eb_n0_db=eb_n0_db)
        low, high = nonsystematic.fer_interval
        assert low <= systematic.fer <= high
        assert systematic.frame_errors == nonsystematic.frame_errors
        assert systematic.ber <= nonsystematic.ber

    def test_fer_decreases_with_eb_n0(self):
        simulator = MonteCarloSimulator(small_config(trials=2000, batch_size=500))
        # 同じ point_index で雑音系列を共有し、σだけを変える
        fers = [simulator.run_point(eb_n0_db, point_index=0).fer for eb_n0_db in range(6)]
        assert fers == sorted(fers, reverse=True)
        assert fers[0] > fers[-1]

    @pytest.mark.parametrize('eb_n0_db', [7.0, 8.0])
    def test_quantized_agrees_with_exact_at_high_snr(self, eb_n0_db):
        exact = decoded_frames('exact', eb_n0_db, 10000)
        quantized = decoded_frames('3bit', eb_n0_db, 10000)
        agreement = np.all(exact == quantized, axis=1).mean()
        assert agreement >= 0.99
