import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import ScramblerConfig
from framing.scrambler import Scrambler, descramble, keystream, lfsr_next, scramble

frames = st.lists(st.integers(0, 1), min_size=1, max_size=300).map(
    lambda bits: np.array(bits, dtype=np.uint8)
)


def test_default_keystream():
    # x^4 + x^3 + 1、初期状態 1111
    assert ''.join(map(str, keystream(ScramblerConfig(), 15))) == '111100010011010'


def test_maximal_length_period():
    stream = keystream(ScramblerConfig(), 60)
    np.testing.assert_array_equal(stream[:15], stream[15:30])
    assert stream[:15].sum() == 8
    # 周期15未満では繰り返さない
    for period in range(1, 15):
        assert not np.array_equal(stream[:15], np.roll(stream[:15], period))


def test_taps_from_coefficients():
    assert ScramblerConfig().taps == (3, 4)
    assert ScramblerConfig().degree == 4


def test_lfsr_step():
    bit, state = lfsr_next(0b1111, ScramblerConfig())
    assert (bit, state) == (1, 0b1110)


def test_zero_state_rejected():
    with pytest.raises(ValueError, match="degenerate LFSR state"):
        lfsr_next(0, ScramblerConfig())
    with pytest.raises(ValueError, match="degenerate LFSR state"):
        Scrambler(ScramblerConfig(seed=0))


@settings(max_examples=100)
@given(frames)
def test_involution(data):
    np.testing.assert_array_equal(descramble(scramble(data)), data)


def test_zero_frame_becomes_keystream():
    out = scramble(np.zeros(158, dtype=np.uint8))
    # 10周期（80個）+ 先頭8ビット 11110001（5個）
    assert out.sum() == 85


def test_reset_per_frame(rng):
    scrambler = Scrambler()
    batch = rng.integers(0, 2, (4, 158), dtype=np.uint8)
    out = scrambler.scramble(batch)
    for row, scrambled in zip(batch, out):
        np.testing.assert_array_equal(scrambled, scrambler.scramble(row))


def test_custom_polynomial():
    # x^3 + x^2 + 1（周期7）
    cfg = ScramblerConfig(coefficients=(1, 0, 1, 1), seed=0b001)
    stream = keystream(cfg, 14)
    np.testing.assert_array_equal(stream[:7], stream[7:])
    assert stream[:7].sum() == 4


NONZERO_SEEDS = list(range(1, 16))


def test_state_cycle_visits_every_nonzero_state():
    cfg = ScramblerConfig()
    for start in NONZERO_SEEDS:
        state, visited = start, []
        for _ in range(15):
            visited.append(state)
            _, state = lfsr_next(state, cfg)
        assert state == start
        assert sorted(visited) == NONZERO_SEEDS


@pytest.mark.parametrize('seed', NONZERO_SEEDS)
def test_period_and_balance_for_every_seed(seed):
    stream = keystream(ScramblerConfig(seed=seed), 45)
    np.testing.assert_array_equal(stream[:15], stream[15:30])
    np.testing.assert_array_equal(stream[:15], stream[30:45])
    assert stream[:15].sum() == 8
    for shift in range(1, 15):
        assert not np.array_equal(stream[:15], np.roll(stream[:15], shift))


@pytest.mark.parametrize('seed', NONZERO_SEEDS)
def test_involution_for_every_seed(seed):
    cfg = ScramblerConfig(seed=seed)
    data = np.random.default_rng(seed).integers(0, 2, (1000, 158), dtype=np.uint8)
    np.testing.assert_array_equal(descramble(scramble(data, cfg), cfg), data)


@pytest.mark.parametrize('k', [1, 2, 7, 40])
def test_no_error_multiplication(rng, k):
    data = rng.integers(0, 2, 158, dtype=np.uint8)
    errors = np.zeros(158, dtype=np.uint8)
    errors[rng.choice(158, size=k, replace=False)] = 1
    received = descramble(scramble(data) ^ errors)
    np.testing.assert_array_equal(received ^ data, errors)
