"""Unit tests for Gray QAM mapping and zero-forcing detection."""

import math

import numpy as np
import pytest

from sparsenlms.modem import (
    DetectionError,
    QAM_ORDERS,
    detect_mimo_subcarrier,
    qam_constellation,
    qam_demodulate,
    qam_modulate,
)


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def test_bits_per_symbol():
    assert qam_constellation(16).bits_per_symbol == 4
    assert qam_constellation(64).bits_per_symbol == 6
    assert qam_constellation(256).bits_per_symbol == 8


def test_invalid_order_rejected():
    with pytest.raises(ValueError, match="order must be one of"):
        qam_constellation(32)


@pytest.mark.parametrize("order", QAM_ORDERS)
def test_modulate_demodulate_round_trip(order):
    rng = np.random.default_rng(300 + order)
    bits = rng.integers(0, 2, size=1200 * int(np.log2(order)))
    symbols = qam_modulate(bits, order)
    assert np.array_equal(qam_demodulate(symbols, order), bits)


@pytest.mark.parametrize("order", QAM_ORDERS)
def test_unit_mean_symbol_energy(order):
    points = qam_constellation(order).points
    assert np.mean(np.abs(points) ** 2) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("order", QAM_ORDERS)
def test_gray_neighbor_property(order):
    table = qam_constellation(order)
    for i in range(table.levels_per_axis - 1):
        diff = int(table.level_codes[i] ^ table.level_codes[i + 1])
        assert bin(diff).count("1") == 1


def test_modulate_rejects_ragged_bit_count():
    with pytest.raises(ValueError, match="not a multiple"):
        qam_modulate(np.zeros(5, dtype=np.int64), 16)


def test_tie_breaks_toward_lower_gray_codeword():
    # Zero lies exactly between the two inner levels on both axes; their
    # Gray codewords are 1 and 3, so the decision must pick 1, which is
    # bit pattern 01 per axis.
    bits = qam_demodulate(np.array([0j]), 16)
    assert np.array_equal(bits, [0, 1, 0, 1])


def test_awgn_ber_matches_analytic_approximation():
    # 16-QAM over AWGN at E_s / N_0 = 12 dB against the nearest-neighbor
    # Gray-code approximation 0.75 Q(sqrt(gamma / 5)).
    rng = np.random.default_rng(301)
    order, symbols_count = 16, 1_000_000
    bits = rng.integers(0, 2, size=4 * symbols_count)
    tx = qam_modulate(bits, order)
    gamma = 10.0 ** 1.2
    n0 = 1.0 / gamma
    noise = math.sqrt(n0 / 2.0) * (
        rng.standard_normal(symbols_count) + 1j * rng.standard_normal(symbols_count)
    )
    rx_bits = qam_demodulate(tx + noise, order)
    measured = np.mean(rx_bits != bits)
    analytic = 0.75 * q_function(math.sqrt(gamma / 5.0))
    assert measured == pytest.approx(analytic, rel=0.10)


def test_zero_forcing_identity_channel():
    rng = np.random.default_rng(302)
    sent = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    out = detect_mimo_subcarrier(np.eye(4, dtype=complex), sent)
    assert np.allclose(out, sent, atol=1e-12)


def test_zero_forcing_inverts_noiseless_channel():
    rng = np.random.default_rng(303)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    sent = qam_modulate(rng.integers(0, 2, size=16), 16)
    out = detect_mimo_subcarrier(h, h @ sent)
    assert np.allclose(out, sent, atol=1e-10)


def test_zero_forcing_scale_invariance():
    rng = np.random.default_rng(304)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    alpha = 0.3 - 1.7j
    assert np.allclose(
        detect_mimo_subcarrier(h, y),
        detect_mimo_subcarrier(alpha * h, alpha * y),
        atol=1e-12,
    )


def test_zero_forcing_rejects_rank_deficiency():
    h = np.ones((4, 4), dtype=complex)
    with pytest.raises(DetectionError, match="rank"):
        detect_mimo_subcarrier(h, np.ones(4, dtype=complex))


def test_zero_forcing_rejects_bad_shapes():
    with pytest.raises(ValueError, match="incompatible"):
        detect_mimo_subcarrier(np.eye(4, dtype=complex), np.ones(3, dtype=complex))
