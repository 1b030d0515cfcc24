"""Unit tests for the adaptive filter update rules."""

import numpy as np
import pytest

from sparsenlms import filters
from naive_oracle import run_oracle


def complex_normal(rng, size, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def make_config(variant, **kwargs):
    return filters.AlgorithmConfig(variant=variant, **kwargs)


# -- prediction error ---------------------------------------------------------


def test_error_zero_estimator_passes_observation_through():
    state = filters.initial_state(4, make_config(filters.ISS_NLMS))
    x = np.array([1.0, 2.0, -1.0, 0.5], dtype=np.complex128)
    assert filters.prediction_error(state, x, 3 + 1j) == 3 + 1j


def test_error_perfect_estimator_is_zero():
    rng = np.random.default_rng(11)
    w = complex_normal(rng, 6)
    x = complex_normal(rng, 6)
    state = filters.FilterState(weights=w, grad_avg=np.zeros(6, complex), step_size=0.2)
    y = np.dot(w, x)
    assert filters.prediction_error(state, x, y) == 0


def test_error_hand_example():
    state = filters.FilterState(
        weights=np.array([1.0, 0.0], dtype=np.complex128),
        grad_avg=np.zeros(2, dtype=np.complex128),
        step_size=0.2,
    )
    x = np.array([1.0, 1.0], dtype=np.complex128)
    assert filters.prediction_error(state, x, 3.0) == 2.0


def test_error_rejects_shape_mismatch():
    state = filters.initial_state(4, make_config(filters.ISS_NLMS))
    with pytest.raises(ValueError, match="does not match"):
        filters.prediction_error(state, np.ones(3, dtype=np.complex128), 1.0)


# -- componentwise sign -------------------------------------------------------


def test_sign_real_values():
    out = filters.componentwise_sign(np.array([-2.0, 0.0, 3.0]))
    assert np.array_equal(out, np.array([-1.0, 0.0, 1.0], dtype=complex))


def test_sign_zero_is_zero():
    assert filters.componentwise_sign(np.array([0j]))[0] == 0j


def test_sign_complex_componentwise():
    out = filters.componentwise_sign(np.array([0.5 - 0.3j]))
    assert out[0] == 1.0 - 1.0j


# -- adaptive step law --------------------------------------------------------


def test_vss_zero_gradient_gives_zero_step():
    assert filters.compute_vss(np.zeros(8, dtype=complex), 2.0, 1e-4) == 0.0


def test_vss_midpoint_is_exactly_half_mu_max():
    # 0.25**2 and 0.0625 are exact binary floats, so the energy hits the
    # threshold exactly and the quotient is exactly one half.
    p = np.array([0.25], dtype=np.complex128)
    assert filters.compute_vss(p, 2.0, 0.0625) == 1.0


def test_vss_direct_evaluation():
    p = np.array([0.03], dtype=np.complex128)  # energy 9e-4
    assert filters.compute_vss(p, 2.0, 1e-4) == pytest.approx(1.8, rel=1e-12)


def test_vss_stays_below_mu_max_and_increases_with_energy():
    rng = np.random.default_rng(5)
    direction = complex_normal(rng, 6)
    direction /= np.sqrt(np.vdot(direction, direction).real)
    previous = -1.0
    for scale in [1e-6, 1e-3, 1e-1, 1.0, 10.0, 1e4]:
        mu = filters.compute_vss(scale * direction, 2.0, 1e-4)
        assert 0.0 <= mu < 2.0
        assert mu > previous
        previous = mu


def test_vss_rejects_nonpositive_threshold():
    with pytest.raises(ValueError, match="c_threshold"):
        filters.compute_vss(np.zeros(2, dtype=complex), 2.0, 0.0)


# -- gradient smoothing -------------------------------------------------------


def test_grad_avg_no_smoothing_equals_normalized_gradient():
    rng = np.random.default_rng(7)
    x = complex_normal(rng, 5)
    e = 0.3 - 0.7j
    out = filters.update_grad_avg(np.zeros(5, dtype=complex), x, e, 0.0)
    expected = (e / np.vdot(x, x).real) * np.conj(x)
    assert np.allclose(out, expected, rtol=0, atol=0)


def test_grad_avg_zero_history_scales_by_one_minus_beta():
    rng = np.random.default_rng(8)
    x = complex_normal(rng, 5)
    e = 1.0 + 2.0j
    out = filters.update_grad_avg(np.zeros(5, dtype=complex), x, e, 0.75)
    expected = 0.25 * (e / np.vdot(x, x).real) * np.conj(x)
    assert np.allclose(out, expected, rtol=1e-15)


def test_grad_avg_hand_example():
    out = filters.update_grad_avg(
        np.array([0.1], dtype=complex), np.array([1.0], dtype=complex), 1.0, 0.99
    )
    assert out[0] == pytest.approx(0.109, rel=1e-12)


def test_grad_avg_rejects_zero_regressor():
    with pytest.raises(ValueError, match="zero"):
        filters.update_grad_avg(
            np.zeros(3, dtype=complex), np.zeros(3, dtype=complex), 1.0, 0.5
        )


def test_grad_avg_rejects_bad_beta():
    with pytest.raises(ValueError, match="beta"):
        filters.update_grad_avg(
            np.zeros(2, dtype=complex), np.ones(2, dtype=complex), 1.0, 1.0
        )


# -- penalties ----------------------------------------------------------------


def test_zero_attraction_disabled_is_zero_vector():
    w = np.array([1.0 + 1j, -2.0], dtype=complex)
    assert np.array_equal(filters.zero_attract_term(w, 0.0), np.zeros(2, complex))


def test_zero_attraction_hand_example():
    # gamma = 0.006 * 0.1: attraction scaled by the noise floor.
    w = np.array([-0.5, 0.0, 0.2], dtype=np.complex128)
    out = filters.zero_attract_term(w, 0.006 * 0.1)
    assert np.allclose(out, [-6e-4, 0.0, 6e-4], rtol=0, atol=1e-18)
    assert out[1] == 0


def test_reweighted_zero_weights_give_zero_term():
    out = filters.reweighted_zero_attract_term(np.zeros(4, complex), 0.01, 20.0)
    assert np.array_equal(out, np.zeros(4, complex))


def test_reweighted_hand_example():
    out = filters.reweighted_zero_attract_term(
        np.array([0.05], dtype=np.complex128), 0.01, 20.0
    )
    assert out[0] == 0.005


def test_reweighted_vanishes_for_large_taps():
    big = np.array([100.0], dtype=np.complex128)
    out = filters.reweighted_zero_attract_term(big, 0.01, 20.0)
    approx = 0.01 / (20.0 * 100.0)
    assert abs(out[0]) == pytest.approx(approx, rel=1e-3)
    assert abs(out[0]) < 1e-5


def test_reweighted_matches_plain_attraction_at_zero_magnitude():
    w = np.zeros(3, dtype=complex)
    za = filters.zero_attract_term(w, 0.01)
    rza = filters.reweighted_zero_attract_term(w, 0.01, 20.0)
    assert np.array_equal(za, rza)


def test_reweighted_approaches_plain_attraction_for_tiny_taps():
    w = np.array([1e-12 - 1e-12j], dtype=np.complex128)
    za = filters.zero_attract_term(w, 0.01)
    rza = filters.reweighted_zero_attract_term(w, 0.01, 20.0)
    assert np.allclose(za, rza, rtol=1e-9)


# -- single update steps ------------------------------------------------------


def test_step_iss_scalar_hand_example():
    config = make_config(filters.ISS_NLMS, mu=0.2)
    state = filters.initial_state(1, config)
    new_state, e = filters.step(
        state, np.array([1.0], dtype=complex), 1.0, config
    )
    assert e == 1.0
    assert new_state.weights[0] == pytest.approx(0.2, rel=0, abs=0)
    assert new_state.step_size == 0.2
    assert new_state.iteration == 1


def test_step_vss_with_beta_near_one_barely_moves():
    config = make_config(filters.VSS_ZA_NLMS, beta=1.0 - 1e-9, gamma_za=0.0)
    state = filters.initial_state(1, config)
    new_state, _ = filters.step(state, np.array([1.0], dtype=complex), 1.0, config)
    assert new_state.step_size < 1e-12
    assert abs(new_state.weights[0]) < 1e-12


def test_step_zero_error_zero_penalty_leaves_weights_unchanged():
    rng = np.random.default_rng(21)
    for variant in filters.VARIANTS:
        config = make_config(variant)
        w = complex_normal(rng, 4)
        state = filters.FilterState(
            weights=w.copy(), grad_avg=np.zeros(4, complex), step_size=0.0
        )
        x = complex_normal(rng, 4)
        y = np.dot(w, x)  # exact, so e == 0
        new_state, e = filters.step(state, x, y, config)
        assert e == 0
        assert np.array_equal(new_state.weights, w)


def test_step_does_not_mutate_input_state():
    config = make_config(filters.VSS_RZA_NLMS, gamma_rza=1e-3)
    state = filters.initial_state(3, config)
    before = state.weights.copy()
    rng = np.random.default_rng(4)
    filters.step(state, complex_normal(rng, 3), 1.0 + 1j, config)
    assert np.array_equal(state.weights, before)
    assert state.iteration == 0


def test_step_iteration_counts_updates():
    config = make_config(filters.ISS_NLMS)
    state = filters.initial_state(2, config)
    rng = np.random.default_rng(31)
    for k in range(1, 6):
        state, _ = filters.step(state, complex_normal(rng, 2), 0.5j, config)
        assert state.iteration == k


def test_step_rejects_degenerate_inputs():
    config = make_config(filters.ISS_NLMS)
    state = filters.initial_state(2, config)
    with pytest.raises(ValueError, match="zero"):
        filters.step(state, np.zeros(2, dtype=complex), 1.0, config)
    with pytest.raises(ValueError, match="does not match"):
        filters.step(state, np.ones(3, dtype=complex), 1.0, config)
    with pytest.raises(ValueError, match="non-finite"):
        filters.step(
            state, np.array([1.0, np.inf], dtype=complex), 1.0, config
        )
    with pytest.raises(ValueError, match="not finite"):
        filters.step(state, np.ones(2, dtype=complex), np.nan, config)


def test_config_validation():
    with pytest.raises(ValueError, match="unknown variant"):
        make_config("nlms")
    with pytest.raises(ValueError, match="mu_max"):
        make_config(filters.VSS_NLMS, mu_max=2.5)
    with pytest.raises(ValueError, match="beta"):
        make_config(filters.VSS_NLMS, beta=1.0)
    with pytest.raises(ValueError, match="c_threshold"):
        make_config(filters.VSS_NLMS, c_threshold=0.0)
    with pytest.raises(ValueError, match="mu must be positive"):
        make_config(filters.ISS_NLMS, mu=0.0)
    with pytest.raises(ValueError, match="gamma_za"):
        make_config(filters.ISS_ZA_NLMS, gamma_za=-1.0)
    with pytest.raises(ValueError, match="epsilon_rza"):
        make_config(filters.VSS_RZA_NLMS, epsilon_rza=0.0)


def test_iss_config_ignores_vss_fields():
    # Fixed-step variants must not validate (or read) the vss knobs.
    config = make_config(filters.ISS_ZA_NLMS, mu_max=99.0, beta=5.0, c_threshold=-1.0)
    state = filters.initial_state(1, config)
    new_state, _ = filters.step(state, np.array([1.0 + 0j]), 1.0, config)
    assert new_state.step_size == config.mu


# -- reduction identities -----------------------------------------------------


def run_variant(variant, regressors, observations, **kwargs):
    config = make_config(variant, **kwargs)
    state = filters.initial_state(regressors[0].size, config)
    trajectory = []
    for x, y in zip(regressors, observations):
        state, _ = filters.step(state, x, y, config)
        trajectory.append(state.weights.copy())
    return np.array(trajectory), state


def test_za_with_zero_gamma_reduces_to_plain_bitwise():
    rng = np.random.default_rng(77)
    xs = [complex_normal(rng, 6) for _ in range(50)]
    ys = [complex(*rng.standard_normal(2)) for _ in range(50)]
    for za, plain in [
        (filters.VSS_ZA_NLMS, filters.VSS_NLMS),
        (filters.ISS_ZA_NLMS, filters.ISS_NLMS),
    ]:
        got, _ = run_variant(za, xs, ys, gamma_za=0.0)
        want, _ = run_variant(plain, xs, ys)
        assert np.array_equal(got, want)


def test_rza_with_zero_gamma_reduces_to_plain_bitwise():
    rng = np.random.default_rng(78)
    xs = [complex_normal(rng, 6) for _ in range(50)]
    ys = [complex(*rng.standard_normal(2)) for _ in range(50)]
    got, _ = run_variant(filters.VSS_RZA_NLMS, xs, ys, gamma_rza=0.0)
    want, _ = run_variant(filters.VSS_NLMS, xs, ys)
    assert np.array_equal(got, want)


# -- behavioral properties ----------------------------------------------------


def test_vss_step_bounds_hold_throughout_noisy_run():
    rng = np.random.default_rng(90)
    w_true = complex_normal(rng, 8, scale=0.3)
    config = make_config(filters.VSS_NLMS)
    state = filters.initial_state(8, config)
    for n in range(500):
        x = complex_normal(rng, 8)
        y = np.dot(w_true, x) + 0.05 * complex(*rng.standard_normal(2))
        state, e = filters.step(state, x, y, config)
        assert 0.0 <= state.step_size < config.mu_max
        if n == 0:
            assert e != 0
            assert state.step_size > 0.0


def test_vss_step_size_decays_as_noiseless_run_converges():
    rng = np.random.default_rng(91)
    w_true = complex_normal(rng, 8, scale=0.3)
    config = make_config(filters.VSS_NLMS, beta=0.9)
    state = filters.initial_state(8, config)
    trace = np.empty(1000)
    for n in range(1000):
        x = complex_normal(rng, 8)
        state, _ = filters.step(state, x, np.dot(w_true, x), config)
        trace[n] = state.step_size
    assert trace[900:].mean() < trace[:100].mean()


def test_iss_noiseless_convergence_below_threshold():
    rng = np.random.default_rng(92)
    w_true = complex_normal(rng, 64, scale=np.sqrt(0.5 / 64))
    config = make_config(filters.ISS_NLMS, mu=0.2)
    state = filters.initial_state(64, config)
    for _ in range(5000):
        x = complex_normal(rng, 64)
        state, _ = filters.step(state, x, np.dot(w_true, x), config)
    residual = np.vdot(w_true - state.weights, w_true - state.weights).real
    assert residual < 1e-6


# -- oracle equivalence -------------------------------------------------------


ORACLE_PARAMS = dict(
    mu=0.2, mu_max=2.0, c_threshold=1e-4, beta=0.99,
    gamma_za=3e-4, gamma_rza=6e-4, epsilon_rza=20.0,
)


@pytest.mark.parametrize("variant", filters.VARIANTS)
def test_trajectories_match_naive_oracle(variant):
    rng = np.random.default_rng(1000)
    for _ in range(5):
        length = int(rng.integers(1, 9))
        w_true = complex_normal(rng, length, scale=0.5)
        xs = [complex_normal(rng, length) for _ in range(200)]
        ys = [
            np.dot(w_true, x) + 0.03 * complex(*rng.standard_normal(2))
            for x in xs
        ]
        expected = run_oracle(
            variant,
            [[complex(v) for v in x] for x in xs],
            [complex(y) for y in ys],
            **ORACLE_PARAMS,
        )
        got, _ = run_variant(variant, xs, ys, **ORACLE_PARAMS)
        want = np.array(expected["weights"])
        scale = max(1.0, float(np.abs(want).max()))
        assert np.abs(got - want).max() / scale < 1e-10
