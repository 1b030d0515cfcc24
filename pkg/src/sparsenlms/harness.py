"""Monte Carlo experiment harness for sparse MIMO channel estimation.

The harness estimates a static ``n_r x (n_t * tap_length)`` channel
matrix by running one adaptive filter per receive antenna.  Iteration
``n`` (1-based) updates only antenna ``mod(n - 1, n_r) + 1`` with a
fresh unit-power training regressor and a noisy observation through the
true channel.  Identification quality is tracked per iteration as the
squared Frobenius distance between the true and estimated matrices, and
averaged across trials elementwise.

Noise levels derive from the received SNR: with unit-norm receive rows
and unit-total-power regressors the received signal power is ``1 /
(n_t * tap_length)``, and the noise variance is that power times
``10**(-snr_db / 10)``.

The penalty strengths of the sparsity-aware variants scale with the
noise floor.  The configured coefficients ``rho_za`` and ``rho_rza``
act as regularization weights in units of the noise variance; the
update prefactors passed to the filters are ``gamma_za = mu * rho_za *
variance`` and ``gamma_rza = mu * rho_rza * epsilon_rza * variance``
(the reweighted pull is defined through the product of step size,
regularization weight and reweighting scale).

The bit-error-rate sweep trains each algorithm at a fixed SNR, freezes
the estimates, and transmits Gray-coded QAM over cyclic-prefixed OFDM
frames through the true channel, detecting per subcarrier by zero
forcing with either the frozen estimates or the true channel ("genie"
baseline, reported as algorithm ``true_channel``).  All detectors see
identical frames, bits and noise, so BER differences reflect only
channel-estimate quality.

Reproducibility: every random stream is derived from ``rng_seed``
together with the trial (or frame) index through seed sequences, and
aggregation always runs in fixed trial order, so equal configurations
produce byte-identical outputs.  Trials never share mutable state and
may be computed in any order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields

import numpy as np

from . import filters
from .channel import ChannelMatrix, NoiseModel, apply_channel, generate_sparse_channel
from .modem import QAM_ORDERS, qam_constellation, qam_demodulate, qam_modulate
from .signals import generate_training_regressor

TRUE_CHANNEL = "true_channel"

# Regularization weights (per unit noise variance) by channel sparsity:
# single-tap links get the stronger pull.
DEFAULT_RHO_ZA = {1: 0.006, "denser": 0.002}
DEFAULT_RHO_RZA = {1: 0.0006, "denser": 0.0002}

# Alternative threshold schedule for the adaptive step-size law, keyed
# by SNR in dB.  Not applied by default: a flat ``c_threshold`` of 1e-4
# keeps the adaptive step in its productive range during the transient
# (1e-5 pins it against mu_max where the normalized update barely
# contracts); see ExperimentConfig.c_by_snr.
ALTERNATE_C_BY_SNR = {5.0: 1e-4, 10.0: 1e-5, 20.0: 1e-5}


@dataclass
class ExperimentConfig:
    """Full description of one experiment.

    Defaults describe the reference scenario: a 4x4 channel with 16
    taps per link, unit-power training, all six algorithm variants,
    200 trials.  ``rho_za`` and ``rho_rza`` default per sparsity
    (0.006/0.0006 for single-tap links, 0.002/0.0002 otherwise).

    ``stop_epsilon`` is the squared-Frobenius threshold on successive
    estimates below which a trial stops early.  It defaults to 0
    (disabled): the classic stop rule value of 1e-5 triggers on single
    small-error updates long before the average error settles, which
    truncates convergence curves; set it explicitly when early
    stopping is wanted.
    """

    n_t: int = 4
    n_r: int = 4
    tap_length: int = 16
    sparsity: int = 1
    snr_db: list = field(default_factory=lambda: [10.0, 20.0])
    algorithms: list = field(default_factory=lambda: list(filters.VARIANTS))
    mu: float = 0.2
    mu_max: float = 2.0
    c_threshold: float = 1e-4
    c_by_snr: dict | None = None
    beta: float = 0.99
    rho_za: float | None = None
    rho_rza: float | None = None
    epsilon_rza: float = 20.0
    max_iterations: int = 5000
    stop_epsilon: float = 0.0
    num_trials: int = 200
    rng_seed: int = 12345
    subcarrier_count: int = 64
    cp_length: int = 16
    qam_orders: list = field(default_factory=lambda: [16, 64, 256])
    esn0_range_db: list = field(default_factory=lambda: [12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0])
    ber_training_snr_db: float = 10.0
    ber_num_channels: int = 10
    ber_min_errors: int = 100
    ber_min_bits: int = 100_000
    ber_max_frames: int = 1000

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("n_t and n_r must be at least 1")
        if self.tap_length < 1:
            raise ValueError("tap_length must be at least 1")
        if not 1 <= self.sparsity <= self.tap_length:
            raise ValueError("sparsity must lie in [1, tap_length]")
        if not self.snr_db:
            raise ValueError("snr_db must not be empty")
        if not self.algorithms:
            raise ValueError("algorithms must not be empty")
        for name in self.algorithms:
            if name not in filters.VARIANTS:
                raise ValueError(
                    f"unknown algorithm {name!r}; expected one of {filters.VARIANTS}"
                )
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.stop_epsilon < 0.0:
            raise ValueError("stop_epsilon must be nonnegative")
        if self.num_trials < 1:
            raise ValueError("num_trials must be at least 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be nonnegative")
        for order in self.qam_orders:
            if order not in QAM_ORDERS:
                raise ValueError(f"qam order must be one of {QAM_ORDERS}, got {order}")
        if not self.esn0_range_db:
            raise ValueError("esn0_range_db must not be empty")
        if self.ber_num_channels < 1:
            raise ValueError("ber_num_channels must be at least 1")
        if self.ber_min_errors < 0 or self.ber_min_bits < 0:
            raise ValueError("ber stopping thresholds must be nonnegative")
        if self.ber_max_frames < 1:
            raise ValueError("ber_max_frames must be at least 1")
        # The remaining AlgorithmConfig constraints (mu, mu_max, beta,
        # c_threshold, epsilon_rza) are enforced on resolution below.

    # -- resolution helpers -------------------------------------------------

    def filter_length(self):
        return self.n_t * self.tap_length

    def received_signal_power(self):
        """Mean power of the noiseless observation at any receive antenna."""
        return 1.0 / self.filter_length()

    def noise_variance(self, snr_db):
        return self.received_signal_power() * 10.0 ** (-snr_db / 10.0)

    def c_for_snr(self, snr_db):
        if self.c_by_snr is not None and float(snr_db) in self.c_by_snr:
            return float(self.c_by_snr[float(snr_db)])
        return self.c_threshold

    def resolved_rho_za(self):
        if self.rho_za is not None:
            return self.rho_za
        return DEFAULT_RHO_ZA[1] if self.sparsity == 1 else DEFAULT_RHO_ZA["denser"]

    def resolved_rho_rza(self):
        if self.rho_rza is not None:
            return self.rho_rza
        return DEFAULT_RHO_RZA[1] if self.sparsity == 1 else DEFAULT_RHO_RZA["denser"]

    def algorithm_config(self, variant, snr_db):
        """Resolve the filter parameters for one variant at one SNR."""
        variance = self.noise_variance(snr_db)
        return filters.AlgorithmConfig(
            variant=variant,
            mu=self.mu,
            mu_max=self.mu_max,
            c_threshold=self.c_for_snr(snr_db),
            beta=self.beta,
            gamma_za=self.mu * self.resolved_rho_za() * variance,
            gamma_rza=self.mu * self.resolved_rho_rza() * self.epsilon_rza * variance,
            epsilon_rza=self.epsilon_rza,
        )

    def validate_ofdm(self):
        if self.cp_length < self.tap_length - 1:
            raise ValueError(
                f"cp_length {self.cp_length} shorter than channel memory "
                f"{self.tap_length - 1}"
            )
        if self.subcarrier_count < self.tap_length:
            raise ValueError("subcarrier_count must be at least tap_length")

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        out = {}
        for entry in fields(self):
            value = getattr(self, entry.name)
            if isinstance(value, list):
                value = list(value)
            elif isinstance(value, dict):
                value = {str(float(k)): float(v) for k, v in value.items()}
            out[entry.name] = value
        return out

    @classmethod
    def from_dict(cls, data):
        known = {entry.name for entry in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown configuration field(s): {', '.join(unknown)}")
        values = dict(data)
        # Scalars are accepted where lists are expected (a single SNR,
        # a single QAM order, one algorithm name) and element types are
        # normalized so serialized configs round-trip exactly.
        for name, kind in (("snr_db", float), ("esn0_range_db", float),
                           ("qam_orders", int)):
            if name in values:
                raw = values[name]
                if not isinstance(raw, (list, tuple)):
                    raw = [raw]
                values[name] = [kind(v) for v in raw]
        if isinstance(values.get("algorithms"), str):
            values["algorithms"] = [values["algorithms"]]
        if values.get("c_by_snr") is not None:
            values["c_by_snr"] = {
                float(k): float(v) for k, v in values["c_by_snr"].items()
            }
        return cls(**values)


# -- result containers ------------------------------------------------------


@dataclass
class TrialResult:
    """Outputs of a single estimation run.

    The error and step-size series always have ``max_iterations``
    entries; when the stop rule fires at iteration ``iterations_run``
    the remaining entries repeat the final value (the frozen estimate's
    error stays constant once updating stops).
    """

    squared_error: np.ndarray
    step_trace: np.ndarray
    final_estimate: np.ndarray
    channel: ChannelMatrix
    iterations_run: int


@dataclass
class MseCurve:
    """Trial-averaged squared identification error per iteration."""

    values: np.ndarray
    algorithm: str
    snr_db: float
    sparsity: int
    num_trials: int
    rng_seed: int


@dataclass
class BerCurve:
    """Measured bit error rates over a range of symbol SNRs."""

    esn0_db: np.ndarray
    ber: np.ndarray
    bit_errors: np.ndarray
    bits_total: np.ndarray
    algorithm: str
    qam_order: int
    training_snr_db: float
    sparsity: int
    rng_seed: int


# -- scheduling and metrics --------------------------------------------------


def select_receive_antenna(n, n_r_count):
    """Round-robin antenna index (1-based) for iteration ``n`` (1-based)."""
    if n < 1:
        raise ValueError("iteration index must be at least 1")
    if n_r_count < 1:
        raise ValueError("n_r_count must be at least 1")
    return (n - 1) % n_r_count + 1


def check_stop(h_prev, h_next, n, stop_epsilon=1e-5, max_iterations=5000):
    """Stop when the estimate barely moved or the iteration cap is hit.

    ``h_prev`` and ``h_next`` are successive channel-estimate matrices;
    the rule compares their squared Frobenius distance to
    ``stop_epsilon``.
    """
    if n > max_iterations:
        return True
    diff = np.asarray(h_next) - np.asarray(h_prev)
    return float(np.sum(diff.real**2 + diff.imag**2)) <= stop_epsilon


def channel_error(h_true, h_est):
    """Squared Frobenius distance between two channel matrices."""
    h_true = np.asarray(h_true)
    h_est = np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise ValueError(f"shape mismatch: {h_true.shape} vs {h_est.shape}")
    diff = h_true - h_est
    return float(np.sum(diff.real**2 + diff.imag**2))


def steady_state_mean(values, fraction=0.1):
    """Mean over the trailing ``fraction`` of a series (at least 1 entry)."""
    values = np.asarray(values)
    count = max(1, int(round(fraction * values.size)))
    return float(values[-count:].mean())


# -- estimation experiments ---------------------------------------------------


def run_estimation_trial(config, trial_index, algorithm=None, snr_db=None):
    """Run one seeded estimation trial and return its :class:`TrialResult`.

    The channel and the training/noise streams derive from
    ``(rng_seed, trial_index)`` only, never from the algorithm or SNR,
    so different algorithms face identical data and comparisons between
    them are paired.
    """
    if trial_index < 0:
        raise ValueError("trial_index must be nonnegative")
    algorithm = config.algorithms[0] if algorithm is None else algorithm
    snr_db = config.snr_db[0] if snr_db is None else snr_db
    algo_config = config.algorithm_config(algorithm, snr_db)
    noise = NoiseModel.from_snr_db(snr_db, config.received_signal_power())

    rng_channel = np.random.default_rng([config.rng_seed, trial_index, 0])
    chan = generate_sparse_channel(
        rng_channel, config.n_t, config.n_r, config.tap_length, config.sparsity
    )
    rng_data = np.random.default_rng([config.rng_seed, trial_index, 1])

    length = config.filter_length()
    states = [filters.initial_state(length, algo_config) for _ in range(config.n_r)]
    estimate = np.zeros((config.n_r, length), dtype=np.complex128)
    squared_error = np.empty(config.max_iterations)
    step_trace = np.empty(config.max_iterations)
    iterations_run = config.max_iterations

    for n in range(1, config.max_iterations + 1):
        antenna = select_receive_antenna(n, config.n_r) - 1
        x = generate_training_regressor(rng_data, config.n_t, config.tap_length)
        y = apply_channel(chan.entries[antenna], x, noise, rng_data)
        h_prev = estimate.copy()
        states[antenna], _ = filters.step(states[antenna], x, y, algo_config)
        estimate[antenna] = states[antenna].weights
        squared_error[n - 1] = channel_error(chan.entries, estimate)
        step_trace[n - 1] = states[antenna].step_size
        if check_stop(
            h_prev, estimate, n, config.stop_epsilon, config.max_iterations
        ):
            iterations_run = n
            squared_error[n:] = squared_error[n - 1]
            step_trace[n:] = step_trace[n - 1]
            break

    return TrialResult(
        squared_error=squared_error,
        step_trace=step_trace,
        final_estimate=estimate,
        channel=chan,
        iterations_run=iterations_run,
    )


def run_monte_carlo_mse(config):
    """Average identification error curves for every (algorithm, SNR) pair.

    Trials are aggregated in index order, so repeated runs of the same
    configuration produce identical curves.
    """
    curves = []
    for algorithm in config.algorithms:
        for snr in config.snr_db:
            total = np.zeros(config.max_iterations)
            for trial in range(config.num_trials):
                result = run_estimation_trial(
                    config, trial, algorithm=algorithm, snr_db=snr
                )
                total += result.squared_error
            curves.append(
                MseCurve(
                    values=total / config.num_trials,
                    algorithm=algorithm,
                    snr_db=snr,
                    sparsity=config.sparsity,
                    num_trials=config.num_trials,
                    rng_seed=config.rng_seed,
                )
            )
    return curves


# -- BER experiment -----------------------------------------------------------


def _frequency_responses(cir_matrix, n_t, n_r, tap_length, k):
    """Per-subcarrier channel matrices, shaped ``(k, n_r, n_t)``."""
    cirs = np.asarray(cir_matrix).reshape(n_r, n_t, tap_length)
    return np.moveaxis(np.fft.fft(cirs, n=k, axis=2), 2, 0)


def _zero_forcing_tables(freq_resp):
    """Pseudo-inverses plus a mask of rank-deficient subcarriers."""
    singular = np.linalg.svd(freq_resp, compute_uv=False)
    failed = singular[:, -1] <= singular[:, 0] * 1e-12
    return np.linalg.pinv(freq_resp), failed


def run_ber_sweep(config):
    """Train, freeze, transmit, detect: BER curves per algorithm and order.

    Returns one :class:`BerCurve` per (algorithm, QAM order) pair plus
    the genie baseline (``true_channel``) per order.  Frames at each
    E_s/N_0 point accumulate until the configured minimum bit and error
    counts are reached (or the frame cap), cycling through
    ``ber_num_channels`` independently trained channel realizations.
    """
    config.validate_ofdm()
    detectors = [TRUE_CHANNEL] + list(config.algorithms)
    k = config.subcarrier_count
    n_t, n_r = config.n_t, config.n_r

    channels = []
    zf_tables = []
    for trial in range(config.ber_num_channels):
        tables = {}
        for algorithm in config.algorithms:
            result = run_estimation_trial(
                config,
                trial,
                algorithm=algorithm,
                snr_db=config.ber_training_snr_db,
            )
            chan = result.channel
            tables[algorithm] = _zero_forcing_tables(
                _frequency_responses(
                    result.final_estimate, n_t, n_r, config.tap_length, k
                )
            )
        tables[TRUE_CHANNEL] = _zero_forcing_tables(
            _frequency_responses(chan.entries, n_t, n_r, config.tap_length, k)
        )
        channels.append(chan)
        zf_tables.append(tables)

    curves = []
    for order in config.qam_orders:
        table = qam_constellation(order)
        bits_per_frame = k * n_t * table.bits_per_symbol
        point_errors = {d: [] for d in detectors}
        point_bits = []
        for point_index, esn0 in enumerate(config.esn0_range_db):
            n0 = 10.0 ** (-esn0 / 10.0)
            errors = {d: 0 for d in detectors}
            bits_sent = 0
            frames = 0
            while frames < config.ber_max_frames:
                trial = frames % config.ber_num_channels
                chan = channels[trial]
                rng = np.random.default_rng(
                    [config.rng_seed, 2, int(order), point_index, frames]
                )
                tx_bits = rng.integers(0, 2, size=(n_t, k * table.bits_per_symbol))
                tx_time = np.empty((n_t, k + config.cp_length), dtype=np.complex128)
                for it in range(n_t):
                    symbols = qam_modulate(tx_bits[it], order)
                    block = np.fft.ifft(symbols) * np.sqrt(k)
                    tx_time[it, : config.cp_length] = block[-config.cp_length :]
                    tx_time[it, config.cp_length :] = block
                block_len = k + config.cp_length
                noise = np.sqrt(n0 / 2.0) * (
                    rng.standard_normal((n_r, block_len))
                    + 1j * rng.standard_normal((n_r, block_len))
                )
                rx_freq = np.empty((k, n_r), dtype=np.complex128)
                cirs = chan.link_cirs()
                for ir in range(n_r):
                    acc = np.zeros(block_len, dtype=np.complex128)
                    for it in range(n_t):
                        acc += np.convolve(cirs[ir, it], tx_time[it])[:block_len]
                    acc += noise[ir]
                    rx_freq[:, ir] = np.fft.fft(acc[config.cp_length :]) / np.sqrt(k)
                for detector in detectors:
                    pinv, failed = zf_tables[trial][detector]
                    detected = np.einsum("kij,kj->ki", pinv, rx_freq)
                    wrong = 0
                    for it in range(n_t):
                        rx_bits = qam_demodulate(detected[:, it], order)
                        diff = (
                            rx_bits.reshape(k, table.bits_per_symbol)
                            != tx_bits[it].reshape(k, table.bits_per_symbol)
                        )
                        if failed.any():
                            diff[failed] = True
                        wrong += int(diff.sum())
                    errors[detector] += wrong
                bits_sent += bits_per_frame
                frames += 1
                if bits_sent >= config.ber_min_bits and all(
                    errors[d] >= config.ber_min_errors for d in detectors
                ):
                    break
            for detector in detectors:
                point_errors[detector].append(errors[detector])
            point_bits.append(bits_sent)
        for detector in detectors:
            bit_errors = np.array(point_errors[detector], dtype=np.int64)
            bits_total = np.array(point_bits, dtype=np.int64)
            curves.append(
                BerCurve(
                    esn0_db=np.asarray(config.esn0_range_db, dtype=float),
                    ber=bit_errors / bits_total,
                    bit_errors=bit_errors,
                    bits_total=bits_total,
                    algorithm=detector,
                    qam_order=int(order),
                    training_snr_db=config.ber_training_snr_db,
                    sparsity=config.sparsity,
                    rng_seed=config.rng_seed,
                )
            )
    return curves


# -- CSV output ---------------------------------------------------------------


def _format(value):
    return repr(float(value))


def write_mse_csv(path, curve):
    """Write an MSE curve as ``iteration, mse_linear, mse_db`` rows."""
    with open(path, "w", newline="") as handle:
        handle.write(
            f"# mse-curve algorithm={curve.algorithm} snr_db={curve.snr_db:g} "
            f"sparsity={curve.sparsity} num_trials={curve.num_trials} "
            f"rng_seed={curve.rng_seed}\n"
        )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["iteration", "mse_linear", "mse_db"])
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(curve.values)
        for i, (linear, decibel) in enumerate(zip(curve.values, db), start=1):
            writer.writerow([i, _format(linear), _format(decibel)])


def write_stepsize_csv(path, trace, algorithm, snr_db, sparsity, rng_seed):
    """Write a step-size trace as ``iteration, step_size`` rows."""
    with open(path, "w", newline="") as handle:
        handle.write(
            f"# stepsize-trace algorithm={algorithm} snr_db={snr_db:g} "
            f"sparsity={sparsity} rng_seed={rng_seed}\n"
        )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["iteration", "step_size"])
        for i, value in enumerate(trace, start=1):
            writer.writerow([i, _format(value)])


def write_ber_csv(path, curve):
    """Write a BER curve as ``esn0_db, ber, bit_errors, bits_total`` rows."""
    with open(path, "w", newline="") as handle:
        handle.write(
            f"# ber-curve algorithm={curve.algorithm} qam_order={curve.qam_order} "
            f"training_snr_db={curve.training_snr_db:g} sparsity={curve.sparsity} "
            f"rng_seed={curve.rng_seed}\n"
        )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["esn0_db", "ber", "bit_errors", "bits_total"])
        for esn0, ber, nerr, nbits in zip(
            curve.esn0_db, curve.ber, curve.bit_errors, curve.bits_total
        ):
            writer.writerow([_format(esn0), _format(ber), int(nerr), int(nbits)])
