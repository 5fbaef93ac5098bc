"""Monte Carlo trial execution, BER accumulation, and statistical diagnostics.

One trial draws a fresh channel, payload bits, and noise, then evaluates
every requested receiver on the same draw (paired comparison). Sweeps
accumulate trials in fixed batches of ``BATCH_SIZE``; the stopping rule is
evaluated only at batch boundaries, in batch-index order, so the recorded
counts are byte-identical for any worker count or scheduling. Workers can
run ahead speculatively: a batch's per-receiver error counts depend only on
(seed, trial index), never on which receivers are still accumulating.
"""

import logging
import math
from concurrent.futures import FIRST_COMPLETED, Executor, ProcessPoolExecutor, wait
from dataclasses import dataclass, replace

import numpy as np

from .bussgang import QuantizedStatistics, bussgang_matrices
from .channel import (
    SystemConfig,
    draw_channel,
    noise_power_from_snr_db,
    one_bit_quantize,
    transmit,
)
from .errors import RankDeficientError
from .modulation import make_constellation, map_bits_to_symbols, symbols_to_bits
from .receivers import COVARIANCE_KINDS, ReceiverKind, build_combiner, detect_pipeline
from .rng import TrialStreams, trial_streams

logger = logging.getLogger(__name__)

#: Trials per stopping-rule evaluation window.
BATCH_SIZE = 1000
#: Redraw attempts for (probability-zero) rank-deficient channel draws.
_MAX_REDRAWS = 8


@dataclass(frozen=True)
class TrialPlan:
    """A BER-versus-SNR sweep specification.

    ``config.noise_power`` is replaced per grid point from the SNR value;
    ``min_bit_errors = 0`` disables the early-stop target so every point
    runs exactly ``max_trials`` trials.
    """

    config: SystemConfig
    kinds: tuple[ReceiverKind, ...]
    snr_db_grid: tuple[float, ...]
    max_trials: int
    min_bit_errors: int
    seed: int
    quantized: bool = True

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be >= 1, got {self.max_trials}")
        if self.min_bit_errors < 0:
            raise ValueError(
                f"min_bit_errors must be >= 0, got {self.min_bit_errors}"
            )
        if not self.snr_db_grid:
            raise ValueError("snr_db_grid must be nonempty")
        if not self.kinds:
            raise ValueError("kinds must be nonempty")
        if len(set(self.kinds)) != len(self.kinds):
            raise ValueError("kinds must be unique")
        if self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")


@dataclass(frozen=True)
class BerRecord:
    """Accumulated counts for one (receiver, SNR, K, N) cell."""

    snr_db: float
    kind: ReceiverKind
    users: int
    antennas: int
    modulation: str
    trials: int
    bits: int
    bit_errors: int

    def __post_init__(self):
        if not 0 <= self.bit_errors <= self.bits:
            raise ValueError("bit_errors must lie in [0, bits]")

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits


def run_trial(
    config: SystemConfig,
    kinds: tuple[ReceiverKind, ...],
    streams: TrialStreams,
    quantized: bool = True,
) -> dict[ReceiverKind, int]:
    """One trial: per-kind bit-error counts on a shared (H, x, z) draw.

    Channel statistics are computed once and shared across the
    quantization-aware kinds. With ``quantized=False`` the pipeline runs on
    the analog receive vector (no-floor baseline).
    """
    constellation = make_constellation(config.modulation)
    channel = draw_channel(config, streams.channel)
    bits = streams.symbols.integers(0, 2, size=config.users * constellation.bits_per_symbol)
    symbols = map_bits_to_symbols(bits, constellation)
    received = transmit(channel, symbols, config.noise_power, streams.noise)
    observed = one_bit_quantize(received) if quantized else received

    stats = None
    if any(kind in COVARIANCE_KINDS for kind in kinds):
        stats = QuantizedStatistics(channel, config.noise_power)

    errors = {}
    for kind in kinds:
        combiner = build_combiner(kind, channel, config.noise_power, stats=stats)
        detected = detect_pipeline(observed, combiner, constellation)
        errors[kind] = int(
            np.count_nonzero(symbols_to_bits(detected, constellation) != bits)
        )
    return errors


def _batch_counts(config, kinds, seed, start, stop, quantized):
    """Sum per-kind bit errors over trial indices [start, stop)."""
    totals = dict.fromkeys(kinds, 0)
    for index in range(start, stop):
        for redraw in range(_MAX_REDRAWS):
            try:
                counts = run_trial(
                    config, kinds, trial_streams(seed, index, redraw), quantized
                )
                break
            except RankDeficientError:
                logger.warning(
                    "discarding rank-deficient draw at trial %d (redraw %d)",
                    index,
                    redraw + 1,
                )
        else:
            raise RankDeficientError(
                f"trial {index}: {_MAX_REDRAWS} consecutive rank-deficient draws"
            )
        for kind in kinds:
            totals[kind] += counts[kind]
    return totals


def _run_point(
    config: SystemConfig,
    kinds: tuple[ReceiverKind, ...],
    seed: int,
    max_trials: int,
    min_bit_errors: int,
    quantized: bool,
    executor: Executor | None = None,
    max_inflight: int = 1,
) -> dict[ReceiverKind, tuple[int, int]]:
    """Accumulate one grid point; returns kind -> (trials, bit_errors).

    Each kind stops at the first batch boundary where its cumulative errors
    reach ``min_bit_errors`` (if positive), else at ``max_trials``. Batch
    results are folded strictly in batch-index order, so the outcome is
    independent of execution order; parallel batches are dispatched with the
    kinds still active as of the folded prefix, a superset of the kinds
    canonically active at any later boundary.
    """
    n_batches = math.ceil(max_trials / BATCH_SIZE)
    threshold = min_bit_errors if min_bit_errors > 0 else None
    cumulative = dict.fromkeys(kinds, 0)
    outcome: dict[ReceiverKind, tuple[int, int]] = {}
    active = list(kinds)

    def fold(batch_index, counts):
        nonlocal active
        boundary = min((batch_index + 1) * BATCH_SIZE, max_trials)
        remaining = []
        for kind in active:
            cumulative[kind] += counts[kind]
            done = threshold is not None and cumulative[kind] >= threshold
            if done or boundary >= max_trials:
                outcome[kind] = (boundary, cumulative[kind])
            else:
                remaining.append(kind)
        active = remaining

    def batch_args(index):
        start = index * BATCH_SIZE
        return config, tuple(active), seed, start, min(start + BATCH_SIZE, max_trials), quantized

    if executor is None:
        for index in range(n_batches):
            if not active:
                break
            fold(index, _batch_counts(*batch_args(index)))
    else:
        pending = {}
        ready = {}
        next_batch = prefix = 0
        while active:
            while len(pending) < max_inflight and next_batch < n_batches:
                pending[executor.submit(_batch_counts, *batch_args(next_batch))] = next_batch
                next_batch += 1
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for future in done:
                ready[pending.pop(future)] = future.result()
            while prefix in ready and active:
                fold(prefix, ready.pop(prefix))
                prefix += 1
    return outcome


def ber_sweep(plan: TrialPlan, workers: int = 1) -> list[BerRecord]:
    """Run the plan over its SNR grid; one record per (SNR, kind).

    Trial randomness is keyed by (seed, trial index) only, so grid points
    share channel/bit draws (common random numbers) and results do not
    depend on ``workers``.
    """
    constellation = make_constellation(plan.config.modulation)
    bits_per_trial = plan.config.users * constellation.bits_per_symbol
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    records = []
    try:
        for snr_db in plan.snr_db_grid:
            config = replace(
                plan.config, noise_power=noise_power_from_snr_db(snr_db)
            )
            point = _run_point(
                config,
                plan.kinds,
                plan.seed,
                plan.max_trials,
                plan.min_bit_errors,
                plan.quantized,
                executor=executor,
                max_inflight=2 * workers,
            )
            for kind in plan.kinds:
                trials, bit_errors = point[kind]
                records.append(
                    BerRecord(
                        snr_db=snr_db,
                        kind=kind,
                        users=config.users,
                        antennas=config.antennas,
                        modulation=config.modulation,
                        trials=trials,
                        bits=trials * bits_per_trial,
                        bit_errors=bit_errors,
                    )
                )
    finally:
        if executor is not None:
            executor.shutdown()
    return records


#: Error-floor sweep operating point (floors are read off at high SNR).
FLOOR_SNR_DB = 30.0
FLOOR_ANTENNAS_PER_USER = 8


def error_floor_sweep(
    user_counts,
    kinds,
    seed: int,
    max_trials: int,
    min_bit_errors: int,
    workers: int = 1,
) -> list[BerRecord]:
    """Error floors versus user count: QPSK at 30 dB with N = 8K antennas."""
    records = []
    for users in user_counts:
        config = SystemConfig.from_snr_db(
            users, FLOOR_ANTENNAS_PER_USER * users, FLOOR_SNR_DB, "qpsk"
        )
        plan = TrialPlan(
            config=config,
            kinds=tuple(kinds),
            snr_db_grid=(FLOOR_SNR_DB,),
            max_trials=max_trials,
            min_bit_errors=min_bit_errors,
            seed=seed,
        )
        records.extend(ber_sweep(plan, workers=workers))
    return records


def _gaussian_symbols(users, samples, rng):
    """Unit-power complex Gaussian payload, the regime in which the
    quantizer's second-order linearization is exact."""
    return (
        rng.standard_normal((users, samples)) + 1j * rng.standard_normal((users, samples))
    ) * np.sqrt(0.5)


def residual_cross_covariance(
    channel,
    noise_power,
    samples: int,
    rng: np.random.Generator,
    gain=None,
):
    """Max |sample cross-covariance| of (receive, quantization residual) and
    (symbols, effective noise).

    Both vanish as the sample count grows when the Bussgang gain is used;
    pass a wrong ``gain`` (e.g. zeros) as a negative control. Symbols are
    drawn complex Gaussian with identity covariance: the decomposition's
    second-order identities are exact for Gaussian quantizer input, which
    is what this diagnostic checks. The quantizer output is scaled to unit
    per-component power to match the gain convention (see
    :mod:`onebit_mimo.bussgang`).
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples for a meaningful estimate")
    channel = np.asarray(channel)
    n, k = channel.shape
    bussgang_gain, effective_channel = bussgang_matrices(channel, noise_power)
    if gain is None:
        gain = bussgang_gain
    symbols = _gaussian_symbols(k, samples, rng)
    noise = (
        rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    ) * np.sqrt(noise_power / 2.0)
    received = channel @ symbols + noise
    observed = one_bit_quantize(received) / np.sqrt(2.0)
    residual = observed - gain @ received
    effective_noise = observed - effective_channel @ symbols
    receive_stat = np.abs(received @ residual.conj().T).max() / samples
    symbol_stat = np.abs(symbols @ effective_noise.conj().T).max() / samples
    return receive_stat, symbol_stat


def sample_output_covariance(
    channel, noise_power, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample covariance of the raw quantizer output (diagonal is exactly 2).

    Under Gaussian signaling the off-diagonals follow the arcsine law for
    the {+-1 +- 1j} alphabet, i.e. (4/pi) * [arcsin(Re C) + j*arcsin(Im C)]
    with C the normalized receive covariance: a factor 2 above the
    unit-power convention the linearized-model statistics use.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples for a meaningful estimate")
    channel = np.asarray(channel)
    n, k = channel.shape
    symbols = _gaussian_symbols(k, samples, rng)
    noise = (
        rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    ) * np.sqrt(noise_power / 2.0)
    observed = one_bit_quantize(channel @ symbols + noise)
    return observed @ observed.conj().T / samples


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054):
    """Wilson score confidence interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = successes / total
    denom = 1.0 + z**2 / total
    center = (p + z**2 / (2 * total)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / total + z**2 / (4 * total**2))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == total else min(1.0, center + half)
    return low, high
