"""The eight linear combiners and the equalize/rescale/detect pipeline.

Combining matrices are K x N (one row per user). Equalization divides each
user's combined sample by the matching diagonal of W @ H (conventional
receivers) or W @ A (quantization-aware receivers, with A the Bussgang
effective channel); because numerator and denominator share any scaling of
W, the detected symbols are invariant to positive rescalings of either the
combiner or the input vector.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bussgang import QuantizedStatistics, aqnm_covariance
from .errors import (
    DegenerateDenominatorError,
    NotPositiveDefiniteError,
    RankDeficientError,
    ZeroVectorError,
)
from .linalg import hermitian_solve
from .modulation import Constellation


class ReceiverKind(str, Enum):
    MRC = "mrc"
    ZF = "zf"
    MMSE = "mmse"
    AQNM_MMSE = "aqnm-mmse"
    WFQ = "wfq"
    BMRC = "bmrc"
    BZF = "bzf"
    BMMSE = "bmmse"

    def __str__(self):
        return self.value


#: Kinds built from the Bussgang effective channel (and equalized against it).
BUSSGANG_KINDS = frozenset({ReceiverKind.BMRC, ReceiverKind.BZF, ReceiverKind.BMMSE})
#: Kinds whose construction needs the received covariance.
COVARIANCE_KINDS = BUSSGANG_KINDS | {ReceiverKind.AQNM_MMSE, ReceiverKind.WFQ}

DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Combiner:
    """A receiver kind, its K x N combining matrix, and the per-user
    equalization denominators (validated nonzero at construction)."""

    kind: ReceiverKind
    matrix: np.ndarray
    eq_denominators: np.ndarray


def _solve_or_rank_error(gram, rhs):
    try:
        return hermitian_solve(gram, rhs)
    except NotPositiveDefiniteError as exc:
        raise RankDeficientError("channel Gram matrix is rank deficient") from exc


def build_combiner(
    kind: ReceiverKind,
    channel: np.ndarray,
    noise_power: float,
    stats: QuantizedStatistics | None = None,
) -> Combiner:
    """Build the combining matrix for ``kind`` at one channel realization.

    ``stats`` carries the received covariance and Bussgang quantities; it is
    computed on demand when omitted, and should be shared across the
    quantization-aware kinds within a trial.
    """
    channel = np.asarray(channel)
    n, k = channel.shape
    if kind in COVARIANCE_KINDS and stats is None:
        stats = QuantizedStatistics(channel, noise_power)

    if kind is ReceiverKind.MRC:
        matrix = channel.conj().T
    elif kind is ReceiverKind.ZF:
        gram = channel.conj().T @ channel
        matrix = _solve_or_rank_error(gram, channel.conj().T)
    elif kind is ReceiverKind.MMSE:
        gram = channel.conj().T @ channel
        matrix = hermitian_solve(gram + noise_power * np.eye(k), channel.conj().T)
    elif kind is ReceiverKind.AQNM_MMSE:
        aqnm = aqnm_covariance(channel, noise_power, received_cov=stats.received_cov)
        m = stats.received_cov + aqnm.sigma_q / aqnm.kappa**2
        matrix = hermitian_solve(m, channel).conj().T
    elif kind is ReceiverKind.WFQ:
        aqnm = aqnm_covariance(channel, noise_power, received_cov=stats.received_cov)
        m = aqnm.kappa * stats.received_cov + aqnm.alpha * np.diag(
            stats.received_cov.diagonal().real
        )
        matrix = hermitian_solve(m, channel).conj().T
    elif kind is ReceiverKind.BMRC:
        matrix = stats.effective_channel.conj().T
    elif kind is ReceiverKind.BZF:
        effective = stats.effective_channel
        gram = effective.conj().T @ effective
        matrix = _solve_or_rank_error(gram, effective.conj().T)
    elif kind is ReceiverKind.BMMSE:
        effective = stats.effective_channel
        m = effective @ effective.conj().T + stats.noise_cov
        matrix = hermitian_solve(m, effective).conj().T
    else:
        raise ValueError(f"unknown receiver kind {kind!r}")

    reference = stats.effective_channel if kind in BUSSGANG_KINDS else channel
    denominators = np.einsum("kn,nk->k", matrix, reference)
    if (np.abs(denominators) < DENOMINATOR_FLOOR).any():
        raise DegenerateDenominatorError(
            f"{kind} equalization denominator below {DENOMINATOR_FLOOR}"
        )
    return Combiner(kind=kind, matrix=matrix, eq_denominators=denominators)


def demultiplex(matrix: np.ndarray, received: np.ndarray) -> np.ndarray:
    """Separate the user streams: combined = matrix @ received."""
    return matrix @ received


def equalize(combined: np.ndarray, combiner: Combiner) -> np.ndarray:
    """Per-user division by the combiner's equalization denominators.

    For the zero-forcing kinds the denominators are 1 up to rounding, so
    this is a no-op there; applying it uniformly keeps one code path.
    """
    return combined / combiner.eq_denominators


def rescale(equalized: np.ndarray, users: int) -> np.ndarray:
    """Scale to squared norm ``users`` preserving direction.

    Detection-invariant for PSK constellations; required for QAM, where
    decision regions are not scale-free.
    """
    norm = np.linalg.norm(equalized)
    if not norm > 0:
        raise ZeroVectorError("cannot rescale a zero (or non-finite) vector")
    return np.sqrt(users) * (equalized / norm)


def detect(signal: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Symbol-by-symbol nearest-point decision; ties pick the lowest index."""
    distance = np.abs(signal[:, None] - constellation.points[None, :])
    return constellation.points[distance.argmin(axis=1)]


def detect_pipeline(
    received: np.ndarray, combiner: Combiner, constellation: Constellation
) -> np.ndarray:
    """demultiplex -> equalize -> rescale -> detect for one receive vector."""
    combined = demultiplex(combiner.matrix, received)
    equalized = equalize(combined, combiner)
    rescaled = rescale(equalized, equalized.shape[0])
    return detect(rescaled, constellation)
