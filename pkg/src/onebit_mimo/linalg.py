"""Dense complex linear-algebra kernels used by the receiver builders.

All receiver formulas written with a matrix inverse are evaluated by
factor-and-solve instead; matrices here are small (at most a few hundred
rows) and always Hermitian positive definite up to rounding.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ArcsinDomainError, NotPositiveDefiniteError

# Max allowed elementwise |M - M^H| before refusing to treat M as Hermitian.
HERMITIAN_TOL = 1e-10
# Band around [-1, 1] tolerated before clamping arcsine arguments.
ARCSIN_BAND = 1e-9
# Relative diagonal jitter for the single retry on a failed factorization.
_JITTER_SCALE = 1e-10


def hermitian_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for Hermitian positive-definite ``matrix``.

    Factors once via Cholesky; if the factorization fails (numerically
    semi-definite input), retries once with a tiny trace-scaled diagonal
    jitter before raising :class:`NotPositiveDefiniteError`.
    """
    matrix = np.asarray(matrix)
    rhs = np.asarray(rhs)
    asymmetry = np.abs(matrix - matrix.conj().T).max()
    if not asymmetry <= HERMITIAN_TOL:
        raise ValueError(
            f"matrix is not Hermitian: max |M - M^H| = {asymmetry!r} "
            f"exceeds {HERMITIAN_TOL}"
        )
    try:
        factor = cho_factor(matrix, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        n = matrix.shape[0]
        jitter = _JITTER_SCALE * matrix.trace().real / n
        try:
            factor = cho_factor(
                matrix + jitter * np.eye(n), lower=True, check_finite=False
            )
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(
                "Cholesky factorization failed even after jitter retry"
            ) from exc
    solution = cho_solve(factor, rhs, check_finite=False)
    if not np.isfinite(solution).all():
        raise NotPositiveDefiniteError("solve produced non-finite entries")
    return solution


def elementwise_arcsin(matrix: np.ndarray) -> np.ndarray:
    """Arcsine applied separately to the real and imaginary part of each entry.

    Inputs must lie in [-1, 1] up to a rounding band of ``ARCSIN_BAND`` per
    component; entries inside the band are clamped before evaluation.
    Normalized covariances have unit diagonal analytically, but rounding can
    push components slightly past 1.
    """
    matrix = np.asarray(matrix)
    re, im = matrix.real, matrix.imag
    limit = 1.0 + ARCSIN_BAND
    in_band = (np.abs(re) <= limit).all() and (np.abs(im) <= limit).all()
    if not in_band:
        raise ArcsinDomainError(
            "entry outside [-1, 1] by more than the rounding band; "
            "input is not a normalized covariance"
        )
    return np.arcsin(np.clip(re, -1.0, 1.0)) + 1j * np.arcsin(np.clip(im, -1.0, 1.0))
