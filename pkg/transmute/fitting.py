"""
Linear fits of sampled data by a finite set of basis columns.

Both fits first orthogonalize the column-equilibrated design matrix with a
column-pivoted QR factorization; a vanishing pivot means the basis has
become numerically dependent and is reported with the offending column.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import qr, solve_triangular

from .errors import FitError, RankDeficientError

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-14
NOISE_FACTOR = 64


@dataclass
class _Factorization:
    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray
    scale: np.ndarray

    def coefficients(self, z: np.ndarray) -> np.ndarray:
        """Map coordinates in the Q basis back to the original columns."""
        pivoted = solve_triangular(self.R, z)
        coef = np.empty_like(pivoted)
        coef[self.perm] = pivoted
        return coef / self.scale


def _factorize(A: np.ndarray, rank_rtol: float) -> _Factorization:
    scale = np.max(np.abs(A), axis=0)
    zero = np.flatnonzero(scale == 0)
    if zero.size:
        raise RankDeficientError(
            f"basis column {zero[0]} vanishes identically", order=int(zero[0])
        )
    Q, R, perm = qr(A / scale, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(R))
    small = np.flatnonzero(pivots <= rank_rtol * pivots[0])
    if small.size:
        column = int(perm[small[0]])
        raise RankDeficientError(
            f"basis traces are numerically dependent at column {column}",
            order=column,
        )
    return _Factorization(Q, R, perm, scale)


def least_squares(
    A: np.ndarray, y: np.ndarray, rank_rtol: float = RANK_RTOL
) -> np.ndarray:
    """
    Discrete L² fit min ||A c - y||.

    Args:
        A: Design matrix, one column per basis function.
        y: Samples to fit (real or complex).
        rank_rtol: Relative pivot threshold for rank deficiency.

    Returns:
        Coefficient vector c.
    """
    factors = _factorize(A, rank_rtol)
    return factors.coefficients(factors.Q.conj().T @ y)


@dataclass
class RemezResult:
    coefficients: np.ndarray
    error: float
    iterations: int
    converged: bool


def _initial_reference(size: int, count: int) -> np.ndarray:
    """Indices of Chebyshev extreme points among `size` ordered samples."""
    j = np.arange(count)
    points = (1.0 - np.cos(np.pi * j / (count - 1))) / 2.0
    ref = np.unique(np.round(points * (size - 1)).astype(int))
    if ref.size < count:
        ref = np.round(np.linspace(0, size - 1, count)).astype(int)
    return ref


def _alternation_reference(err: np.ndarray, count: int) -> Optional[np.ndarray]:
    """
    Extrema of alternating sign of a residual, thinned to `count` points.

    Returns None when the residual alternates fewer than `count` times.
    """
    signs = np.sign(err)
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        return None
    breaks = np.flatnonzero(np.diff(signs[nonzero]) != 0) + 1
    ref = [int(run[np.argmax(np.abs(err[run]))]) for run in np.split(nonzero, breaks)]
    while len(ref) > count:
        size = np.abs(err[ref])
        i = int(np.argmin(size))
        if i == 0 or i == len(ref) - 1:
            del ref[i]
        elif len(ref) == count + 1:
            del ref[0 if size[0] < size[-1] else -1]
        else:
            # dropping a pair keeps the signs alternating
            j = i - 1 if size[i - 1] < size[i + 1] else i + 1
            for index in sorted((i, j), reverse=True):
                del ref[index]
    if len(ref) < count:
        return None
    return np.asarray(ref)


def _exchange(ref: np.ndarray, err: np.ndarray, k: int) -> np.ndarray:
    """Single-point exchange keeping the sign alternation of the reference."""
    sign = np.sign(err[k])
    pos = int(np.searchsorted(ref, k))
    ref = list(ref)
    if pos == 0:
        if np.sign(err[ref[0]]) == sign:
            ref[0] = k
        else:
            ref = [k] + ref[:-1]
    elif pos == len(ref):
        if np.sign(err[ref[-1]]) == sign:
            ref[-1] = k
        else:
            ref = ref[1:] + [k]
    elif np.sign(err[ref[pos - 1]]) == sign:
        ref[pos - 1] = k
    else:
        ref[pos] = k
    return np.asarray(ref)


def remez(
    A: np.ndarray,
    y: np.ndarray,
    max_iter: int = 200,
    defect_tol: float = 1e-3,
    rank_rtol: float = RANK_RTOL,
    start: str = "least_squares",
) -> RemezResult:
    """
    Discrete minimax fit by the simple (one-point) exchange algorithm.

    Rows of A and y must be ordered by the abscissa of the candidate set.
    The least-squares solution seeds the iteration and counts as an
    iterate, so the result is never worse than it in the max norm.

    Args:
        A: Real design matrix on the candidate set.
        y: Real samples on the candidate set.
        max_iter: Iteration cap.
        defect_tol: Stop when max|err| - |E| <= defect_tol * max|err|.
        rank_rtol: Relative pivot threshold for rank deficiency.
        start: 'least_squares' takes the first reference from the extrema
            of the least-squares residual; 'chebyshev' uses Chebyshev
            points of the candidate set.

    Returns:
        RemezResult with the best coefficients seen.
    """
    if start not in ("least_squares", "chebyshev"):
        raise ValueError(f"unknown reference start {start!r}")
    if np.iscomplexobj(A) or np.iscomplexobj(y):
        raise FitError("the exchange algorithm needs real data")
    factors = _factorize(A, rank_rtol)
    Q = factors.Q
    rows, cols = Q.shape
    if rows <= cols + 1:
        raise FitError("need more candidate points than basis functions")

    signs = (-1.0) ** np.arange(cols + 1)
    # below this the residual is rounding noise
    noise = NOISE_FACTOR * np.finfo(float).eps * max(float(np.max(np.abs(y))), 1.0)
    ref = None
    best: Tuple[float, Optional[np.ndarray]] = (np.inf, None)
    if start == "least_squares":
        z = Q.T @ y
        err = y - Q @ z
        best = (float(np.max(np.abs(err))), z)
        ref = _alternation_reference(err, cols + 1)
    if ref is None:
        ref = _initial_reference(rows, cols + 1)
    converged = best[0] <= noise
    iteration = 0

    while not converged and iteration < max_iter:
        iteration += 1
        system = np.column_stack([Q[ref], signs])
        try:
            solution = np.linalg.solve(system, y[ref])
        except np.linalg.LinAlgError:
            logger.warning("singular reference system at iteration %d", iteration)
            break
        z, level = solution[:cols], solution[cols]
        err = y - Q @ z
        k = int(np.argmax(np.abs(err)))
        max_err = float(np.abs(err[k]))
        if max_err < best[0]:
            best = (max_err, z)
        if max_err - abs(level) <= defect_tol * max_err or k in ref or max_err <= noise:
            converged = True
            break
        ref = _exchange(ref, err, k)

    if best[1] is None:
        raise FitError("exchange algorithm produced no iterate")
    logger.debug(
        "remez: %d iterations, error %.3e, converged=%s", iteration, best[0], converged
    )
    return RemezResult(factors.coefficients(best[1]), best[0], iteration, converged)
