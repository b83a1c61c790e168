"""
Dirichlet eigenvalues of -u'' + q u = ω² u on [0, b].

The transmuted sine s_N(x; ω) = sin ωx + ∫₋ₓˣ K_N(x,t) sin ωt dt reduces,
by parity, to sin ωx plus a finite combination of the moments
∫₋ₓˣ tᵏ sin ωt dt with odd k. The eigenvalues are the squared positive
zeros of ω ↦ s_N(b; ω).
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import CubicHermiteSpline

from .config import get_settings
from .errors import SpectralError
from .grid import GridFunction, potential_of
from .kernels import KernelApproximation
from .spps import solve_cauchy

logger = logging.getLogger(__name__)

BACKWARD_EXTRA = 60
WINDOW_CELLS = 2048
MAX_BISECTIONS = 200


# Moments


def _exponential_moments(k_max: int, y: np.ndarray) -> np.ndarray:
    """
    E_k(y) = ∫₀¹ sᵏ e^{iys} ds for k = 0..k_max.

    The forward recurrence E_k = (e^{iy} - k E_{k-1})/(iy) is used where
    k <= |y|, the backward one E_{k-1} = (e^{iy} - iy E_k)/k elsewhere.
    """
    y = np.asarray(y, dtype=float)
    table = np.empty((k_max + 1,) + y.shape, dtype=complex)
    expo = np.exp(1j * y)
    half = y / 2.0
    # (e^{iy} - 1)/(iy) without cancellation near y = 0
    sinc_half = np.sinc(half / np.pi)
    first = np.sinc(y / np.pi) + 1j * half * sinc_half * sinc_half
    table[0] = first
    if k_max == 0:
        return table

    with np.errstate(all="ignore"):
        forward = np.empty_like(table)
        forward[0] = first
        for k in range(1, k_max + 1):
            forward[k] = (expo - k * forward[k - 1]) / (1j * y)

        top = k_max + BACKWARD_EXTRA
        current = expo / (top + 1) * (1.0 - 1j * y / (top + 2))
        backward = np.empty_like(table)
        for k in range(top, 0, -1):
            previous = (expo - 1j * y * current) / k
            if k - 1 <= k_max:
                backward[k - 1] = previous
            current = previous

    k_index = np.arange(k_max + 1).reshape((-1,) + (1,) * y.ndim)
    use_forward = k_index <= np.abs(y)
    table[1:] = np.where(use_forward, forward, backward)[1:]
    return table


def _scaled_powers(k_max: int, x: np.ndarray) -> np.ndarray:
    """2 x^{k+1} for k = 0..k_max."""
    powers = np.empty((k_max + 1,) + x.shape)
    powers[0] = 2.0 * x
    for k in range(1, k_max + 1):
        powers[k] = powers[k - 1] * x
    return powers


def sine_moments(k_max: int, omega: Any, x: Any) -> np.ndarray:
    """
    ∫₋ₓˣ tᵏ sin(ωt) dt for k = 0..k_max.

    Args:
        k_max: Highest power.
        omega: Frequencies (broadcast against x).
        x: Half-widths of the symmetric interval.

    Returns:
        Array of shape (k_max + 1,) + broadcast shape; even rows are zero.
    """
    omega, x = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(x, dtype=float))
    table = _exponential_moments(k_max, omega * x)
    moments = _scaled_powers(k_max, x) * table.imag
    moments[0::2] = 0.0
    return moments


def cosine_moments(k_max: int, omega: Any, x: Any) -> np.ndarray:
    """∫₋ₓˣ tᵏ cos(ωt) dt for k = 0..k_max; odd rows are zero."""
    omega, x = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(x, dtype=float))
    table = _exponential_moments(k_max, omega * x)
    moments = _scaled_powers(k_max, x) * table.real
    moments[1::2] = 0.0
    return moments


def sine_moment(k: int, omega: Any, x: Any) -> Any:
    """∫₋ₓˣ tᵏ sin(ωt) dt."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    return sine_moments(k, omega, x)[k][()]


# Transmuted sine


def _odd_weights(kernel: KernelApproximation, x: Any) -> np.ndarray:
    """w_k(x) = Σₙ bₙ C(n,k) φ_{n-k}(x) for k = 0..N (zero at even k)."""
    x = np.asarray(x, dtype=float)
    N = kernel.N
    phis = [kernel.family.phi[k](x) for k in range(N + 1)]
    weights = np.zeros((N + 1,) + x.shape, dtype=complex)
    for n in range(1, N + 1):
        for k in range(1, n + 1, 2):
            weights[k] = weights[k] + kernel.b[n - 1] * math.comb(n, k) * phis[n - k]
    return weights


def s_N(kernel: KernelApproximation, x: Any, omega: Any) -> Any:
    """
    Approximate transmuted sine s_N(x; ω).

    Args:
        kernel: Kernel approximation of order N.
        x: Points of [0, b].
        omega: Frequencies, broadcast against x.

    Returns:
        Complex values of sin ωx + Σ_{odd k} w_k(x) ∫₋ₓˣ tᵏ sin ωt dt.
    """
    x, omega = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(omega, dtype=float))
    weights = _odd_weights(kernel, x)
    moments = sine_moments(kernel.N, omega, x)
    return (np.sin(omega * x) + np.sum(weights * moments, axis=0))[()]


def eigenfunction(kernel: KernelApproximation, omega: float, x: Any) -> Any:
    """s_N(·; ω) on an array of points, the eigenfunction for an eigenvalue ω²."""
    return s_N(kernel, x, omega)


class CharacteristicFunction:
    """
    ω ↦ s_N(b; ω) with its ω-derivative, vectorized over ω.

    The weights w_k(b) are computed once; each evaluation only needs the
    moment table at the requested frequencies.
    """

    def __init__(self, kernel: KernelApproximation, b: float, imag_tol: float = 1e-10):
        weights = _odd_weights(kernel, b)
        scale = max(1.0, float(np.max(np.abs(weights))))
        if np.max(np.abs(weights.imag)) > imag_tol * scale:
            raise SpectralError("characteristic function is not real for this kernel")
        self.weights = weights.real
        self.b = float(b)
        self.N = kernel.N

    def _table(self, omega: np.ndarray) -> np.ndarray:
        return _exponential_moments(self.N + 1, omega * self.b)

    def __call__(self, omega: Any) -> Any:
        omega = np.asarray(omega, dtype=float)
        table = self._table(omega)[: self.N + 1]
        powers = _scaled_powers(self.N, np.full(omega.shape, self.b))
        moments = powers * table.imag
        weights = self.weights.reshape((-1,) + (1,) * omega.ndim)
        return (np.sin(omega * self.b) + np.sum(weights[1::2] * moments[1::2], axis=0))[()]

    def derivative(self, omega: Any) -> Any:
        """d/dω s_N(b; ω) = b cos ωb + Σ w_k ∫₋ᵦᵇ t^{k+1} cos ωt dt."""
        omega = np.asarray(omega, dtype=float)
        table = self._table(omega)
        powers = _scaled_powers(self.N + 1, np.full(omega.shape, self.b))
        cos_moments = powers * table.real
        weights = self.weights.reshape((-1,) + (1,) * omega.ndim)
        total = self.b * np.cos(omega * self.b)
        for k in range(1, self.N + 1, 2):
            total = total + weights[k] * cos_moments[k + 1]
        return total[()]


# Eigenvalue search


@dataclass
class SearchOptions:
    """
    Root search settings; None means the default derived from b and count.

    scan_step defaults to π/(4b), omega_max to (count + 1)π/b + √max|q| + 1.
    """
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    scan_step: Optional[float] = None
    root_tol: float = 1e-13
    max_rescan_depth: int = 4
    threads: Optional[int] = None


@dataclass
class SpectralProblem:
    """
    Dirichlet problem on [0, b] for the potential q extended to [-b, b].

    Args:
        q: Extended potential on [-b, b].
        b: Right end of the interval.
        kernel: Kernel approximation built from a particular solution for q.
        search: Root search options.
        potential_rtol: Allowed mismatch between q and f''/f.
    """
    q: GridFunction
    b: float
    kernel: KernelApproximation
    search: SearchOptions = field(default_factory=SearchOptions)
    potential_rtol: float = 1e-3

    def __post_init__(self):
        if self.b <= 0:
            raise SpectralError(f"b must be positive, got {self.b}")
        family = self.kernel.family
        if not np.isclose(family.b, self.q.b) or self.b > self.q.b * (1 + 1e-12):
            raise SpectralError("kernel, potential and interval do not share [-b, b]")
        if family.n_points == self.q.n_points:
            q_f = potential_of(family.f).values[3:-3]
            q = self.q.values[3:-3]
            mismatch = float(np.max(np.abs(q_f - q)))
            scale = max(1.0, float(np.max(np.abs(q))))
            if mismatch > self.potential_rtol * scale:
                raise SpectralError(
                    f"f''/f differs from q by {mismatch:.3e}; the kernel was built for "
                    "another potential"
                )

    def resolved_search(self, count: int) -> SearchOptions:
        step = self.search.scan_step or math.pi / (4.0 * self.b)
        omega_min = self.search.omega_min
        if omega_min is None:
            omega_min = step / 1000.0
        omega_max = self.search.omega_max
        if omega_max is None:
            omega_max = (count + 1) * math.pi / self.b + math.sqrt(self.q.max_abs()) + 1.0
        threads = self.search.threads or get_settings().threads
        return SearchOptions(
            omega_min=omega_min,
            omega_max=omega_max,
            scan_step=step,
            root_tol=self.search.root_tol,
            max_rescan_depth=self.search.max_rescan_depth,
            threads=threads,
        )


@dataclass
class EigenvalueResult:
    index: int
    omega: float
    omega_sq: float
    char_value_residual: float
    bracket: Tuple[float, float]
    rescanned: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["bracket"] = list(self.bracket)
        return data


class EigenvalueList(list):
    """List of EigenvalueResult; complete is False when the scan ran out."""

    def __init__(self, results: Sequence[EigenvalueResult] = (), complete: bool = True):
        super().__init__(results)
        self.complete = complete

    @property
    def omega_sq(self) -> np.ndarray:
        return np.array([r.omega_sq for r in self])


@dataclass
class _Bracket:
    lo: float
    hi: float
    rescanned: bool = False


def _sign_brackets(omegas, values, start, rescanned=False) -> List[_Bracket]:
    found = []
    signs = np.sign(values)
    for i in range(start, values.size - 1):
        if signs[i] == 0:
            found.append(_Bracket(omegas[i], omegas[i], rescanned))
        elif signs[i] * signs[i + 1] < 0:
            found.append(_Bracket(omegas[i], omegas[i + 1], rescanned))
    return found


def _dips(values: np.ndarray, start: int) -> List[int]:
    """Centers of same-sign local minima of |s|, candidates for close root pairs."""
    centers = []
    magnitude = np.abs(values)
    signs = np.sign(values)
    for i in range(max(start, 1), values.size - 1):
        if (
            signs[i - 1] == signs[i] == signs[i + 1] != 0
            and magnitude[i] < magnitude[i - 1]
            and magnitude[i] < magnitude[i + 1]
        ):
            centers.append(i)
    return centers


def _rescan(char, lo, hi, step, depth, max_depth) -> List[_Bracket]:
    step /= 2.0
    omegas = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    values = np.asarray(char(omegas))
    found = _sign_brackets(omegas, values, 0, rescanned=True)
    if found or depth >= max_depth:
        return found
    for i in _dips(values, 1):
        found.extend(_rescan(char, omegas[i - 1], omegas[i + 1], step, depth + 1, max_depth))
    return found


def _scan(char: CharacteristicFunction, count: int, options: SearchOptions) -> Tuple[List[_Bracket], bool]:
    step = options.scan_step
    total_cells = int(math.ceil((options.omega_max - options.omega_min) / step))
    brackets: List[_Bracket] = []
    tail_omega = np.empty(0)
    tail_value = np.empty(0)
    window = 0
    threads = max(1, options.threads or 1)

    def evaluate(index):
        first = index * WINDOW_CELLS
        last = min(total_cells, first + WINDOW_CELLS)
        omegas = options.omega_min + step * np.arange(first, last + 1)
        return omegas, np.asarray(char(omegas))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        while window * WINDOW_CELLS < total_cells:
            indices = [
                w for w in range(window, window + threads) if w * WINDOW_CELLS < total_cells
            ]
            window += len(indices)
            for omegas, values in pool.map(evaluate, indices):
                if tail_omega.size:
                    omegas = np.concatenate([tail_omega, omegas[1:]])
                    values = np.concatenate([tail_value, values[1:]])
                    start = tail_omega.size - 1
                else:
                    start = 0
                found = _sign_brackets(omegas, values, start)
                for i in _dips(values, start):
                    extra = _rescan(
                        char, omegas[i - 1], omegas[i + 1], step, 1, options.max_rescan_depth
                    )
                    if extra:
                        logger.warning(
                            "close roots near omega=%.6g resolved by rescanning", omegas[i]
                        )
                    found.extend(extra)
                brackets.extend(sorted(found, key=lambda br: br.lo))
                tail_omega, tail_value = omegas[-2:], values[-2:]
            if len(brackets) >= count:
                return brackets[:count], True
    return brackets, False


def _refine(char: CharacteristicFunction, brackets: List[_Bracket], root_tol: float) -> np.ndarray:
    """Vectorized bisection on all brackets followed by one Newton step each."""
    lo = np.array([br.lo for br in brackets], dtype=float)
    hi = np.array([br.hi for br in brackets], dtype=float)
    f_lo = np.asarray(char(lo), dtype=float).reshape(lo.shape)
    for _ in range(MAX_BISECTIONS):
        active = (hi - lo) > root_tol * np.abs(hi)
        if not np.any(active):
            break
        mid = (lo + hi) / 2.0
        f_mid = np.asarray(char(mid), dtype=float).reshape(mid.shape)
        exact = active & (f_mid == 0)
        left = active & ~exact & (np.sign(f_mid) == np.sign(f_lo))
        right = active & ~exact & ~left
        lo = np.where(left | exact, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(right | exact, mid, hi)

    mid = (lo + hi) / 2.0
    value = np.asarray(char(mid), dtype=float).reshape(mid.shape)
    slope = np.asarray(char.derivative(mid), dtype=float).reshape(mid.shape)
    with np.errstate(all="ignore"):
        newton = mid - value / slope
    width = np.maximum(hi - lo, root_tol * np.abs(mid))
    ok = np.isfinite(newton) & (np.abs(newton - mid) <= width)
    return np.where(ok, newton, mid)


def find_eigenvalues(problem: SpectralProblem, count: int) -> EigenvalueList:
    """
    The first `count` Dirichlet eigenvalues ω² of the problem.

    Args:
        problem: Potential, interval and kernel approximation.
        count: Number of eigenvalues.

    Returns:
        EigenvalueList indexed from 1; complete is False when omega_max was
        reached before `count` roots were found.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    options = problem.resolved_search(count)
    char = CharacteristicFunction(problem.kernel, problem.b)
    brackets, complete = _scan(char, count, options)
    if not complete:
        logger.warning(
            "found %d of %d roots below omega_max=%g", len(brackets), count, options.omega_max
        )
    if not brackets:
        return EigenvalueList([], complete=False)

    omegas = _refine(char, brackets, options.root_tol)
    residuals = np.abs(np.asarray(char(omegas), dtype=float).reshape(omegas.shape))
    results = [
        EigenvalueResult(
            index=i + 1,
            omega=float(omega),
            omega_sq=float(omega * omega),
            char_value_residual=float(residual),
            bracket=(float(br.lo), float(br.hi)),
            rescanned=br.rescanned,
        )
        for i, (omega, residual, br) in enumerate(zip(omegas, residuals, brackets))
    ]
    logger.debug("found %d eigenvalues", len(results))
    return EigenvalueList(results, complete=complete)


# Potentials and oracles


def extend_potential(
    q_half: Any, b: Optional[float] = None, mode: str = "even", left: Optional[Any] = None
) -> GridFunction:
    """
    Extend samples of q on [0, b] to the symmetric grid over [-b, b].

    Args:
        q_half: Samples on the uniform grid of n points over [0, b], or a
            GridFunction whose nodes with x >= 0 supply them.
        b: Right end; taken from q_half when it is a GridFunction.
        mode: 'even' (q(-x) = q(x)), 'odd_shifted' (q(-x) = 2q(0) - q(x))
            or 'user'.
        left: For mode 'user', the n - 1 samples on [-b, 0) in increasing x.

    Returns:
        GridFunction with 2n - 1 points.
    """
    if isinstance(q_half, GridFunction):
        if b is not None and not np.isclose(b, q_half.b):
            raise ValueError(f"b={b} does not match the grid over [-{q_half.b}, {q_half.b}]")
        if q_half.n_points % 2 == 0:
            raise ValueError("x = 0 must be a node of the grid")
        b = q_half.b
        middle = q_half.n_points // 2
        right = q_half.values[middle:]
    else:
        if b is None:
            raise ValueError("b is required for raw samples")
        right = np.asarray(q_half)
    if right.ndim != 1 or right.size < 2:
        raise ValueError("need at least two samples on [0, b]")
    if mode == "even":
        mirrored = right[:0:-1]
    elif mode == "odd_shifted":
        mirrored = 2.0 * right[0] - right[:0:-1]
    elif mode == "user":
        if left is None:
            raise ValueError("mode 'user' needs the samples on [-b, 0)")
        mirrored = np.asarray(left)
        if mirrored.shape != (right.size - 1,):
            raise ValueError(f"expected {right.size - 1} samples on [-b, 0)")
    else:
        raise ValueError(f"unknown extension mode {mode!r}")
    return GridFunction(b, np.concatenate([mirrored, right]))


def sine_solution_ivp(q: GridFunction, omega: float, x: Any) -> Any:
    """
    Solution of -u'' + q u = ω² u with u(0) = 0, u'(0) = ω by direct
    integration, interpolated with its exact slopes.
    """
    values, slopes = solve_cauchy(q, 0.0, omega, shift=-omega * omega)
    interpolant = CubicHermiteSpline(q.nodes, values, slopes)
    return interpolant(x)


# Tables


def eigenvalue_frame(
    results: Sequence[EigenvalueResult], reference: Optional[Dict[int, float]] = None
) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "n": [r.index for r in results],
            "omega_sq": [r.omega_sq for r in results],
            "residual": [r.char_value_residual for r in results],
        }
    )
    if reference:
        frame["reference"] = frame["n"].map(reference)
        frame["abs_error"] = (frame["omega_sq"] - frame["reference"]).abs()
    return frame


def read_reference(path: str) -> Dict[int, float]:
    """Reference eigenvalues from a CSV with columns n, omega_sq."""
    frame = pd.read_csv(path)
    missing = [col for col in ("n", "omega_sq") if col not in frame.columns]
    if missing:
        raise SpectralError(f"reference file is missing columns {missing}")
    return dict(zip(frame["n"].astype(int), frame["omega_sq"].astype(float)))


def write_eigenvalue_table(
    results: Sequence[EigenvalueResult],
    path: str,
    reference: Optional[Union[str, Dict[int, float]]] = None,
) -> pd.DataFrame:
    """Write the table as CSV, or JSON records when path ends in .json."""
    if isinstance(reference, str):
        reference = read_reference(reference)
    frame = eigenvalue_frame(results, reference)
    if path.endswith(".json"):
        records = json.loads(frame.to_json(orient="records", double_precision=15))
        with open(path, "w") as fh:
            json.dump(records, fh, indent=2)
    else:
        frame.to_csv(path, index=False, float_format="%.15g")
    return frame

