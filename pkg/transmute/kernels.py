"""
Transmutation kernels: evaluable approximations and their transformations.

A kernel is anything callable as K(x, t) on the triangle |t| <= |x| <= b
with derivatives dx and dt. KernelApproximation is the truncated expansion
in generalized wave polynomials, built either from the Taylor coefficients
at the origin or by fitting the Goursat data on the characteristics.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad_vec

from .bessel import i0, i1, i1_over_r, i2_over_r2
from .config import get_settings
from .errors import FitError, JetError
from .fitting import least_squares, remez
from .grid import BasisFamily, GridFunction, Number, indefinite_integral
from .taylor import (
    PotentialJet,
    expansion_coefficients,
    f_jet_from_potential,
    inverse_function_jet,
    potential_jet_from_f,
)
from .utils import complex_pair, from_complex_pair

logger = logging.getLogger(__name__)

FD_STEP = 1e-4
GAUSS_NODES = 32
TRIANGLE_TOL = 1e-12


def _gauss(n: int = GAUSS_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights mapped to [0, 1]."""
    nodes, weights = leggauss(n)
    return (nodes + 1.0) / 2.0, weights / 2.0


def _broadcast(x: Any, t: Any) -> Tuple[np.ndarray, np.ndarray]:
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))


class Kernel:
    """
    Base class of evaluable kernels.

    Subclasses implement __call__; dx and dt default to fourth-order central
    differences with step FD_STEP.
    """

    fd_step = FD_STEP

    def __call__(self, x: Any, t: Any) -> Any:
        raise NotImplementedError

    def dx(self, x: Any, t: Any) -> Any:
        x, t = _broadcast(x, t)
        step = self.fd_step
        return (
            -self(x + 2 * step, t)
            + 8 * self(x + step, t)
            - 8 * self(x - step, t)
            + self(x - 2 * step, t)
        ) / (12 * step)

    def dt(self, x: Any, t: Any) -> Any:
        x, t = _broadcast(x, t)
        step = self.fd_step
        return (
            -self(x, t + 2 * step)
            + 8 * self(x, t + step)
            - 8 * self(x, t - step)
            + self(x, t - 2 * step)
        ) / (12 * step)


class FunctionKernel(Kernel):
    """Kernel given by a vectorized callable, with optional derivatives."""

    def __init__(
        self,
        func: Callable[[np.ndarray, np.ndarray], Any],
        dx: Optional[Callable] = None,
        dt: Optional[Callable] = None,
        name: str = "function",
    ):
        self.func = func
        self._dx = dx
        self._dt = dt
        self.name = name

    def __call__(self, x, t):
        x, t = _broadcast(x, t)
        return (np.asarray(self.func(x, t)) * np.ones(x.shape))[()]

    def dx(self, x, t):
        if self._dx is None:
            return super().dx(x, t)
        x, t = _broadcast(x, t)
        return (np.asarray(self._dx(x, t)) * np.ones(x.shape))[()]

    def dt(self, x, t):
        if self._dt is None:
            return super().dt(x, t)
        x, t = _broadcast(x, t)
        return (np.asarray(self._dt(x, t)) * np.ones(x.shape))[()]

    def __repr__(self) -> str:
        return f"FunctionKernel({self.name})"


def zero_kernel() -> FunctionKernel:
    zero = lambda x, t: np.zeros(np.shape(x))  # noqa: E731
    return FunctionKernel(zero, zero, zero, name="zero")


class KernelApproximation(Kernel):
    """
    K(x,t) = c₀u₀ + Σₙ (cₙ u_{2n-1} + bₙ u_{2n}) over a basis family.

    Args:
        family: Basis family of f (order >= N).
        N: Truncation order.
        c: Coefficients c₀..c_N.
        b: Coefficients b₁..b_N.
        method: How the coefficients were obtained.
        eps1: Trace error of the g₁ fit, if known.
        eps2: Trace error of the g₂ fit, if known.
        fallback: True when least-squares coefficients replaced the Remez
            fit of either part.
    """

    def __init__(
        self,
        family: BasisFamily,
        N: int,
        c: Sequence[Number],
        b: Sequence[Number],
        method: str = "taylor",
        eps1: Optional[float] = None,
        eps2: Optional[float] = None,
        fallback: bool = False,
    ):
        if len(c) != N + 1 or len(b) != N:
            raise ValueError(f"expected {N + 1} c and {N} b coefficients")
        if family.order < N:
            raise FitError(f"order {N} needs a family of order {N}, have {family.order}")
        self.family = family
        self.N = N
        self.c = np.asarray(c, dtype=complex)
        self.b = np.asarray(b, dtype=complex)
        self.method = method
        self.eps1 = eps1
        self.eps2 = eps2
        self.fallback = fallback

    @property
    def h(self) -> Number:
        return self.family.h

    def _coefficient(self, n: int, k: int) -> complex:
        # even powers of t come from u_{2n-1}, odd ones from u_{2n}
        if n == 0:
            return self.c[0]
        return self.c[n] if k % 2 == 0 else self.b[n - 1]

    def _combine(self, values: List[np.ndarray], t: np.ndarray, derivative_in_t: bool):
        total = np.zeros(t.shape, dtype=complex)
        for n in range(self.N + 1):
            for k in range(n + 1):
                if derivative_in_t:
                    if k == 0:
                        continue
                    power = k * t ** (k - 1)
                else:
                    power = t ** k
                total = total + self._coefficient(n, k) * comb(n, k) * values[n - k] * power
        return total

    def __call__(self, x, t):
        x, t = _broadcast(x, t)
        phis = [self.family.phi[k](x) for k in range(self.N + 1)]
        return self._combine(phis, t, False)[()]

    def dt(self, x, t):
        x, t = _broadcast(x, t)
        phis = [self.family.phi[k](x) for k in range(self.N + 1)]
        return self._combine(phis, t, True)[()]

    def dx(self, x, t):
        x, t = _broadcast(x, t)
        dphis = [self.family.dphi(k, x) for k in range(self.N + 1)]
        return self._combine(dphis, t, False)[()]

    def trace_values(self) -> Tuple[np.ndarray, np.ndarray]:
        """½(K(x,x) ± K(x,-x)) at the grid nodes."""
        x = self.family.f.nodes
        plus = self(x, x)
        minus = self(x, -x)
        return (plus + minus) / 2, (plus - minus) / 2

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "method": self.method,
            "c": [complex_pair(v) for v in self.c],
            "b": [complex_pair(v) for v in self.b],
            "eps1": self.eps1,
            "eps2": self.eps2,
            "fallback": self.fallback,
            "family": self.family.fingerprint(),
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any], family: BasisFamily) -> "KernelApproximation":
        stored = payload.get("family", {})
        if stored and (
            int(stored["order"]) > family.order
            or not np.isclose(float(stored["b"]), family.b)
        ):
            raise FitError("serialized kernel does not match the supplied basis family")
        c = [from_complex_pair(v) for v in payload["c"]]
        b = [from_complex_pair(v) for v in payload["b"]]
        return cls(
            family,
            int(payload["N"]),
            c,
            b,
            method=payload.get("method", "taylor"),
            eps1=payload.get("eps1"),
            eps2=payload.get("eps2"),
            fallback=bool(payload.get("fallback", False)),
        )

    def __repr__(self) -> str:
        return f"KernelApproximation(N={self.N}, method={self.method!r})"


# Taylor method


def inverse_jet(jet_f: PotentialJet, N: int) -> PotentialJet:
    """Jet of q_{1/f} (with h -> -h) from the jet of q_f."""
    f_coeffs = f_jet_from_potential(jet_f, N + 1)
    return potential_jet_from_f(inverse_function_jet(f_coeffs))


def kernel_from_taylor(
    family: BasisFamily,
    jet_f: PotentialJet,
    N: int,
    jet_inv: Optional[PotentialJet] = None,
) -> KernelApproximation:
    """
    Kernel approximation from the exact Taylor coefficients at the origin.

    Args:
        family: Basis family of f.
        jet_f: h = f'(0) and q_f derivatives up to order N - 1.
        N: Truncation order.
        jet_inv: Jet of q_{1/f}; reconstructed from jet_f when omitted.

    Returns:
        KernelApproximation with method 'taylor'.
    """
    if len(jet_f.derivs) < N:
        raise JetError(f"order {N} needs q_f derivatives up to order {N - 1}")
    if jet_inv is None:
        jet_inv = inverse_jet(jet_f, N)
    c, b = expansion_coefficients(jet_f, jet_inv, N)
    logger.debug("taylor kernel of order %d", N)
    return KernelApproximation(
        family, N, [complex(v) for v in c], [complex(v) for v in b], method="taylor"
    )


# Goursat data fitting


def goursat_targets(q: GridFunction, h: Number) -> Tuple[GridFunction, GridFunction]:
    """g₁ = h/2 + ¼∫₀ˣq and g₂ = ¼∫₀ˣq."""
    quarter = indefinite_integral(q) * 0.25
    return quarter + h / 2.0, quarter


def _phi_values(family: BasisFamily, N: int, x: np.ndarray, on_grid: bool) -> List[np.ndarray]:
    if on_grid:
        return [family.phi[k].values for k in range(N + 1)]
    return [family.phi[k](x) for k in range(N + 1)]


def trace_matrices(
    family: BasisFamily, N: int, x: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Basis traces on the diagonal t = x.

    Returns:
        (A1, A2): columns u₀, u₁, u₃, …, u_{2N-1} and u₂, u₄, …, u_{2N}.
    """
    on_grid = x is None
    if on_grid:
        x = family.f.nodes
    phis = _phi_values(family, N, x, on_grid)
    A1 = [phis[0]]
    A2 = []
    for n in range(1, N + 1):
        even = sum(comb(n, k) * phis[n - k] * x ** k for k in range(0, n + 1, 2))
        odd = sum(comb(n, k) * phis[n - k] * x ** k for k in range(1, n + 1, 2))
        A1.append(even)
        A2.append(odd)
    A2_matrix = np.column_stack(A2) if A2 else np.zeros((x.size, 0))
    return np.column_stack(A1), A2_matrix


def _remez_fit(A: np.ndarray, y: np.ndarray, **options):
    """Remez on real data; complex targets are fitted part by part."""
    if np.iscomplexobj(A) and np.any(np.imag(A) != 0):
        raise FitError("complex basis traces")
    A = np.real(A)
    if np.iscomplexobj(y) and np.any(np.imag(y) != 0):
        real = remez(A, np.real(y), **options)
        imag = remez(A, np.imag(y), **options)
        return real.coefficients + 1j * imag.coefficients, real.converged and imag.converged
    result = remez(A, np.real(y), **options)
    return result.coefficients, result.converged


def fit_goursat(
    family: BasisFamily,
    g1: GridFunction,
    g2: GridFunction,
    N: int,
    method: str = "least_squares",
    candidate_factor: int = 4,
    **options,
) -> KernelApproximation:
    """
    Fit the Goursat data g₁, g₂ by the traces of the generalized wave
    polynomials.

    Args:
        family: Basis family of f (order >= N).
        g1: Target for ½(K(x,x) + K(x,-x)).
        g2: Target for ½(K(x,x) - K(x,-x)).
        N: Truncation order.
        method: 'least_squares' or 'remez'.
        candidate_factor: The Remez candidate set has
            candidate_factor * (n_points - 1) + 1 points and contains the grid.
        **options: Passed on to the Remez iteration (max_iter, defect_tol).

    Returns:
        KernelApproximation carrying the grid trace errors eps1 and eps2.
    """
    if method not in ("least_squares", "remez"):
        raise ValueError(f"unknown fitting method {method!r}")
    if family.order < N:
        raise FitError(f"order {N} needs a family of order {N}, have {family.order}")

    A1, A2 = trace_matrices(family, N)
    c = least_squares(A1, g1.values)
    b = least_squares(A2, g2.values) if N else np.zeros(0)
    fallback = False

    if method == "remez":
        n_candidates = candidate_factor * (family.n_points - 1) + 1
        x_dense = np.linspace(-family.b, family.b, n_candidates)
        D1, D2 = trace_matrices(family, N, x_dense)
        try:
            remez_c, ok1 = _remez_fit(D1, g1(x_dense), **options)
            remez_b, ok2 = (
                _remez_fit(D2, g2(x_dense), **options) if N else (np.zeros(0), True)
            )
        except FitError as exc:
            logger.warning("exchange algorithm unavailable (%s); using least squares", exc)
            fallback = True
        else:
            if not (ok1 and ok2):
                logger.warning("Remez did not converge for N=%d; falling back to least squares", N)
                fallback = True
            else:
                # each part keeps whichever coefficients have the smaller grid residual
                c, used1 = _smaller_residual(A1, g1.values, remez_c, c)
                b, used2 = _smaller_residual(A2, g2.values, remez_b, b) if N else (b, True)
                fallback = not (used1 and used2)
                if fallback:
                    logger.debug("least squares has the smaller grid residual for N=%d", N)

    eps1 = float(np.max(np.abs(g1.values - A1 @ c)))
    eps2 = float(np.max(np.abs(g2.values - A2 @ b))) if N else float(np.max(np.abs(g2.values)))
    logger.debug("goursat fit N=%d: eps1=%.3e eps2=%.3e", N, eps1, eps2)
    return KernelApproximation(
        family,
        N,
        c,
        b,
        method=method,
        eps1=eps1,
        eps2=eps2,
        fallback=fallback,
    )


def _smaller_residual(A: np.ndarray, y: np.ndarray, preferred, other):
    """(coefficients, True) for `preferred` unless `other` fits y better on the grid."""
    if np.max(np.abs(y - A @ preferred)) <= np.max(np.abs(y - A @ other)):
        return preferred, True
    return other, False


def trace_errors(
    kernel: KernelApproximation, g1: GridFunction, g2: GridFunction
) -> Tuple[float, float]:
    """Grid max of the Goursat trace misfits (ε₁, ε₂)."""
    even, odd = kernel.trace_values()
    return (
        float(np.max(np.abs(even - g1.values))),
        float(np.max(np.abs(odd - g2.values))),
    )


# Kernel transformations


class DarbouxKernel(Kernel):
    """
    K_{1/F} from K_F:

    K_{1/F}(x,t) = -(1/F)∫₀ˣ F ∂ₜK_F(η,0)dη - ∫₀ᵗ ∂ₓK_F(x,ξ)dξ
                   + (F'/F)∫₀ᵗ K_F(x,ξ)dξ - F'(0)/(2F(x)).
    """

    def __init__(self, kernel: Kernel, family: BasisFamily, gauss_nodes: int = GAUSS_NODES):
        self.kernel = kernel
        self.family = family
        self.nodes, self.weights = _gauss(gauss_nodes)

    def _log_derivative(self, x):
        return self.family.df(x) / self.family.f(x)

    def __call__(self, x, t):
        x, t = _broadcast(x, t)
        f = self.family.f
        s = self.nodes
        w = self.weights

        eta = x[..., None] * s
        first = x * np.sum(w * f(eta) * self.kernel.dt(eta, np.zeros_like(eta)), axis=-1)
        xi = t[..., None] * s
        xx = np.broadcast_to(x[..., None], xi.shape)
        second = t * np.sum(w * self.kernel.dx(xx, xi), axis=-1)
        third = t * np.sum(w * self.kernel(xx, xi), axis=-1)

        fx = f(x)
        value = (
            -first / fx
            - second
            + self._log_derivative(x) * third
            - self.family.h / (2.0 * fx)
        )
        return value[()]

    def dt(self, x, t):
        x, t = _broadcast(x, t)
        return (-self.kernel.dx(x, t) + self._log_derivative(x) * self.kernel(x, t))[()]


def darboux_kernel(
    kernel: Kernel, family: BasisFamily, direction: str = "forward"
) -> DarbouxKernel:
    """
    Kernel of the Darboux-transformed potential.

    Args:
        kernel: K_f (forward) or K_{1/f} (backward).
        family: Basis family of f.
        direction: 'forward' maps K_f to K_{1/f}; 'backward' maps K_{1/f}
            back to K_f.
    """
    if direction == "forward":
        return DarbouxKernel(kernel, family)
    if direction == "backward":
        return DarbouxKernel(kernel, family.reciprocal())
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


class ShiftedKernel(Kernel):
    """K(x,t;h₂) obtained from K(x,t;h₁) for the same potential."""

    def __init__(self, kernel: Kernel, h1: Number, h2: Number, gauss_nodes: int = GAUSS_NODES):
        self.kernel = kernel
        self.half_shift = (h2 - h1) / 2.0
        self.nodes, self.weights = _gauss(gauss_nodes)

    def __call__(self, x, t):
        x, t = _broadcast(x, t)
        value = self.half_shift + np.asarray(self.kernel(x, t))
        if self.half_shift == 0:
            return value[()]
        s = t[..., None] + (x - t)[..., None] * self.nodes
        xx = np.broadcast_to(x[..., None], s.shape)
        odd = self.kernel(xx, s) - self.kernel(xx, -s)
        integral = (x - t) * np.sum(self.weights * odd, axis=-1)
        return (value + self.half_shift * integral)[()]


def change_parameter(kernel: Kernel, h1: Number, h2: Number) -> Kernel:
    """
    K(x,t;h₂) = (h₂-h₁)/2 + K(x,t;h₁) + ((h₂-h₁)/2)∫ₜˣ(K(x,s;h₁) - K(x,-s;h₁))ds.
    """
    if h1 == h2:
        return kernel
    return ShiftedKernel(kernel, h1, h2)


# Reference kernels


def _check_triangle(x: np.ndarray, t: np.ndarray) -> None:
    if np.any(np.abs(t) > np.abs(x) + TRIANGLE_TOL):
        raise ValueError("reference kernels are defined only for |t| <= |x|")


def _cosh_kernel(x, t):
    return 0.5 * (x + t) * i1_over_r(x * x - t * t)


def _sech_kernel(x, t):
    tanh = np.tanh(x)
    shape = x.shape
    xf = x.ravel()
    tf = t.ravel()

    def integrands(tau):
        s = tf * tau
        u = xf * xf - s * s
        g = i1_over_r(u)
        first = (xf + s) * g
        second = xf * (xf + s) * i2_over_r2(u) + g
        return np.concatenate([tf * first, tf * second])

    integral, _ = quad_vec(integrands, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    size = xf.size
    first = integral[:size].reshape(shape)
    second = integral[size:].reshape(shape)
    return 0.5 * (i1(x) - i0(x) * tanh + tanh * first - second)


def reference_kernel(name: str, x: Any, t: Any, check: bool = True) -> Any:
    """
    Closed-form kernels of the worked examples.

    Args:
        name: 'zero', 'model_f' (½), 'model_inv' ((t-1)/(2(x+1))), 'cosh'
            or 'sech'.
        x: Points with |t| <= |x|.
        t: Second variable.
        check: Reject points outside the triangle. The closed forms extend
            slightly beyond it, which finite differences near x = 0 rely on.
    """
    x, t = _broadcast(x, t)
    if check:
        _check_triangle(x, t)
    if name == "zero":
        value = np.zeros(x.shape)
    elif name == "model_f":
        value = np.full(x.shape, 0.5)
    elif name == "model_inv":
        value = (t - 1.0) / (2.0 * (x + 1.0))
    elif name == "cosh":
        value = _cosh_kernel(x, t)
    elif name == "sech":
        value = _sech_kernel(x, t) if x.size else np.zeros(x.shape)
    else:
        raise ValueError(f"unknown reference kernel {name!r}")
    return value[()]


def reference(name: str) -> FunctionKernel:
    """A reference kernel wrapped as an evaluable Kernel."""
    reference_kernel(name, 0.0, 0.0)
    return FunctionKernel(lambda x, t: reference_kernel(name, x, t, check=False), name=name)


# Mesh utilities and checks


def triangle_mesh(b: float, n: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Points of the n×n uniform mesh of [-b, b]² that satisfy |t| <= |x|."""
    axis = np.linspace(-b, b, n)
    X, T = np.meshgrid(axis, axis, indexing="ij")
    keep = np.abs(T) <= np.abs(X) + TRIANGLE_TOL
    return X[keep], T[keep]


def evaluate_mesh(kernel: Callable, x: np.ndarray, t: np.ndarray, threads: Optional[int] = None) -> np.ndarray:
    """Evaluate a kernel on mesh points, one chunk per worker thread."""
    if threads is None:
        threads = get_settings().threads
    if threads <= 1 or x.size < 2 * threads:
        return np.asarray(kernel(x, t))
    chunks = np.array_split(np.arange(x.size), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: np.asarray(kernel(x[idx], t[idx])), chunks))
    return np.concatenate(parts)


def mesh_error(
    kernel: Callable, reference_kernel_: Callable, b: float, n: int = 100, threads: Optional[int] = None
) -> float:
    """max |K - K_ref| over the triangle mesh."""
    x, t = triangle_mesh(b, n)
    approx = evaluate_mesh(kernel, x, t, threads)
    exact = evaluate_mesh(reference_kernel_, x, t, threads)
    return float(np.max(np.abs(approx - exact)))


def transmute(kernel: Callable, u: Callable, x: Any, gauss_nodes: int = 64) -> Any:
    """(T u)(x) = u(x) + ∫₋ₓˣ K(x,t) u(t) dt."""
    x = np.asarray(x, dtype=float)
    nodes, weights = leggauss(gauss_nodes)
    t = x[..., None] * nodes
    xx = np.broadcast_to(x[..., None], t.shape)
    integral = x * np.sum(weights * kernel(xx, t) * u(t), axis=-1)
    return (u(x) + integral)[()]


@dataclass
class MeshSpec:
    """Interior mesh for residual checks: n×n points, central step fd_step."""
    b: float
    n: int = 20
    fd_step: float = 1e-4

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        margin = 3 * self.fd_step
        xs = np.linspace(-self.b + margin, self.b - margin, self.n)
        fractions = np.linspace(-1.0, 1.0, self.n + 2)[1:-1]
        X, F = np.meshgrid(xs, fractions, indexing="ij")
        T = F * (np.abs(X) - margin)
        keep = np.abs(X) > 2 * margin
        return X[keep], T[keep]


def vekua_residual(
    K_f: Callable, K_inv: Callable, family: BasisFamily, mesh: MeshSpec
) -> float:
    """
    Max finite-difference residual of the first-order system satisfied by
    u = K_f and v = -K_{1/f}:

        f ∂ₓ(u/f) - ∂ₜv = 0,    (1/f) ∂ₓ(f v) - ∂ₜu = 0.
    """
    x, t = mesh.points()
    step = mesh.fd_step
    f = family.f

    def u(x_, t_):
        return np.asarray(K_f(x_, t_))

    def v(x_, t_):
        return -np.asarray(K_inv(x_, t_))

    def dx(func, x_, t_):
        return (func(x_ + step, t_) - func(x_ - step, t_)) / (2 * step)

    def dt(func, x_, t_):
        return (func(x_, t_ + step) - func(x_, t_ - step)) / (2 * step)

    first = f(x) * dx(lambda a, c: u(a, c) / f(a), x, t) - dt(v, x, t)
    second = dx(lambda a, c: f(a) * v(a, c), x, t) / f(x) - dt(u, x, t)
    return float(max(np.max(np.abs(first)), np.max(np.abs(second))))


def mesh_frame(
    kernel: Callable, b: float, n: int = 100, threads: Optional[int] = None
) -> pd.DataFrame:
    """Kernel values on the triangle mesh as a table (x, t, re, im)."""
    x, t = triangle_mesh(b, n)
    values = np.asarray(evaluate_mesh(kernel, x, t, threads), dtype=complex)
    return pd.DataFrame({"x": x, "t": t, "re": values.real, "im": values.imag})
