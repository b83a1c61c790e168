"""
Uniform-grid functions on [-b, b] and the recursive-integral basis families.

A GridFunction holds samples on n_points equally spaced nodes. Off-grid
evaluation, differentiation and indefinite integration all go through the
not-a-knot cubic spline of the samples, which is fourth-order accurate.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from .config import DEFAULT_N_POINTS
from .errors import BasisError, GridError

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


def grid_nodes(b: float, n_points: int) -> np.ndarray:
    """Nodes of the uniform grid over [-b, b]."""
    return np.linspace(-b, b, n_points)


class GridFunction:
    """
    Complex (or real) samples of a function on a uniform grid over [-b, b].

    Args:
        b: Half-length of the interval.
        values: Samples at the grid nodes.
        slopes: Optional exact derivative samples. When present they are
            returned by derivative() instead of differentiating the spline.
    """

    def __init__(self, b: float, values: Any, slopes: Any = None):
        values = np.array(values)
        if b <= 0:
            raise GridError(f"half-interval must be positive, got {b}")
        if values.ndim != 1 or values.size < 2:
            raise GridError("values must be a one-dimensional array of size >= 2")
        if slopes is not None:
            slopes = np.array(slopes)
            if slopes.shape != values.shape:
                raise GridError("slopes must have the same shape as values")
            slopes.setflags(write=False)
        values.setflags(write=False)
        self.b = float(b)
        self.values = values
        self.slopes = slopes
        self._spline = None

    @classmethod
    def from_callable(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        b: float,
        n_points: int = DEFAULT_N_POINTS,
        derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> "GridFunction":
        """Sample func (and optionally its derivative) on the grid."""
        x = grid_nodes(b, n_points)
        values = np.asarray(func(x)) * np.ones_like(x)
        slopes = None
        if derivative is not None:
            slopes = np.asarray(derivative(x)) * np.ones_like(x)
        return cls(b, values, slopes)

    @classmethod
    def constant(cls, value: Number, b: float, n_points: int = DEFAULT_N_POINTS):
        values = np.full(n_points, value)
        return cls(b, values, np.zeros_like(values))

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return 2.0 * self.b / (self.n_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.b, self.n_points)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or bool(
            np.all(self.values.imag == 0)
        )

    @property
    def spline(self) -> CubicSpline:
        if self._spline is None:
            self._spline = CubicSpline(self.nodes, self.values)
        return self._spline

    def __call__(self, x: Any) -> Any:
        """Interpolated values at arbitrary points of [-b, b]."""
        return self.spline(x)

    def at_zero(self) -> Number:
        return self.spline(0.0)[()]

    def same_grid(self, other: "GridFunction") -> bool:
        return self.n_points == other.n_points and np.isclose(self.b, other.b)

    def derivative(self) -> "GridFunction":
        """Derivative samples: exact slopes when known, spline otherwise."""
        if self.slopes is not None:
            return GridFunction(self.b, self.slopes)
        return GridFunction(self.b, self.spline(self.nodes, 1))

    def second_derivative(self) -> "GridFunction":
        if self.slopes is not None:
            return self.derivative().derivative()
        return GridFunction(self.b, self.spline(self.nodes, 2))

    def reciprocal(self) -> "GridFunction":
        slopes = None
        if self.slopes is not None:
            slopes = -self.slopes / self.values ** 2
        return GridFunction(self.b, 1.0 / self.values, slopes)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    # Arithmetic on a common grid. Slopes survive when both operands know them.

    def _operands(self, other):
        if isinstance(other, GridFunction):
            if not self.same_grid(other):
                raise GridError("grid functions live on different grids")
            return other.values, other.slopes
        return other, np.zeros(1) if np.isscalar(other) else None

    def __add__(self, other):
        values, slopes = self._operands(other)
        new_slopes = None
        if self.slopes is not None and slopes is not None:
            new_slopes = self.slopes + slopes
        return GridFunction(self.b, self.values + values, new_slopes)

    __radd__ = __add__

    def __neg__(self):
        slopes = None if self.slopes is None else -self.slopes
        return GridFunction(self.b, -self.values, slopes)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        values, slopes = self._operands(other)
        new_slopes = None
        if self.slopes is not None and slopes is not None:
            new_slopes = self.slopes * values + self.values * slopes
        return GridFunction(self.b, self.values * values, new_slopes)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __repr__(self) -> str:
        return f"GridFunction(b={self.b}, n_points={self.n_points})"

    # Serialization

    def to_frame(self) -> pd.DataFrame:
        data = {"x": self.nodes, "re": np.real(self.values)}
        if not self.is_real:
            data["im"] = np.imag(self.values)
        return pd.DataFrame(data)

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def read_csv(cls, path: str) -> "GridFunction":
        frame = pd.read_csv(path)
        return cls.from_frame(frame)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "GridFunction":
        missing = [col for col in ("x", "re") if col not in frame.columns]
        if missing:
            raise GridError(f"CSV is missing columns {missing}")
        x = frame["x"].to_numpy(dtype=float)
        values = frame["re"].to_numpy(dtype=float)
        if "im" in frame.columns:
            values = values + 1j * frame["im"].to_numpy(dtype=float)
        b = float(x[-1])
        if x.size < 2 or not np.allclose(x, grid_nodes(b, x.size), atol=1e-9 * b):
            raise GridError("samples must lie on a uniform grid over [-b, b]")
        return cls(b, values)

    def to_json(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "b": self.b,
            "n_points": self.n_points,
            "values": np.real(self.values).tolist(),
        }
        if not self.is_real:
            payload["values_imag"] = np.imag(self.values).tolist()
        return payload

    @classmethod
    def from_json(cls, payload: Union[str, Dict[str, Any]]) -> "GridFunction":
        if isinstance(payload, str):
            payload = json.loads(payload)
        values = np.asarray(payload["values"], dtype=float)
        if "values_imag" in payload:
            values = values + 1j * np.asarray(payload["values_imag"], dtype=float)
        if values.size != int(payload["n_points"]):
            raise GridError("n_points does not match the number of values")
        return cls(float(payload["b"]), values)


def indefinite_integral(g: GridFunction) -> GridFunction:
    """
    Antiderivative F of g with F(0) = 0.

    Args:
        g: Integrand samples.

    Returns:
        F on the same grid; its exact slopes are the samples of g.
    """
    primitive = g.spline.antiderivative()
    values = primitive(g.nodes) - primitive(0.0)
    return GridFunction(g.b, values, slopes=g.values)


def estimate_slope(f: GridFunction) -> Number:
    """
    f'(0) by the one-sided fourth-order difference on [0, b].

    The stencil only looks to the right of the origin so a potential
    extended from [0, b] does not leak its reflection into h.
    """
    nodes = f.nodes
    step = f.spacing
    x = np.arange(5) * step
    if x[-1] > nodes[-1]:
        raise GridError("grid too coarse to estimate f'(0)")
    samples = f(x)
    weights = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * step)
    return complex(np.dot(weights, samples))


def _scalar(value: Number) -> Number:
    value = complex(value)
    return value.real if value.imag == 0 else value


@dataclass
class BasisFamily:
    """
    Recursive integrals X, X̃ and the families φ, ψ built from f.

    phi[k] and psi[k] are GridFunctions for k = 0..order; df holds f'.
    """
    f: GridFunction
    h: Number
    X: List[GridFunction]
    Xt: List[GridFunction]
    phi: List[GridFunction]
    psi: List[GridFunction]
    df: GridFunction = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.phi) - 1

    @property
    def b(self) -> float:
        return self.f.b

    @property
    def n_points(self) -> int:
        return self.f.n_points

    def log_derivative(self, x: Any) -> Any:
        """f'/f at arbitrary points."""
        return self.df(x) / self.f(x)

    def dphi(self, k: int, x: Any) -> Any:
        """φₖ' = (f'/f)φₖ + kψₖ₋₁."""
        value = self.log_derivative(x) * self.phi[k](x)
        if k > 0:
            value = value + k * self.psi[k - 1](x)
        return value

    def dpsi(self, k: int, x: Any) -> Any:
        """ψₖ' = -(f'/f)ψₖ + kφₖ₋₁."""
        value = -self.log_derivative(x) * self.psi[k](x)
        if k > 0:
            value = value + k * self.phi[k - 1](x)
        return value

    def reciprocal(self) -> "BasisFamily":
        """The family generated by 1/f: X and X̃ swap, so do φ and ψ."""
        return BasisFamily(
            f=self.f.reciprocal(),
            h=-self.h,
            X=self.Xt,
            Xt=self.X,
            phi=self.psi,
            psi=self.phi,
            df=-(self.df / (self.f * self.f)),
        )

    def to_frame(self) -> pd.DataFrame:
        """Columns x, phi_k and psi_k (real parts, plus _im columns when complex)."""
        data = {"x": self.f.nodes}
        for name, functions in (("phi", self.phi), ("psi", self.psi)):
            for k, g in enumerate(functions):
                data[f"{name}_{k}"] = np.real(g.values)
                if not g.is_real:
                    data[f"{name}_{k}_im"] = np.imag(g.values)
        return pd.DataFrame(data)

    def fingerprint(self) -> Dict[str, Any]:
        """Short identity of the family, stored with serialized kernels."""
        f0 = complex(self.f.at_zero())
        fb = complex(self.f(self.b))
        h = complex(self.h)
        return {
            "b": self.b,
            "n_points": self.n_points,
            "order": self.order,
            "h": [h.real, h.imag],
            "f_b": [fb.real, fb.imag],
            "f_0": [f0.real, f0.imag],
        }


def check_nonvanishing(f: GridFunction, rtol: float = 1e-12) -> None:
    """Raise BasisError if f has a zero on the grid."""
    magnitude = np.abs(f.values)
    if np.min(magnitude) <= rtol * np.max(magnitude):
        raise BasisError("f vanishes on the grid")
    if f.is_real:
        signs = np.sign(np.real(f.values))
        if np.any(signs != signs[0]):
            raise BasisError("f changes sign on [-b, b]")


def normalize_at_zero(f: GridFunction) -> GridFunction:
    """Rescale f so that f(0) = 1."""
    f0 = f.at_zero()
    if f0 == 0:
        raise BasisError("f(0) = 0 cannot be normalized")
    if f0 == 1:
        return f
    return f * (1.0 / f0)


def build_basis_family(
    f: GridFunction, N: int, h: Optional[Number] = None
) -> BasisFamily:
    """
    Build X⁽ⁿ⁾, X̃⁽ⁿ⁾, φₖ and ψₖ for n, k = 0..N.

    Args:
        f: Non-vanishing particular solution; rescaled so that f(0) = 1.
        N: Highest order.
        h: f'(0) if known. Otherwise taken from the exact slopes of f or,
            failing that, from a one-sided difference.

    Returns:
        The BasisFamily of order N.
    """
    if N < 0:
        raise BasisError(f"order must be non-negative, got {N}")
    check_nonvanishing(f)
    f = normalize_at_zero(f)

    if h is None:
        if f.slopes is not None:
            h = GridFunction(f.b, f.slopes).at_zero()
        else:
            h = estimate_slope(f)
    h = _scalar(h)

    f_sq = f * f
    inv_f_sq = f_sq.reciprocal()
    inv_f = f.reciprocal()
    one = GridFunction.constant(1.0, f.b, f.n_points)

    X = [one]
    Xt = [one]
    for n in range(1, N + 1):
        # odd levels of X integrate against 1/f², even ones against f²
        weight_x = inv_f_sq if n % 2 else f_sq
        weight_xt = f_sq if n % 2 else inv_f_sq
        X.append(indefinite_integral(X[-1] * weight_x) * n)
        Xt.append(indefinite_integral(Xt[-1] * weight_xt) * n)

    phi = []
    psi = []
    for k in range(N + 1):
        if k % 2:
            phi.append(f * X[k])
            psi.append(Xt[k] * inv_f)
        else:
            phi.append(f * Xt[k])
            psi.append(X[k] * inv_f)

    logger.debug("built basis family of order %d on [-%g, %g]", N, f.b, f.b)
    return BasisFamily(
        f=f, h=h, X=X, Xt=Xt, phi=phi, psi=psi, df=f.derivative()
    )


def potential_of(f: GridFunction) -> GridFunction:
    """q_f = f''/f."""
    return GridFunction(f.b, f.second_derivative().values / f.values)


def darboux_potential(f: GridFunction) -> GridFunction:
    """q_{1/f} = 2(f'/f)² - q_f."""
    log_derivative = f.derivative().values / f.values
    return GridFunction(f.b, 2.0 * log_derivative ** 2 - potential_of(f).values)
