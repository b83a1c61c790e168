"""
Potentials the command line can refer to.

A potential source is either one of the built-in examples
(`builtin:zero`, `builtin:const:<c>`, `builtin:cosh`, `builtin:sech`,
`builtin:exp`, `builtin:model`) or a CSV file of samples in the
grid_calculus format. Built-ins know their particular solution f, the
slope h = f'(0), the Taylor jet of q at the origin and, where one exists,
the closed-form kernel used as a reference.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .bessel import i0, i1
from .config import DEFAULT_N_POINTS
from .errors import ConfigError, GridError, JetError
from .grid import BasisFamily, GridFunction, Number, build_basis_family
from .spps import particular_solution
from .taylor import PotentialJet, inverse_function_jet, potential_jet_from_f

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"


class Potential:
    """Interface shared by built-in and sampled potentials."""

    name: str
    reference: Optional[str]
    inverse_reference: Optional[str]

    def grid(self, b: float, n_points: int = DEFAULT_N_POINTS) -> GridFunction:
        raise NotImplementedError

    def particular(self, b: float, n_points: int = DEFAULT_N_POINTS) -> Tuple[GridFunction, Number]:
        """(f, h) with f'' = q f and f(0) = 1."""
        return particular_solution(self.grid(b, n_points))

    def jet(self, n_derivs: int) -> PotentialJet:
        raise JetError(f"no Taylor jet is available for {self.name}")

    def check_interval(self, b: float) -> None:
        if b <= 0:
            raise ConfigError(f"b must be positive, got {b}")

    def basis(self, b: float, N: int, n_points: int = DEFAULT_N_POINTS) -> BasisFamily:
        self.check_interval(b)
        f, h = self.particular(b, n_points)
        return build_basis_family(f, N, h)


@dataclass
class BuiltinPotential(Potential):
    """
    A potential with a closed-form particular solution.

    Args:
        name: Registry name.
        q: Vectorized potential.
        f: Particular solution with f(0) = 1.
        df: Derivative of f.
        h: f'(0).
        jet_builder: Returns the jet with the requested number of derivatives.
        reference: Name of the closed-form kernel K_f, if known.
        inverse_reference: Name of the closed-form kernel K_{1/f}, if known.
        max_b: Exclusive upper bound on b (f vanishes beyond).
    """
    name: str
    q: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    h: Number
    jet_builder: Callable[[int], PotentialJet]
    reference: Optional[str] = None
    inverse_reference: Optional[str] = None
    max_b: Optional[float] = None

    def check_interval(self, b: float) -> None:
        super().check_interval(b)
        if self.max_b is not None and b >= self.max_b:
            raise ConfigError(f"builtin:{self.name} needs b < {self.max_b}, got {b}")

    def grid(self, b: float, n_points: int = DEFAULT_N_POINTS) -> GridFunction:
        return GridFunction.from_callable(self.q, b, n_points)

    def particular(self, b: float, n_points: int = DEFAULT_N_POINTS) -> Tuple[GridFunction, Number]:
        self.check_interval(b)
        f = GridFunction.from_callable(self.f, b, n_points, derivative=self.df)
        return f, self.h

    def jet(self, n_derivs: int) -> PotentialJet:
        return self.jet_builder(n_derivs)


class SampledPotential(Potential):
    """Potential read from a CSV file of samples over [-b, b]."""

    def __init__(self, path: str):
        self.path = path
        self.name = path
        self.reference = None
        self.inverse_reference = None
        self.samples = GridFunction.read_csv(path)

    def check_interval(self, b: float) -> None:
        super().check_interval(b)
        if not np.isclose(b, self.samples.b):
            raise ConfigError(f"{self.path} is sampled on [-{self.samples.b}, {self.samples.b}], not b={b}")

    def grid(self, b: float, n_points: int = DEFAULT_N_POINTS) -> GridFunction:
        self.check_interval(b)
        if n_points != self.samples.n_points:
            logger.info(
                "using the %d samples of %s instead of %d points",
                self.samples.n_points,
                self.path,
                n_points,
            )
        return self.samples


# Jets


def _constant_jet(value: Number, h: Number) -> Callable[[int], PotentialJet]:
    def build(n_derivs: int) -> PotentialJet:
        zero = 0 if isinstance(value, (int, Fraction)) else 0.0
        derivs = [value] + [zero] * max(n_derivs - 1, 0)
        return PotentialJet(h, derivs[:n_derivs])

    return build


def cosh_coefficients(length: int):
    return [Fraction(1, factorial(k)) if k % 2 == 0 else Fraction(0) for k in range(length)]


def sech_jet(n_derivs: int) -> PotentialJet:
    """Exact jet of q = 1 - 2sech²x from the series of 1/cosh x."""
    sech = inverse_function_jet(cosh_coefficients(n_derivs + 2))
    return potential_jet_from_f(sech)


def exp_jet(n_derivs: int) -> PotentialJet:
    return PotentialJet(float(i1(2.0) / i0(2.0)), [1.0] * n_derivs)


def _exp_f(x):
    return i0(2.0 * np.exp(x / 2.0)) / i0(2.0)


def _exp_df(x):
    half = np.exp(x / 2.0)
    return i1(2.0 * half) * half / i0(2.0)


def _sech(x):
    return 1.0 / np.cosh(x)


def _parse_number(text: str):
    try:
        return Fraction(text)
    except ValueError:
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            raise ConfigError(f"cannot parse the constant {text!r}")


def constant_potential(text: str) -> BuiltinPotential:
    """q ≡ c² with f = e^{cx} and h = c."""
    c = _parse_number(text)
    exact = isinstance(c, Fraction)
    value = float(c) if exact else c
    square = c * c
    return BuiltinPotential(
        name=f"const:{text}",
        q=lambda x: np.full(np.shape(x), value * value),
        f=lambda x: np.exp(value * x),
        df=lambda x: value * np.exp(value * x),
        h=value,
        jet_builder=_constant_jet(square, c if exact else value),
    )


BUILTINS: Dict[str, BuiltinPotential] = {
    "zero": BuiltinPotential(
        name="zero",
        q=np.zeros_like,
        f=np.ones_like,
        df=np.zeros_like,
        h=0.0,
        jet_builder=_constant_jet(0, 0),
        reference="zero",
        inverse_reference="zero",
    ),
    "cosh": BuiltinPotential(
        name="cosh",
        q=np.ones_like,
        f=np.cosh,
        df=np.sinh,
        h=0.0,
        jet_builder=_constant_jet(1, 0),
        reference="cosh",
        inverse_reference="sech",
    ),
    "sech": BuiltinPotential(
        name="sech",
        q=lambda x: 1.0 - 2.0 * _sech(x) ** 2,
        f=_sech,
        df=lambda x: -_sech(x) * np.tanh(x),
        h=0.0,
        jet_builder=sech_jet,
        reference="sech",
        inverse_reference="cosh",
    ),
    "exp": BuiltinPotential(
        name="exp",
        q=np.exp,
        f=_exp_f,
        df=_exp_df,
        h=float(i1(2.0) / i0(2.0)),
        jet_builder=exp_jet,
    ),
    "model": BuiltinPotential(
        name="model",
        q=np.zeros_like,
        f=lambda x: x + 1.0,
        df=np.ones_like,
        h=1.0,
        jet_builder=_constant_jet(0, 1),
        reference="model_f",
        inverse_reference="model_inv",
        max_b=1.0,
    ),
}


def builtin_names():
    return sorted(BUILTINS) + ["const:<c>"]


def parse_potential(source: str) -> Potential:
    """
    Resolve a potential reference.

    Args:
        source: 'builtin:<name>', 'builtin:const:<c>' or a CSV path.

    Returns:
        The matching Potential.
    """
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX):]
        if name.startswith("const:"):
            return constant_potential(name[len("const:"):])
        if name not in BUILTINS:
            raise ConfigError(
                f"unknown builtin potential {name!r}; choose from {', '.join(builtin_names())}"
            )
        return BUILTINS[name]
    try:
        return SampledPotential(source)
    except FileNotFoundError:
        raise ConfigError(f"potential file {source!r} not found")
    except GridError as exc:
        raise ConfigError(f"potential file {source!r}: {exc}")
