"""
Bicomplex (and hyperbolic) numbers w = u + v j with j² = 1.

The components u = R(w) and v = I(w) are complex scalars or numpy arrays of
equal shape; in the second case every operation acts elementwise, which is
how formal powers are evaluated on whole meshes.
"""

from dataclasses import dataclass
from numbers import Number
from typing import Tuple, Union

import numpy as np

Scalar = Union[complex, float, int, np.ndarray]


@dataclass(frozen=True, eq=False)
class Bicomplex:
    """A bicomplex number stored by its R (re) and I (im) components."""
    # numpy defers to __rmul__ / __radd__ instead of broadcasting over us
    __array_ufunc__ = None

    re: Scalar = 0.0
    im: Scalar = 0.0

    @classmethod
    def coerce(cls, value: Union["Bicomplex", Scalar]) -> "Bicomplex":
        if isinstance(value, Bicomplex):
            return value
        return cls(value, 0.0)

    @classmethod
    def from_split(cls, w_plus: Scalar, w_minus: Scalar) -> "Bicomplex":
        """Rebuild w = P⁺w⁺ + P⁻w⁻ from its idempotent components."""
        return cls((w_plus + w_minus) / 2, (w_plus - w_minus) / 2)

    def __add__(self, other):
        other = Bicomplex.coerce(other)
        return Bicomplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = Bicomplex.coerce(other)
        return Bicomplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Bicomplex.coerce(other) - self

    def __neg__(self):
        return Bicomplex(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, Bicomplex):
            return mul(self, other)
        if isinstance(other, (Number, np.ndarray)):
            return Bicomplex(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Number, np.ndarray)):
            return Bicomplex(self.re / other, self.im / other)
        return NotImplemented

    def __pow__(self, n: int) -> "Bicomplex":
        return power(self, n)

    def conj(self) -> "Bicomplex":
        """The conjugation C(u + vj) = u − vj."""
        return Bicomplex(self.re, -self.im)

    def split(self) -> Tuple[Scalar, Scalar]:
        return idempotent_split(self)

    def norm(self):
        return norm(self)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        other = Bicomplex.coerce(other)
        return bool(
            np.all(np.abs(np.asarray(self.re) - other.re) <= tol)
            and np.all(np.abs(np.asarray(self.im) - other.im) <= tol)
        )

    def __repr__(self) -> str:
        return f"Bicomplex({self.re!r}, {self.im!r})"


J = Bicomplex(0.0, 1.0)
P_PLUS = Bicomplex(0.5, 0.5)
P_MINUS = Bicomplex(0.5, -0.5)


def mul(a: Bicomplex, b: Bicomplex) -> Bicomplex:
    """Product in the commutative algebra with j² = 1."""
    return Bicomplex(a.re * b.re + a.im * b.im, a.re * b.im + a.im * b.re)


def idempotent_split(w: Bicomplex) -> Tuple[Scalar, Scalar]:
    """Return (w⁺, w⁻) = (R(w) + I(w), R(w) − I(w))."""
    return w.re + w.im, w.re - w.im


def norm(w: Bicomplex):
    """Half the sum of the moduli of the idempotent components."""
    w_plus, w_minus = idempotent_split(w)
    return 0.5 * (np.abs(w_plus) + np.abs(w_minus))


def power(w: Bicomplex, n: int) -> Bicomplex:
    """w**n for integer n ≥ 0, computed on the idempotent components."""
    if n < 0:
        raise ValueError("only non-negative powers are defined")
    w_plus, w_minus = idempotent_split(w)
    return Bicomplex.from_split(w_plus ** n, w_minus ** n)


def real_part(w: Bicomplex) -> Bicomplex:
    """R(w) = (w + C(w))/2, returned as a bicomplex number."""
    return (w + w.conj()) / 2


def imag_part(w: Bicomplex) -> Bicomplex:
    """I(w) = (w − C(w))/(2j); j⁻¹ = j."""
    return mul(J, w - w.conj()) / 2
