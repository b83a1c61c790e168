"""
Wave polynomials, generalized wave polynomials and hyperbolic formal powers.

All evaluators accept scalars or numpy arrays for x and t (broadcast
together); values of the basis functions off the grid come from their
spline interpolants.
"""

import logging
from math import comb
from typing import Any, Optional

import numpy as np

from .bicomplex import Bicomplex, power
from .errors import BasisError
from .grid import BasisFamily

logger = logging.getLogger(__name__)


def wave_polynomial(n: int, x: Any, t: Any) -> Any:
    """
    pₙ(x, t): p₀ = 1, p_{2m-1} = R((x+jt)^m), p_{2m} = I((x+jt)^m).
    """
    if n < 0:
        raise ValueError(f"wave polynomial index must be >= 0, got {n}")
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if n == 0:
        return np.ones(x.shape)[()]
    m = (n + 1) // 2
    z = power(Bicomplex(x, t), m)
    return (z.re if n % 2 else z.im)[()]


def _family_functions(family: BasisFamily, which: str):
    if which == "u":
        return family.phi
    if which == "v":
        return family.psi
    raise ValueError(f"which must be 'u' or 'v', got {which!r}")


def generalized_wave_polynomial(
    family: BasisFamily, n: int, x: Any, t: Any, which: str = "u"
) -> Any:
    """
    uₙ (which='u', built from φ) or vₙ (which='v', built from ψ).

    Args:
        family: Basis family; n may not exceed twice its order.
        n: Index of the polynomial.
        x: Points with |x| <= b.
        t: Second variable, broadcast against x.
        which: 'u' or 'v'.

    Returns:
        Values with the broadcast shape of x and t.
    """
    functions = _family_functions(family, which)
    if n < 0 or n > 2 * family.order:
        raise BasisError(
            f"generalized wave polynomial {n} needs a family of order "
            f"{(n + 1) // 2}, have {family.order}",
            module="wave_polynomials",
        )
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if n == 0:
        return functions[0](x)[()]

    m = (n + 1) // 2
    # odd n keeps the even powers of t, even n the odd ones
    first = 0 if n % 2 else 1
    total = np.zeros(x.shape, dtype=complex)
    for k in range(first, m + 1, 2):
        total = total + comb(m, k) * functions[m - k](x) * t ** k
    return total[()]


class FormalPowerEvaluator:
    """
    Formal powers Z⁽ⁿ⁾(a, 0; x + jt) of the main Vekua equation for f.

    Two independent routes are provided: the closed form in the recursive
    integrals X, X̃ and the expansion in generalized wave polynomials.
    """

    def __init__(self, family: BasisFamily, N_max: Optional[int] = None):
        if N_max is None:
            N_max = family.order
        if N_max > family.order:
            raise BasisError(
                f"formal powers up to {N_max} need a family of that order",
                module="wave_polynomials",
            )
        self.family = family
        self.N_max = N_max

    def _check(self, n: int) -> None:
        if n < 0 or n > self.N_max:
            raise BasisError(
                f"formal power index {n} outside 0..{self.N_max}",
                module="wave_polynomials",
            )

    def _binomial_sum(self, integrals, n, x, t):
        """Σ C(n,k) I^{(n-k)}(x) jᵏtᵏ split into its R and I parts."""
        even = np.zeros(x.shape, dtype=complex)
        odd = np.zeros(x.shape, dtype=complex)
        for k in range(n + 1):
            term = comb(n, k) * integrals[n - k](x) * t ** k
            if k % 2:
                odd = odd + term
            else:
                even = even + term
        return even, odd

    def __call__(self, n: int, a: Bicomplex, x: Any, t: Any) -> Bicomplex:
        """Closed form Z⁽ⁿ⁾ = f·R(*Z⁽ⁿ⁾) + (j/f)·I(*Z⁽ⁿ⁾)."""
        self._check(n)
        a = Bicomplex.coerce(a)
        family = self.family
        x, t = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(t, dtype=float)
        )
        if n % 2:
            first, second = family.X, family.Xt
        else:
            first, second = family.Xt, family.X
        re_first, im_first = self._binomial_sum(first, n, x, t)
        re_second, im_second = self._binomial_sum(second, n, x, t)

        star_re = a.re * re_first + a.im * im_second
        star_im = a.re * im_first + a.im * re_second
        f = family.f(x)
        return Bicomplex((f * star_re)[()], (star_im / f)[()])

    def via_wave_polynomials(self, n: int, a: Bicomplex, x: Any, t: Any) -> Bicomplex:
        """Z⁽ⁿ⁾ = α'u_{2n-1} + α''u_{2n} + j(α'v_{2n} + α''v_{2n-1})."""
        self._check(n)
        a = Bicomplex.coerce(a)
        family = self.family
        if n == 0:
            u0 = generalized_wave_polynomial(family, 0, x, t, "u")
            v0 = generalized_wave_polynomial(family, 0, x, t, "v")
            return Bicomplex(a.re * u0, a.im * v0)
        u_odd = generalized_wave_polynomial(family, 2 * n - 1, x, t, "u")
        u_even = generalized_wave_polynomial(family, 2 * n, x, t, "u")
        v_odd = generalized_wave_polynomial(family, 2 * n - 1, x, t, "v")
        v_even = generalized_wave_polynomial(family, 2 * n, x, t, "v")
        return Bicomplex(
            a.re * u_odd + a.im * u_even, a.re * v_even + a.im * v_odd
        )


def formal_power(
    family: BasisFamily, n: int, a: Bicomplex, x: Any, t: Any
) -> Bicomplex:
    """Z⁽ⁿ⁾(a, 0; x + jt) by the closed form."""
    return FormalPowerEvaluator(family)(n, a, x, t)
