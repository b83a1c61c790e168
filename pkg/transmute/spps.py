"""
Spectral parameter power series (SPPS).

particular_solution builds a non-vanishing f with f'' = q f; spps_evaluate
turns a BasisFamily of f into the two solutions of g'' - q g = λ g that
satisfy g1(0) = 1, g1'(0) = h and g2(0) = 0, g2'(0) = 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BasisError, SolverError
from .grid import BasisFamily, GridFunction, Number, check_nonvanishing

logger = logging.getLogger(__name__)

IVP_RTOL = 1e-13
IVP_ATOL = 1e-15


def solve_cauchy(
    q: GridFunction, y0: Number, dy0: Number, shift: Number = 0.0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Solve y'' = (q + shift) y from x = 0 towards both ends of the grid.

    Args:
        q: Potential samples; interpolated by its spline between nodes.
        y0: y(0).
        dy0: y'(0).
        shift: Constant added to q (used for the spectral parameter).

    Returns:
        (values, slopes) at the grid nodes.
    """
    nodes = q.nodes
    complex_case = (
        not q.is_real or np.iscomplexobj(np.asarray([y0, dy0, shift]))
    )
    dtype = complex if complex_case else float
    spline = q.spline

    def rhs(x, y):
        return np.array([y[1], (spline(x) + shift) * y[0]], dtype=dtype)

    values = np.empty(nodes.size, dtype=dtype)
    slopes = np.empty(nodes.size, dtype=dtype)
    start = np.array([y0, dy0], dtype=dtype)

    for mask, end in ((nodes >= 0, q.b), (nodes < 0, -q.b)):
        targets = nodes[mask]
        if targets.size == 0:
            continue
        order = np.argsort(np.abs(targets))
        sol = solve_ivp(
            rhs,
            (0.0, end),
            start,
            method="DOP853",
            t_eval=targets[order],
            rtol=IVP_RTOL,
            atol=IVP_ATOL,
        )
        if not sol.success:
            raise SolverError(f"IVP integration failed: {sol.message}")
        idx = np.flatnonzero(mask)[order]
        values[idx] = sol.y[0]
        slopes[idx] = sol.y[1]
    return values, slopes


def particular_solution(
    q: GridFunction, h: Optional[Number] = None
) -> Tuple[GridFunction, Number]:
    """
    A non-vanishing solution f of f'' = q f with f(0) = 1.

    Args:
        q: Potential on [-b, b].
        h: Prescribed f'(0). By default the solution with f'(0) = 0 is tried
            first and replaced by y1 + i*y2 if it vanishes (real q only).

    Returns:
        (f, h) where f carries exact slopes from the integration.
    """
    slope0 = 0.0 if h is None else h
    values, slopes = solve_cauchy(q, 1.0, slope0)
    f = GridFunction(q.b, values, slopes)
    try:
        check_nonvanishing(f)
        return f, slope0
    except BasisError:
        if h is not None:
            raise SolverError(f"the solution with f'(0) = {h} vanishes on [-b, b]")
        if not q.is_real:
            raise SolverError(
                "the particular solution vanishes and q is complex; "
                "supply a non-vanishing f explicitly"
            )

    logger.warning("y1 vanishes on [-%g, %g]; using f = y1 + i*y2", q.b, q.b)
    values2, slopes2 = solve_cauchy(q, 0.0, 1.0)
    f = GridFunction(q.b, values + 1j * values2, slopes + 1j * slopes2)
    return f, 1j


@dataclass
class SppsSolution:
    """One of the two SPPS solutions for a fixed spectral parameter."""
    family: BasisFamily
    lam: Number
    kind: str
    M: int

    def __post_init__(self):
        if self.kind not in ("g1", "g2"):
            raise ValueError(f"kind must be 'g1' or 'g2', got {self.kind!r}")

    def grid_function(self) -> GridFunction:
        """Samples of the solution, with exact slopes from the series."""
        g1, g2, dg1, dg2 = spps_evaluate(self.family, self.lam, self.M)
        if self.kind == "g1":
            return GridFunction(g1.b, g1.values, dg1.values)
        return GridFunction(g2.b, g2.values, dg2.values)


def spps_evaluate(
    family: BasisFamily, lam: Number, M: Optional[int] = None
) -> Tuple[GridFunction, GridFunction, GridFunction, GridFunction]:
    """
    Evaluate g1, g2 and their derivatives from the SPPS series.

    Args:
        family: Basis family; its order must be at least 2M + 1.
        lam: Spectral parameter λ in g'' - q g = λ g.
        M: Truncation order; defaults to the largest the family supports.

    Returns:
        (g1, g2, g1', g2') on the family grid.
    """
    max_m = (family.order - 1) // 2
    if M is None:
        M = max_m
    if M < 0 or M > max_m:
        raise SolverError(
            f"truncation order {M} needs a family of order {2 * M + 1}, "
            f"have {family.order}"
        )

    x = family.f.nodes
    log_derivative = family.df.values / family.f.values
    g1 = np.zeros(x.size, dtype=complex)
    g2 = np.zeros(x.size, dtype=complex)
    dg1 = np.zeros(x.size, dtype=complex)
    dg2 = np.zeros(x.size, dtype=complex)

    def dphi(k):
        value = log_derivative * family.phi[k].values
        if k > 0:
            value = value + k * family.psi[k - 1].values
        return value

    power = 1.0 + 0j
    for k in range(M + 1):
        even = power / math.factorial(2 * k)
        odd = power / math.factorial(2 * k + 1)
        g1 += even * family.phi[2 * k].values
        dg1 += even * dphi(2 * k)
        g2 += odd * family.phi[2 * k + 1].values
        dg2 += odd * dphi(2 * k + 1)
        power *= lam

    b = family.b
    return (
        GridFunction(b, g1),
        GridFunction(b, g2),
        GridFunction(b, dg1),
        GridFunction(b, dg2),
    )


def wronskian(
    g1: GridFunction, g2: GridFunction, dg1: GridFunction, dg2: GridFunction
) -> np.ndarray:
    """g1·g2' - g1'·g2 at the nodes."""
    return g1.values * dg2.values - dg1.values * g2.values
