"""
Exact combinatorics for the generalized Taylor coefficients of the kernel.

The derivatives ∂ₜⁿK(0,0) are sums over parameter lists (ℓ, d, n₁..n_ℓ)
weighted by the integer S-coefficients. Everything here works on plain
Python numbers: jets made of ints/Fractions are processed exactly, anything
else in complex floating point.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isfinite
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import JetError

logger = logging.getLogger(__name__)

Value = Union[int, Fraction, float, complex]


class ParameterList(NamedTuple):
    """Index (n; ℓ; d; n₁ ≤ … ≤ n_ℓ) of one S-coefficient."""
    n: int
    ell: int
    d: int
    parts: Tuple[int, ...]

    def is_valid(self) -> bool:
        return (
            0 <= self.ell <= self.n // 2
            and 0 <= self.d <= self.n - 2 * self.ell
            and len(self.parts) == self.ell
            and all(p >= 0 for p in self.parts)
            and list(self.parts) == sorted(self.parts)
            and sum(self.parts) + 2 * self.ell + self.d == self.n
        )


@dataclass
class PotentialJet:
    """h = q⁽⁻¹⁾(0) and the derivatives q⁽ᵐ⁾(0), m = 0, 1, …"""
    h: Value
    derivs: List[Value] = field(default_factory=list)

    def order(self, m: int) -> Value:
        """q⁽ᵐ⁾(0) with the convention q⁽⁻¹⁾(0) = h."""
        if m == -1:
            return self.h
        return self.derivs[m]

    def is_exact(self) -> bool:
        return all(_is_rational(v) for v in [self.h] + list(self.derivs))


def _is_rational(value: Any) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def _nondecreasing(total: int, length: int, minimum: int = 0) -> Iterator[Tuple[int, ...]]:
    if length == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total // length + 1):
        for rest in _nondecreasing(total - first, length - 1, first):
            yield (first,) + rest


def enumerate_parameter_lists(n: int) -> List[ParameterList]:
    """All valid lists at level n, ordered by ell, then d, then parts."""
    if n < 0:
        raise ValueError(f"level must be non-negative, got {n}")
    lists = []
    for ell in range(n // 2 + 1):
        for d in range(n - 2 * ell + 1):
            rest = n - 2 * ell - d
            for parts in _nondecreasing(rest, ell):
                lists.append(ParameterList(n, ell, d, parts))
    return lists


def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal-number recurrence."""
    counts = [1] + [0] * n
    for m in range(1, n + 1):
        total = 0
        k = 1
        while True:
            first = k * (3 * k - 1) // 2
            if first > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * counts[m - first]
            second = k * (3 * k + 1) // 2
            if second <= m:
                total += sign * counts[m - second]
            k += 1
        counts[m] = total
    return counts[n]


def distinct_permutations(items: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Distinct orderings of a multiset, in lexicographic order."""
    counter = Counter(items)
    size = len(items)

    def extend(prefix):
        if len(prefix) == size:
            yield tuple(prefix)
            return
        for value in sorted(counter):
            if counter[value]:
                counter[value] -= 1
                prefix.append(value)
                yield from extend(prefix)
                prefix.pop()
                counter[value] += 1

    yield from extend([])


class SCoefficientTable:
    """
    S-coefficients for every level up to n_max.

    entries maps a ParameterList to its value; the only non-integer entry is
    S⁰_{0;0;()} = 1/2.
    """

    def __init__(self, n_max: int, entries: Dict[ParameterList, Union[int, Fraction]]):
        self.n_max = n_max
        self.entries = entries

    def get(self, n: int, ell: int, d: int, parts: Sequence[int] = ()) -> Union[int, Fraction]:
        """Value of Sⁿ_{ℓ;d;parts}; zero outside the admissible range."""
        key = ParameterList(n, ell, d, tuple(sorted(parts)))
        if n > self.n_max:
            raise KeyError(f"level {n} is beyond the table (n_max = {self.n_max})")
        return self.entries.get(key, 0)

    def __getitem__(self, key: ParameterList) -> Union[int, Fraction]:
        return self.get(key.n, key.ell, key.d, key.parts)

    def level(self, n: int) -> List[Tuple[ParameterList, Union[int, Fraction]]]:
        return [(p, self.entries[p]) for p in enumerate_parameter_lists(n)]

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> List[Dict[str, Any]]:
        rows = []
        for n in range(self.n_max + 1):
            for p, value in self.level(n):
                rows.append(
                    {
                        "n": p.n,
                        "ell": p.ell,
                        "d": p.d,
                        "parts": list(p.parts),
                        "value": str(value),
                    }
                )
        return rows


@lru_cache(maxsize=8)
def s_table_recurrent(n_max: int) -> SCoefficientTable:
    """
    Fill the S-table level by level from S⁰_{0;0;()} = 1/2.

    Args:
        n_max: Highest level.

    Returns:
        The table; levels >= 1 hold Python ints.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    entries: Dict[ParameterList, Union[int, Fraction]] = {
        ParameterList(0, 0, 0, ()): Fraction(1, 2)
    }

    def lookup(n, ell, d, parts):
        if d < 0 or ell < 0:
            return 0
        return entries.get(ParameterList(n, ell, d, parts), 0)

    for n in range(n_max):
        for p in enumerate_parameter_lists(n + 1):
            value = Fraction(0)
            if p.d >= 1:
                # the d = 1 step carries the parity factor 1 + (-1)^n
                factor = 1 + (-1) ** n if p.d == 1 else 1
                value += factor * lookup(n, p.ell, p.d - 1, p.parts)
            for nk in sorted(set(p.parts)):
                rest = list(p.parts)
                rest.remove(nk)
                value += comb(p.d + nk, nk) * lookup(
                    n, p.ell - 1, p.d + nk + 1, tuple(rest)
                )
            if value.denominator != 1:
                raise ArithmeticError(f"non-integer S-coefficient at {p}")
            entries[p] = int(value)

    logger.debug("S-table filled up to level %d (%d entries)", n_max, len(entries))
    return SCoefficientTable(n_max, entries)


def s_direct(p: ParameterList) -> int:
    """
    Sⁿ_{ℓ;d;parts} from the closed nested-sum formula.

    Sums over the distinct orderings σ of the parts and over
    d₁ ∈ [0, d], dᵢ ∈ [0, dᵢ₋₁ + σᵢ₋₁ + 1].
    """
    if p.ell < 1:
        raise ValueError("the direct formula needs ell >= 1; ell = 0 is an initial value")
    if not p.is_valid():
        raise ValueError(f"invalid parameter list {p}")

    total = 0
    for sigma in distinct_permutations(p.parts):
        suffix = [sum(sigma[i:]) for i in range(p.ell)]

        def nested(i: int, upper: int) -> int:
            if i == p.ell:
                return 1
            acc = 0
            for d_i in range(upper + 1):
                weight = comb(d_i + sigma[i], sigma[i])
                if d_i == 0 and not (p.d == 0 and i == 0):
                    weight *= 1 + (-1) ** suffix[i]
                if weight:
                    acc += weight * nested(i + 1, d_i + sigma[i] + 1)
            return acc

        total += nested(0, p.d)
    return total


def _factorial_div(value: Value, n: int) -> Value:
    if _is_rational(value):
        return Fraction(value) / factorial(n)
    return value / factorial(n)


def _prepare_jet(jet: PotentialJet, exact: bool) -> Tuple[PotentialJet, bool]:
    """
    Jet ready for summation, and whether the sum runs in Fractions.

    Real finite floats are dyadic rationals, so they are summed exactly too
    and the result is rounded once. Only complex jets use complex floats.
    """
    if exact:
        if not jet.is_exact():
            raise JetError("exact mode needs a jet of ints or Fractions")
        return PotentialJet(Fraction(jet.h), [Fraction(v) for v in jet.derivs]), True
    values = [complex(v) for v in [jet.h] + list(jet.derivs)]
    if all(v.imag == 0 and isfinite(v.real) for v in values):
        rational = [Fraction(v.real) for v in values]
        return PotentialJet(rational[0], rational[1:]), True
    return PotentialJet(values[0], values[1:]), False


def kernel_derivatives_at_origin(
    jet: PotentialJet, n_max: int, exact: Optional[bool] = None
) -> List[Value]:
    """
    ∂ₜⁿK(0,0) for n = 0..n_max from the potential jet.

    Args:
        jet: h and q⁽ᵐ⁾(0); at least n_max derivatives are needed.
        n_max: Highest derivative order.
        exact: Fraction arithmetic. Defaults to True when the jet is rational.

    Returns:
        List of n_max + 1 values (Fractions in exact mode, complex otherwise).
    """
    if len(jet.derivs) < n_max:
        raise JetError(
            f"derivatives of order {n_max} need q up to order {n_max - 1}, "
            f"jet has {len(jet.derivs)} entries"
        )
    if exact is None:
        exact = jet.is_exact()
    jet, rational = _prepare_jet(jet, exact)
    table = s_table_recurrent(n_max)

    results: List[Value] = []
    for n in range(n_max + 1):
        total = Fraction(0) if rational else 0j
        for p, s_value in table.level(n):
            weight = 1
            if p.d == 0:
                weight += (-1) ** n
            if weight == 0:
                continue
            term = (-1) ** p.ell * weight * s_value * jet.order(p.d - 1)
            for part in p.parts:
                term = term * jet.order(part)
            total += term
        value = total / 2 ** (n + 1)
        results.append(value if exact else complex(value))
    return results


def expansion_coefficients(
    jet_f: PotentialJet, jet_inv: PotentialJet, N: int, exact: Optional[bool] = None
) -> Tuple[List[Value], List[Value]]:
    """
    Coefficients (c₀..c_N, b₁..b_N) of K_f = c₀u₀ + Σ cₙu_{2n-1} + bₙu_{2n}.

    Args:
        jet_f: Jet of q_f with h = f'(0).
        jet_inv: Jet of q_{1/f} with h = -f'(0).
        N: Truncation order.

    Returns:
        (c, b) with len(c) = N + 1 and len(b) = N.
    """
    if exact is None:
        exact = jet_f.is_exact() and jet_inv.is_exact()
    d_f = kernel_derivatives_at_origin(jet_f, N, exact)
    d_inv = kernel_derivatives_at_origin(jet_inv, N, exact)
    c = [d_f[0]]
    b = []
    for n in range(1, N + 1):
        if n % 2:
            c.append(-_factorial_div(d_inv[n], n))
            b.append(_factorial_div(d_f[n], n))
        else:
            c.append(_factorial_div(d_f[n], n))
            b.append(-_factorial_div(d_inv[n], n))
    return c, b


def _partitions_as_multiplicities(k: int) -> Iterator[Dict[int, int]]:
    def gen(remaining, largest):
        if remaining == 0:
            yield {}
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - part, part):
                counts = dict(rest)
                counts[part] = counts.get(part, 0) + 1
                yield counts

    yield from gen(k, k)


def inverse_function_jet(f_coeffs: Sequence[Value]) -> List[Value]:
    """
    Taylor coefficients of 1/f from those of f (with f₀ = 1).

    f̃ₖ = Σ (-1)^{|m|} |m|!/(m₁!…m_k!) Π f_j^{m_j} over m₁ + 2m₂ + … + k m_k = k.
    """
    if not f_coeffs or f_coeffs[0] != 1:
        raise JetError("the leading Taylor coefficient of f must be 1")
    exact = all(_is_rational(v) for v in f_coeffs)
    coeffs = [Fraction(v) if exact else v for v in f_coeffs]

    result: List[Value] = [coeffs[0]]
    for k in range(1, len(coeffs)):
        total = Fraction(0) if exact else 0
        for counts in _partitions_as_multiplicities(k):
            size = sum(counts.values())
            multinomial = factorial(size)
            for m in counts.values():
                multinomial //= factorial(m)
            term = (-1) ** size * multinomial
            for j, m in counts.items():
                term = term * coeffs[j] ** m
            total += term
        result.append(total)
    return result


def multiply_jets(a: Sequence[Value], b: Sequence[Value]) -> List[Value]:
    """Cauchy product truncated to the shorter length."""
    size = min(len(a), len(b))
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(size)]


def f_jet_from_potential(jet: PotentialJet, order: int) -> List[Value]:
    """
    Taylor coefficients a₀..a_order of f with f'' = q f, f(0) = 1, f'(0) = h.
    """
    if order >= 2 and len(jet.derivs) < order - 1:
        raise JetError(
            f"f up to order {order} needs q up to order {order - 2}"
        )
    exact = jet.is_exact()
    q = [_factorial_div(jet.derivs[i], i) for i in range(max(order - 1, 0))]
    coeffs: List[Value] = [Fraction(1) if exact else 1.0, Fraction(jet.h) if exact else jet.h]
    for k in range(order - 1):
        acc = sum(q[i] * coeffs[k - i] for i in range(k + 1))
        coeffs.append(acc / ((k + 2) * (k + 1)))
    return coeffs[: order + 1]


def potential_jet_from_f(f_coeffs: Sequence[Value]) -> PotentialJet:
    """
    Jet of q = f''/f from the Taylor coefficients of f (f₀ = 1).

    With len(f_coeffs) = L the derivatives q⁽ᵐ⁾(0) for m ≤ L - 3 are returned.
    """
    inverse = inverse_function_jet(f_coeffs)
    second = [(k + 2) * (k + 1) * f_coeffs[k + 2] for k in range(len(f_coeffs) - 2)]
    q_coeffs = multiply_jets(second, inverse)
    derivs = [q_coeffs[m] * factorial(m) for m in range(len(q_coeffs))]
    return PotentialJet(f_coeffs[1], derivs)
