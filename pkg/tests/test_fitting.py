import numpy as np
import pytest

from transmute.errors import FitError, RankDeficientError
from transmute.fitting import _alternation_reference, least_squares, remez


def test_least_squares_recovers_coefficients():
    x = np.linspace(-1.0, 1.0, 201)
    A = np.column_stack([np.ones_like(x), x, x ** 2, np.cos(3 * x)])
    coefficients = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(least_squares(A, A @ coefficients), coefficients, atol=1e-10)


def test_least_squares_complex_targets():
    x = np.linspace(0.0, 1.0, 101)
    A = np.column_stack([np.ones_like(x), x])
    y = (1 + 2j) + (0.5 - 1j) * x
    assert np.allclose(least_squares(A, y), [1 + 2j, 0.5 - 1j], atol=1e-12)


def test_duplicate_column_is_rank_deficient():
    x = np.linspace(0.0, 1.0, 51)
    A = np.column_stack([np.ones_like(x), x, 2 * x])
    with pytest.raises(RankDeficientError) as info:
        least_squares(A, x)
    assert info.value.order in (1, 2)


def test_zero_column_reports_its_order():
    x = np.linspace(0.0, 1.0, 51)
    A = np.column_stack([np.ones_like(x), np.zeros_like(x), x])
    with pytest.raises(RankDeficientError) as info:
        least_squares(A, x)
    assert info.value.order == 1


def test_minimax_line_for_exponential():
    x = np.linspace(0.0, 1.0, 1001)
    A = np.column_stack([np.ones_like(x), x])
    result = remez(A, np.exp(x), defect_tol=1e-10)
    slope = np.e - 1.0
    intercept = (1.0 + slope * (1.0 - np.log(slope))) / 2.0
    assert result.converged
    assert result.error == pytest.approx(1.0 - intercept, abs=1e-5)
    assert result.coefficients == pytest.approx([intercept, slope], abs=1e-4)


def test_minimax_beats_least_squares_in_max_norm():
    x = np.linspace(-1.0, 1.0, 801)
    A = np.column_stack([x ** k for k in range(5)])
    y = np.abs(x) ** 1.5
    lsq_error = np.max(np.abs(A @ least_squares(A, y) - y))
    assert remez(A, y).error < lsq_error


def test_remez_rejects_complex_data():
    x = np.linspace(0.0, 1.0, 11)
    A = np.column_stack([np.ones_like(x), x])
    with pytest.raises(FitError):
        remez(A, np.exp(1j * x))


def test_remez_needs_enough_points():
    A = np.eye(3)
    with pytest.raises(FitError):
        remez(A, np.ones(3))


def test_remez_starts_from_least_squares_residual():
    x = np.linspace(-1.0, 1.0, 2001)
    A = np.column_stack([x ** k for k in range(6)])
    y = 1.0 / (1.0 + 4.0 * x ** 2)
    seeded = remez(A, y)
    plain = remez(A, y, start="chebyshev")
    lsq_error = np.max(np.abs(A @ least_squares(A, y) - y))
    assert seeded.converged and plain.converged
    assert seeded.error <= lsq_error
    assert seeded.error == pytest.approx(plain.error, rel=2e-3)


def test_remez_stops_at_rounding_level():
    x = np.linspace(-1.0, 1.0, 401)
    A = np.column_stack([np.ones_like(x), x, x ** 2])
    result = remez(A, 1.0 - 2.0 * x + 0.5 * x ** 2)
    assert result.converged
    assert result.iterations == 0
    assert np.allclose(result.coefficients, [1.0, -2.0, 0.5], rtol=0.0, atol=1e-13)


def test_alternation_reference_keeps_signs():
    err = np.array([0.1, 0.5, -0.2, -0.9, 0.05, -0.01, 0.3, 0.7, -0.4])
    ref = _alternation_reference(err, 4)
    assert len(ref) == 4
    assert np.all(np.diff(np.sign(err[ref])) != 0)
    assert 3 in ref and 7 in ref
    assert _alternation_reference(np.array([1.0, 2.0, -1.0]), 4) is None


def test_unknown_reference_start():
    x = np.linspace(0.0, 1.0, 11)
    A = np.column_stack([np.ones_like(x), x])
    with pytest.raises(ValueError):
        remez(A, x, start="random")
