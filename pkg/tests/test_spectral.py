import json
import math

import numpy as np
import pandas as pd
import pytest
from scipy.integrate import quad

from transmute.errors import SpectralError
from transmute.grid import GridFunction
from transmute.kernels import KernelApproximation, fit_goursat, goursat_targets, triangle_mesh
from transmute.potentials import BUILTINS
from transmute.spectral import (
    CharacteristicFunction,
    SearchOptions,
    SpectralProblem,
    _refine,
    _scan,
    cosine_moments,
    extend_potential,
    find_eigenvalues,
    read_reference,
    s_N,
    sine_moment,
    sine_moments,
    sine_solution_ivp,
    write_eigenvalue_table,
)
from transmute.validation import EXP_EIGENVALUES, exp_problem


@pytest.fixture(scope="module")
def cosh_kernel(cosh_family):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    g1, g2 = goursat_targets(q, cosh_family.h)
    return fit_goursat(cosh_family, g1, g2, 12)


@pytest.fixture(scope="module")
def free_problem():
    b = math.pi
    family = BUILTINS["zero"].basis(b, 2, 1001)
    kernel = KernelApproximation(family, 2, [0.0] * 3, [0.0] * 2)
    return SpectralProblem(q=GridFunction.constant(0.0, b, 1001), b=b, kernel=kernel)


def _quad_moment(k, omega, x, weight=np.sin):
    value, _ = quad(lambda t: t ** k * weight(omega * t), -x, x, epsabs=1e-14, epsrel=1e-13)
    return value


def test_even_sine_moments_vanish():
    moments = sine_moments(8, np.array([0.3, 5.0, 60.0]), 1.2)
    assert np.all(moments[0::2] == 0.0)


def test_first_sine_moment_closed_form():
    x = 1.2
    for omega in (0.5, 3.0, 40.0):
        expected = 2 * (math.sin(omega * x) - omega * x * math.cos(omega * x)) / omega ** 2
        assert sine_moment(1, omega, x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("k, omega", [(3, 2.0), (7, 0.01), (9, 15.0), (25, 2.0), (25, 80.0)])
def test_sine_moments_against_quadrature(k, omega):
    x = 1.0
    expected = _quad_moment(k, omega, x)
    assert sine_moment(k, omega, x) == pytest.approx(expected, rel=1e-9, abs=1e-14)


def test_cosine_moments_against_quadrature():
    moments = cosine_moments(6, 4.0, 0.8)
    for k in (0, 2, 4, 6):
        assert moments[k] == pytest.approx(_quad_moment(k, 4.0, 0.8, np.cos), rel=1e-10)
    assert np.all(moments[1::2] == 0.0)


def test_moments_at_zero_frequency():
    assert sine_moment(3, 0.0, 1.5) == 0.0
    assert cosine_moments(2, 0.0, 1.5)[2] == pytest.approx(2 * 1.5 ** 3 / 3)


def test_negative_moment_order_rejected():
    with pytest.raises(ValueError):
        sine_moment(-1, 1.0, 1.0)


def test_transmuted_sine_of_zero_kernel(free_problem):
    x = np.linspace(0.0, math.pi, 9)
    assert np.allclose(s_N(free_problem.kernel, x, 2.5), np.sin(2.5 * x), atol=1e-14)


def test_transmuted_sine_vanishes_at_origin(cosh_kernel):
    assert abs(s_N(cosh_kernel, 0.0, 3.0)) < 1e-15


def test_transmuted_sine_solves_the_equation(cosh_kernel):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    x = np.linspace(0.0, 1.0, 11)
    for omega in (0.7, 3.0, 9.0):
        direct = sine_solution_ivp(q, omega, x)
        assert np.allclose(s_N(cosh_kernel, x, omega), direct, atol=1e-6)


def test_characteristic_derivative(cosh_kernel):
    char = CharacteristicFunction(cosh_kernel, 1.0)
    omega = np.array([0.5, 2.0, 7.5])
    step = 1e-6
    numeric = (char(omega + step) - char(omega - step)) / (2 * step)
    assert np.allclose(char.derivative(omega), numeric, atol=1e-6)
    assert np.allclose(char(omega), np.real(s_N(cosh_kernel, 1.0, omega)), atol=1e-13)


def test_complex_kernel_has_no_real_characteristic(free_problem):
    family = free_problem.kernel.family
    kernel = KernelApproximation(family, 1, [0.0, 0.0], [1j])
    with pytest.raises(SpectralError):
        CharacteristicFunction(kernel, math.pi)


def test_free_eigenvalues_are_squares(free_problem):
    results = find_eigenvalues(free_problem, 5)
    assert results.complete
    assert [r.index for r in results] == [1, 2, 3, 4, 5]
    assert np.allclose(results.omega_sq, [1.0, 4.0, 9.0, 16.0, 25.0], atol=1e-10)
    assert all(r.bracket[0] <= r.omega <= r.bracket[1] for r in results)


def test_incomplete_search_is_flagged(free_problem):
    problem = SpectralProblem(
        q=free_problem.q,
        b=free_problem.b,
        kernel=free_problem.kernel,
        search=SearchOptions(omega_max=3.5),
    )
    results = find_eigenvalues(problem, 5)
    assert not results.complete
    assert len(results) == 3


def test_count_must_be_positive(free_problem):
    with pytest.raises(ValueError):
        find_eigenvalues(free_problem, 0)


def test_kernel_for_another_potential_rejected(free_problem):
    with pytest.raises(SpectralError):
        SpectralProblem(
            q=GridFunction.constant(5.0, math.pi, 1001), b=math.pi, kernel=free_problem.kernel
        )
    with pytest.raises(SpectralError):
        SpectralProblem(q=free_problem.q, b=4.0, kernel=free_problem.kernel)


def test_default_search_window(free_problem):
    options = free_problem.resolved_search(10)
    assert options.scan_step == pytest.approx(0.25)
    assert options.omega_min == pytest.approx(0.25e-3)
    assert options.omega_max == pytest.approx(12.0)


@pytest.mark.slow
def test_exponential_potential_eigenvalues():
    results = find_eigenvalues(exp_problem(), 20)
    found = {r.index: r.omega_sq for r in results}
    for n in (1, 2, 3, 5, 10, 20):
        assert found[n] == pytest.approx(EXP_EIGENVALUES[n], abs=1e-8)


@pytest.fixture(scope="module")
def exp_kernels():
    """A coarse and an accurate kernel for q = eˣ on [-π, π] over one family."""
    b = math.pi
    potential = BUILTINS["exp"]
    family = potential.basis(b, 30, 5001)
    q = potential.grid(b, 5001)
    g1, g2 = goursat_targets(q, family.h)
    coarse = fit_goursat(family, g1, g2, 12)
    accurate = fit_goursat(family, g1, g2, 30, method="remez")
    return q, coarse, accurate


@pytest.mark.slow
def test_transmuted_sine_error_is_uniformly_bounded(exp_kernels):
    q, coarse, accurate = exp_kernels
    mesh_x, mesh_t = triangle_mesh(math.pi, 101)
    eps = float(np.max(np.abs(coarse(mesh_x, mesh_t) - accurate(mesh_x, mesh_t))))
    middle = q.n_points // 2
    x = q.nodes[middle::250]
    rng = np.random.default_rng(20)
    for omega in rng.uniform(0.0, 40.0, 20):
        error = np.abs(s_N(coarse, x, omega) - sine_solution_ivp(q, omega, x))
        assert np.all(error <= 1.5 * 2.0 * eps * x + 1e-9), omega


@pytest.mark.slow
def test_eigenvalue_errors_stay_of_one_order(exp_kernels):
    q, coarse, accurate = exp_kernels
    approx = find_eigenvalues(SpectralProblem(q=q, b=math.pi, kernel=coarse), 50)
    exact = find_eigenvalues(SpectralProblem(q=q, b=math.pi, kernel=accurate), 50)
    assert approx.complete and exact.complete
    errors = np.abs(approx.omega_sq - exact.omega_sq)
    assert errors.max() <= 100.0 * errors.min()


def _alternates(values):
    signs = np.sign(values)
    return bool(np.all(signs != 0) and np.all(signs[1:] * signs[:-1] < 0))


def test_characteristic_function_changes_sign_between_eigenvalues(cosh_kernel):
    b = 1.0
    problem = SpectralProblem(q=BUILTINS["cosh"].grid(b, 2001), b=b, kernel=cosh_kernel)
    results = find_eigenvalues(problem, 6)
    omegas = np.array([r.omega for r in results])
    assert np.allclose(results.omega_sq, (np.arange(1, 7) * math.pi) ** 2 + 1.0, rtol=1e-6)
    char = CharacteristicFunction(cosh_kernel, b)
    between = np.concatenate([[omegas[0] / 2], (omegas[1:] + omegas[:-1]) / 2])
    assert _alternates(char(between))


class _CloseRoots:
    """(ω - 1.02)(ω - 1.07)(ω - 3): two roots share one cell of a 0.25 scan."""

    roots = (1.02, 1.07, 3.0)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        return (omega - 1.02) * (omega - 1.07) * (omega - 3.0)

    def derivative(self, omega):
        omega = np.asarray(omega, dtype=float)
        return (
            (omega - 1.07) * (omega - 3.0)
            + (omega - 1.02) * (omega - 3.0)
            + (omega - 1.02) * (omega - 1.07)
        )


def test_close_roots_are_found_by_rescanning():
    char = _CloseRoots()
    options = SearchOptions(omega_min=0.1, omega_max=4.0, scan_step=0.25, threads=1)
    brackets, complete = _scan(char, 3, options)
    assert complete
    assert [br.rescanned for br in brackets] == [True, True, False]
    roots = _refine(char, brackets, options.root_tol)
    assert np.allclose(roots, char.roots, rtol=0.0, atol=1e-12)


def test_rescan_depth_limits_the_search():
    char = _CloseRoots()
    options = SearchOptions(
        omega_min=0.1, omega_max=4.0, scan_step=0.25, max_rescan_depth=1, threads=1
    )
    brackets, complete = _scan(char, 3, options)
    assert not complete
    assert len(brackets) == 1


def test_extend_potential_modes():
    right = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(extend_potential(right, 1.0).values, [3.0, 2.0, 1.0, 2.0, 3.0])
    assert np.array_equal(
        extend_potential(right, 1.0, "odd_shifted").values, [-1.0, 0.0, 1.0, 2.0, 3.0]
    )
    user = extend_potential(right, 1.0, "user", left=[7.0, 8.0])
    assert np.array_equal(user.values, [7.0, 8.0, 1.0, 2.0, 3.0])
    assert user.b == 1.0


def test_extend_potential_errors():
    with pytest.raises(ValueError):
        extend_potential([1.0, 2.0, 3.0], 1.0, "user", left=[1.0])
    with pytest.raises(ValueError):
        extend_potential([1.0, 2.0, 3.0], 1.0, "user")
    with pytest.raises(ValueError):
        extend_potential([1.0, 2.0, 3.0], 1.0, "periodic")


def test_extend_potential_from_grid_function():
    q = GridFunction.from_callable(np.exp, 1.0, 201)
    even = extend_potential(q)
    assert even.b == 1.0
    assert even.n_points == 201
    assert even(-1.0) == pytest.approx(math.e)
    assert np.allclose(even.values[100:], q.values[100:])
    assert np.allclose(even.values, even.values[::-1])
    constant = extend_potential(GridFunction.constant(2.5, 1.0, 11), mode="odd_shifted")
    assert np.allclose(constant.values, 2.5)
    with pytest.raises(ValueError):
        extend_potential(q, 2.0)
    with pytest.raises(ValueError):
        extend_potential(GridFunction(1.0, [1.0, 2.0, 3.0, 4.0]))
    with pytest.raises(ValueError):
        extend_potential([1.0, 2.0, 3.0])


def test_write_eigenvalue_tables(free_problem, tmp_path):
    results = find_eigenvalues(free_problem, 3)
    reference = {1: 1.0, 2: 4.0, 3: 9.0}

    csv_path = tmp_path / "eig.csv"
    frame = write_eigenvalue_table(results, str(csv_path), reference)
    assert list(frame.columns) == ["n", "omega_sq", "residual", "reference", "abs_error"]
    loaded = pd.read_csv(csv_path)
    assert np.allclose(loaded["omega_sq"], [1.0, 4.0, 9.0], atol=1e-10)

    json_path = tmp_path / "eig.json"
    write_eigenvalue_table(results, str(json_path))
    records = json.loads(json_path.read_text())
    assert [row["n"] for row in records] == [1, 2, 3]


def test_reference_file(tmp_path):
    path = tmp_path / "ref.csv"
    pd.DataFrame({"n": [1, 2], "omega_sq": [1.0, 4.0]}).to_csv(path, index=False)
    assert read_reference(str(path)) == {1: 1.0, 2: 4.0}
    bad = tmp_path / "bad.csv"
    pd.DataFrame({"n": [1]}).to_csv(bad, index=False)
    with pytest.raises(SpectralError):
        read_reference(str(bad))
