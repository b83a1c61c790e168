import json

import numpy as np
import pytest

from transmute.errors import FitError
from transmute.grid import GridFunction
from transmute.kernels import (
    Kernel,
    KernelApproximation,
    MeshSpec,
    change_parameter,
    darboux_kernel,
    evaluate_mesh,
    fit_goursat,
    goursat_targets,
    kernel_from_taylor,
    mesh_error,
    mesh_frame,
    reference,
    reference_kernel,
    trace_errors,
    transmute,
    triangle_mesh,
    vekua_residual,
    zero_kernel,
)
from transmute.potentials import BUILTINS
from transmute.utils import dump_json

X = np.array([0.3, -0.2, 0.45, -0.4, 0.1])
T = np.array([0.1, 0.15, -0.4, -0.35, 0.0])


@pytest.fixture(scope="module")
def cosh_goursat(cosh_family):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    g1, g2 = goursat_targets(q, cosh_family.h)
    return fit_goursat(cosh_family, g1, g2, 12)


def test_goursat_targets():
    q = GridFunction.constant(1.0, 1.0, 101)
    g1, g2 = goursat_targets(q, 0.5)
    assert np.allclose(g1.values, 0.25 + q.nodes / 4, atol=1e-14)
    assert np.allclose(g2.values, q.nodes / 4, atol=1e-14)


def test_zero_potential_fits_zero_kernel(zero_family):
    q = GridFunction.constant(0.0, 1.0, zero_family.n_points)
    g1, g2 = goursat_targets(q, 0.0)
    kernel = fit_goursat(zero_family, g1, g2, 6)
    assert np.allclose(kernel.c, 0.0)
    assert np.allclose(kernel.b, 0.0)
    assert kernel.eps1 == 0.0 and kernel.eps2 == 0.0


def test_model_taylor_kernel_is_one_half(model_family):
    kernel = kernel_from_taylor(model_family, BUILTINS["model"].jet(4), 4)
    assert np.allclose(kernel(X, T), 0.5, atol=1e-7)
    assert kernel.method == "taylor"


def test_cosh_taylor_error_matches_published():
    family = BUILTINS["cosh"].basis(2.0, 9, 2001)
    kernel = kernel_from_taylor(family, BUILTINS["cosh"].jet(9), 9)
    error = mesh_error(kernel, reference("cosh"), 2.0)
    assert 0.0081416 / 3 <= error <= 0.0081416 * 3


def test_goursat_fit_is_accurate(cosh_goursat):
    assert cosh_goursat.method == "least_squares"
    assert cosh_goursat.eps1 < 1e-9
    assert mesh_error(cosh_goursat, reference("cosh"), 1.0, n=40) < 1e-6


def test_remez_fit(cosh_family):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    g1, g2 = goursat_targets(q, cosh_family.h)
    kernel = fit_goursat(cosh_family, g1, g2, 8, method="remez")
    assert kernel.method == "remez"
    assert mesh_error(kernel, reference("cosh"), 1.0, n=40) < 1e-5


@pytest.mark.parametrize("N", [4, 9, 19])
def test_remez_fit_never_loses_to_least_squares(cosh_family, N):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    g1, g2 = goursat_targets(q, cosh_family.h)
    lsq = fit_goursat(cosh_family, g1, g2, N)
    minimax = fit_goursat(cosh_family, g1, g2, N, method="remez")
    assert minimax.eps1 <= lsq.eps1
    assert minimax.eps2 <= lsq.eps2


def test_remez_fit_at_rounding_level(cosh_family):
    q = BUILTINS["cosh"].grid(1.0, 2001)
    g1, g2 = goursat_targets(q, cosh_family.h)
    kernel = fit_goursat(cosh_family, g1, g2, 19, method="remez")
    lsq = fit_goursat(cosh_family, g1, g2, 19)
    exact = reference("cosh")
    assert mesh_error(kernel, exact, 1.0, n=40) <= mesh_error(lsq, exact, 1.0, n=40) + 1e-13


def test_trace_errors_of_taylor_kernel(model_family):
    kernel = kernel_from_taylor(model_family, BUILTINS["model"].jet(3), 3)
    q = GridFunction.constant(0.0, 0.5, model_family.n_points)
    eps1, eps2 = trace_errors(kernel, *goursat_targets(q, 1.0))
    assert eps1 < 1e-8 and eps2 < 1e-8


def test_unknown_method_rejected(model_family):
    q = GridFunction.constant(0.0, 0.5, model_family.n_points)
    g1, g2 = goursat_targets(q, 1.0)
    with pytest.raises(ValueError):
        fit_goursat(model_family, g1, g2, 2, method="spline")
    with pytest.raises(FitError):
        fit_goursat(model_family, g1, g2, model_family.order + 1)


def test_analytic_derivatives_match_differences(cosh_goursat):
    assert np.allclose(cosh_goursat.dt(X, T), Kernel.dt(cosh_goursat, X, T), atol=1e-7)
    assert np.allclose(cosh_goursat.dx(X, T), Kernel.dx(cosh_goursat, X, T), atol=1e-7)


def test_forward_darboux_of_model(model_family):
    inverse = darboux_kernel(reference("model_f"), model_family, "forward")
    assert np.allclose(inverse(X, T), reference_kernel("model_inv", X, T), atol=1e-10)


def test_backward_darboux_of_model(model_family):
    kernel = darboux_kernel(reference("model_inv"), model_family, "backward")
    assert np.allclose(kernel(X, T), 0.5, atol=1e-8)


def test_darboux_of_cosh_gives_sech(cosh_goursat, cosh_family):
    inverse = darboux_kernel(cosh_goursat, cosh_family)
    points = np.array([0.5, -0.8]), np.array([0.2, 0.6])
    assert np.allclose(inverse(*points), reference_kernel("sech", *points), atol=1e-6)


def test_darboux_direction_checked(model_family):
    with pytest.raises(ValueError):
        darboux_kernel(zero_kernel(), model_family, "sideways")


def test_change_parameter():
    shifted = change_parameter(zero_kernel(), 0.0, 1.0)
    assert np.allclose(shifted(X, T), 0.5)
    back = change_parameter(reference("model_f"), 1.0, 0.0)
    assert np.allclose(back(X, T), 0.0, atol=1e-14)
    same = reference("cosh")
    assert change_parameter(same, 0.0, 0.0) is same


def test_vekua_residual_of_model_pair(model_family):
    residual = vekua_residual(
        reference("model_f"), reference("model_inv"), model_family, MeshSpec(0.5, n=8)
    )
    assert residual < 1e-5


def test_reference_kernels_on_characteristics():
    x = np.linspace(-1.5, 1.5, 7)
    assert np.allclose(reference_kernel("cosh", x, x), x / 2)
    assert np.allclose(reference_kernel("cosh", x, -x), 0.0)
    assert np.allclose(reference_kernel("sech", x, x), x / 2 - np.tanh(x), atol=1e-9)
    assert np.allclose(reference_kernel("sech", x, -x), 0.0, atol=1e-9)


def test_reference_kernel_outside_triangle():
    with pytest.raises(ValueError):
        reference_kernel("cosh", 0.1, 0.5)
    with pytest.raises(ValueError):
        reference("unknown")


def test_transmutation_maps_one_to_f():
    x = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(transmute(reference("model_f"), np.ones_like, x), x + 1.0)
    assert np.allclose(transmute(reference("cosh"), np.ones_like, x), np.cosh(x), atol=1e-12)


def test_json_roundtrip(model_family):
    kernel = kernel_from_taylor(model_family, BUILTINS["model"].jet(4), 4)
    payload = json.loads(dump_json(kernel.to_json()))
    loaded = KernelApproximation.from_json(payload, model_family)
    assert np.allclose(loaded.c, kernel.c)
    assert loaded.N == 4
    other = BUILTINS["model"].basis(0.4, 4, 101)
    with pytest.raises(FitError):
        KernelApproximation.from_json(payload, other)


def test_triangle_mesh_and_frame():
    x, t = triangle_mesh(1.0, 11)
    assert np.all(np.abs(t) <= np.abs(x) + 1e-12)
    frame = mesh_frame(reference("cosh"), 1.0, 11)
    assert list(frame.columns) == ["x", "t", "re", "im"]
    assert len(frame) == x.size


def test_threaded_mesh_evaluation():
    x, t = triangle_mesh(1.0, 30)
    serial = evaluate_mesh(reference("cosh"), x, t, threads=1)
    threaded = evaluate_mesh(reference("cosh"), x, t, threads=3)
    assert np.array_equal(serial, threaded)


def test_transmutation_maps_powers_to_phi(cosh_goursat, cosh_family):
    x = np.linspace(-0.9, 0.9, 7)
    for k in range(1, 5):
        image = transmute(cosh_goursat, lambda t: t ** k, x)
        assert np.allclose(image, cosh_family.phi[k](x), atol=1e-6)


def test_transmutation_initial_values():
    # model kernel ½ with h = 1: (Tv)(0) = v(0), (Tv)'(0) = v'(0) + v(0)
    kernel = reference("model_f")
    step = 1e-4
    value = transmute(kernel, np.cos, 0.0)
    slope = (transmute(kernel, np.cos, step) - transmute(kernel, np.cos, -step)) / (2 * step)
    assert value == pytest.approx(1.0, abs=1e-14)
    assert slope == pytest.approx(1.0, abs=1e-7)
