import numpy as np
import pytest

from transmute.bicomplex import (
    J,
    P_MINUS,
    P_PLUS,
    Bicomplex,
    imag_part,
    mul,
    norm,
    power,
    real_part,
)


def test_j_squares_to_one():
    assert (J * J).isclose(1.0)


def test_idempotents():
    assert (P_PLUS * P_PLUS).isclose(P_PLUS)
    assert (P_MINUS * P_MINUS).isclose(P_MINUS)
    assert (P_PLUS * P_MINUS).isclose(0.0)
    assert (P_PLUS + P_MINUS).isclose(1.0)


def test_power_matches_repeated_product():
    w = Bicomplex(0.3 + 0.2j, -1.1)
    expected = Bicomplex(1.0, 0.0)
    for n in range(6):
        assert power(w, n).isclose(expected, tol=1e-12)
        expected = mul(expected, w)


def test_split_roundtrip():
    w = Bicomplex(2.0 - 1j, 0.5j)
    plus, minus = w.split()
    assert Bicomplex.from_split(plus, minus).isclose(w)


def test_norm_of_idempotent():
    assert norm(P_PLUS) == pytest.approx(0.5)
    assert Bicomplex(3.0, 0.0).norm() == pytest.approx(3.0)


def test_real_and_imaginary_parts():
    w = Bicomplex(1.5, -2.0)
    assert real_part(w).isclose(Bicomplex(1.5, 0.0))
    assert imag_part(w).isclose(Bicomplex(-2.0, 0.0))


def test_elementwise_on_arrays():
    x = np.linspace(-1.0, 1.0, 7)
    t = np.linspace(0.0, 0.5, 7)
    z = power(Bicomplex(x, t), 2)
    assert np.allclose(z.re, x ** 2 + t ** 2)
    assert np.allclose(z.im, 2 * x * t)


def test_scalar_arithmetic():
    w = Bicomplex(1.0, 2.0)
    assert (2 * w).isclose(Bicomplex(2.0, 4.0))
    assert (w - 1).isclose(Bicomplex(0.0, 2.0))
    assert (1 - w).isclose(Bicomplex(0.0, -2.0))
    assert (w / 2).isclose(Bicomplex(0.5, 1.0))
    assert w.conj().isclose(Bicomplex(1.0, -2.0))


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        power(J, -1)
