from fractions import Fraction

import numpy as np
import pytest

from transmute.errors import ConfigError, JetError
from transmute.grid import GridFunction, potential_of
from transmute.potentials import (
    BUILTINS,
    SampledPotential,
    builtin_names,
    constant_potential,
    exp_jet,
    parse_potential,
)
from transmute.spps import particular_solution


def test_every_builtin_builds_a_basis():
    for name, potential in BUILTINS.items():
        b = 0.5 if potential.max_b is not None else 1.0
        q = potential.grid(b, 201)
        assert q.n_points == 201
        family = potential.basis(b, 2, 201)
        assert family.order == 2
        assert potential.name == name


def test_builtin_field_defaults():
    potential = constant_potential("2")
    assert potential.reference is None
    assert potential.inverse_reference is None
    assert potential.max_b is None


def test_builtin_lookup():
    assert parse_potential("builtin:cosh") is BUILTINS["cosh"]
    assert "const:<c>" in builtin_names()


def test_unknown_builtin():
    with pytest.raises(ConfigError):
        parse_potential("builtin:gaussian")


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_potential("/nonexistent/q.csv")


def test_constant_potential_is_exact():
    potential = parse_potential("builtin:const:3/2")
    jet = potential.jet(4)
    assert jet.h == Fraction(3, 2)
    assert jet.derivs == [Fraction(9, 4), 0, 0, 0]
    f, h = potential.particular(1.0, 101)
    assert h == 1.5
    assert np.allclose(f.values, np.exp(1.5 * f.nodes))


def test_unparseable_constant():
    with pytest.raises(ConfigError):
        constant_potential("abc")


def test_model_needs_short_interval():
    with pytest.raises(ConfigError):
        BUILTINS["model"].basis(1.0, 3, 101)
    with pytest.raises(ConfigError):
        BUILTINS["cosh"].basis(-1.0, 3, 101)


def test_builtin_particular_solutions_solve_their_equation():
    for name in ("cosh", "sech", "exp"):
        potential = BUILTINS[name]
        f, h = potential.particular(1.0, 2001)
        q_f = potential_of(f).values[5:-5]
        q = potential.grid(1.0, 2001).values[5:-5]
        assert np.allclose(q_f, q, atol=1e-6), name
        assert f.at_zero() == pytest.approx(1.0)


def test_exp_slope_matches_integration():
    potential = BUILTINS["exp"]
    f, _ = particular_solution(potential.grid(1.0, 2001), h=potential.h)
    assert np.allclose(f.values, potential.f(f.nodes), atol=1e-9)
    assert exp_jet(3).h == pytest.approx(potential.h)


def test_sampled_potential(tmp_path):
    path = tmp_path / "q.csv"
    GridFunction.from_callable(np.cos, 1.0, 201).to_csv(str(path))
    potential = parse_potential(str(path))
    assert isinstance(potential, SampledPotential)
    q = potential.grid(1.0, 999)
    assert q.n_points == 201
    with pytest.raises(ConfigError):
        potential.grid(2.0)
    with pytest.raises(JetError):
        potential.jet(3)
    family = potential.basis(1.0, 3)
    assert family.order == 3
    assert potential.reference is None
    assert potential.inverse_reference is None


def test_malformed_file(tmp_path):
    path = tmp_path / "q.csv"
    path.write_text("x,re\n-1,0\n0.3,1\n1,2\n")
    with pytest.raises(ConfigError):
        parse_potential(str(path))
