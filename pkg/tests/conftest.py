"""Shared basis families; building them is the expensive part of most tests."""

import pytest

from transmute.potentials import BUILTINS


@pytest.fixture(scope="session")
def zero_family():
    """q = 0, f = 1 on [-1, 1]: φₖ = ψₖ = xᵏ."""
    return BUILTINS["zero"].basis(1.0, 25, 2001)


@pytest.fixture(scope="session")
def cosh_family():
    """q = 1, f = cosh x on [-1, 1]."""
    return BUILTINS["cosh"].basis(1.0, 21, 2001)


@pytest.fixture(scope="session")
def model_family():
    """q = 0, f = x + 1 on [-0.5, 0.5]."""
    return BUILTINS["model"].basis(0.5, 6, 1001)
