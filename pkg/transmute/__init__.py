"""
Transmutation kernels for Schrödinger operators and the Sturm-Liouville
eigenvalue solver built on them.
"""

from .bicomplex import Bicomplex
from .grid import BasisFamily, GridFunction, build_basis_family, indefinite_integral
from .spps import particular_solution, spps_evaluate
from .wave_polynomials import formal_power, generalized_wave_polynomial, wave_polynomial
from .taylor import (
    PotentialJet,
    enumerate_parameter_lists,
    expansion_coefficients,
    kernel_derivatives_at_origin,
    s_direct,
    s_table_recurrent,
)
from .kernels import (
    KernelApproximation,
    change_parameter,
    darboux_kernel,
    fit_goursat,
    goursat_targets,
    kernel_from_taylor,
    reference_kernel,
    vekua_residual,
)
from .spectral import SpectralProblem, extend_potential, find_eigenvalues, s_N, sine_moment
from .potentials import parse_potential
from .errors import TransmuteError

__all__ = [
    'Bicomplex',
    'BasisFamily',
    'GridFunction',
    'build_basis_family',
    'indefinite_integral',
    'particular_solution',
    'spps_evaluate',
    'formal_power',
    'generalized_wave_polynomial',
    'wave_polynomial',
    'PotentialJet',
    'enumerate_parameter_lists',
    'expansion_coefficients',
    'kernel_derivatives_at_origin',
    's_direct',
    's_table_recurrent',
    'KernelApproximation',
    'change_parameter',
    'darboux_kernel',
    'fit_goursat',
    'goursat_targets',
    'kernel_from_taylor',
    'reference_kernel',
    'vekua_residual',
    'SpectralProblem',
    'extend_potential',
    'find_eigenvalues',
    's_N',
    'sine_moment',
    'parse_potential',
    'TransmuteError',
]
