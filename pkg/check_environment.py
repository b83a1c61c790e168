#!/usr/bin/env python3
"""
Environment check for the transmutation kernel package.

Beyond importing the numerical stack, each check runs the routine the
package depends on once: the DOP853 integrator, pivoted QR and a small
Goursat fit compared with the closed-form cosh kernel.
"""

import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

MIN_PYTHON = (3, 9)
MAX_NUMPY_MAJOR = 1


def check_python_version():
    """Python 3.9 or newer."""
    ok = sys.version_info >= MIN_PYTHON
    status = "✅" if ok else "❌"
    required = ".".join(map(str, MIN_PYTHON))
    print(f"{status} Python {sys.version.split()[0]} (need >= {required})")
    return ok


def check_numpy():
    """numpy 1.x with float64 machine epsilon."""
    import numpy as np

    major = int(np.__version__.split(".")[0])
    ok = major <= MAX_NUMPY_MAJOR and np.finfo(float).eps == 2.0 ** -52
    status = "✅" if ok else "❌"
    print(f"{status} numpy {np.__version__} (need < {MAX_NUMPY_MAJOR + 1})")
    return ok


def check_integrator():
    """solve_ivp with DOP853 reproduces cosh(1) from y'' = y."""
    import numpy as np
    import scipy
    from scipy.integrate import solve_ivp

    sol = solve_ivp(
        lambda x, y: [y[1], y[0]],
        (0.0, 1.0),
        [1.0, 0.0],
        method="DOP853",
        rtol=1e-13,
        atol=1e-15,
    )
    error = abs(sol.y[0, -1] - np.cosh(1.0)) if sol.success else float("inf")
    ok = error < 1e-11
    status = "✅" if ok else "❌"
    print(f"{status} scipy {scipy.__version__}: DOP853 error {error:.1e}")
    return ok


def check_pivoted_qr():
    """qr(pivoting=True) exposes a dependent column as a vanishing pivot."""
    import numpy as np
    from scipy.linalg import qr

    x = np.linspace(-1.0, 1.0, 50)
    A = np.column_stack([np.ones_like(x), x, x ** 2, 3.0 * x])
    _, R, perm = qr(A, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(R))
    ok = sorted(perm) == [0, 1, 2, 3] and pivots[-1] <= 1e-12 * pivots[0]
    status = "✅" if ok else "❌"
    print(f"{status} pivoted QR: last pivot {pivots[-1]:.1e}")
    return ok


def check_kernel():
    """A Goursat fit of K_cosh on [-0.5, 0.5] against the closed form."""
    try:
        from transmute.kernels import fit_goursat, goursat_targets, mesh_error, reference
        from transmute.potentials import BUILTINS

        potential = BUILTINS["cosh"]
        family = potential.basis(0.5, 4, 201)
        g1, g2 = goursat_targets(potential.grid(0.5, 201), family.h)
        kernel = fit_goursat(family, g1, g2, 4, method="remez")
        error = mesh_error(kernel, reference("cosh"), 0.5, n=21, threads=1)
    except Exception as e:
        print(f"❌ transmute kernel fit failed: {e}")
        return False
    ok = error < 1e-5
    status = "✅" if ok else "❌"
    print(f"{status} transmute kernel fit: mesh error {error:.1e}")
    return ok


def check_settings():
    """Settings from the environment and .env."""
    try:
        from transmute.config import get_settings

        settings = get_settings()
    except Exception as e:
        print(f"❌ transmute settings: {e}")
        return False
    print(
        f"✅ settings: threads={settings.threads} "
        f"n_points={settings.n_points} log_level={settings.log_level}"
    )
    return True


CHECKS = [
    check_python_version,
    check_numpy,
    check_integrator,
    check_pivoted_qr,
    check_kernel,
    check_settings,
]


def main():
    """Run every check; the exit code is the number of failures."""
    print("🔍 Transmutation Kernels - Environment Check")
    print("=" * 50)
    failed = [check.__name__ for check in CHECKS if not check()]
    print("=" * 50)
    if failed:
        print(f"❌ {len(failed)} check(s) failed: {', '.join(failed)}")
        print("Reinstall with: pip install -r requirements.txt")
    else:
        print("✅ Environment ready. Next: pytest -m \"not slow\"")
    return len(failed)


if __name__ == "__main__":
    sys.exit(main())
