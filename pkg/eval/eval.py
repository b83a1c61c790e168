"""
Evaluation script for the transmutation kernels.
Recomputes the published tables and prints convergence of the kernel
approximations with the truncation order N.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from transmute.kernels import fit_goursat, goursat_targets, kernel_from_taylor, mesh_error, reference
from transmute.potentials import BUILTINS
from transmute.validation import run_validation, summarize


def taylor_convergence(name: str, b: float, orders: list, n_points: int = 2001) -> list:
    """
    Mesh error of the Taylor-method kernel for each N.

    Args:
        name: Builtin potential with a closed-form kernel
        b: Half-length of the interval
        orders: Truncation orders to try

    Returns:
        List of (N, error) pairs
    """
    potential = BUILTINS[name]
    family = potential.basis(b, max(orders), n_points)
    exact = reference(potential.reference)
    rows = []
    for N in orders:
        kernel = kernel_from_taylor(family, potential.jet(N), N)
        rows.append((N, mesh_error(kernel, exact, b)))
    return rows


def goursat_convergence(name: str, b: float, orders: list, n_points: int = 2001) -> list:
    """Mesh errors of the Remez and least-squares Goursat fits for each N."""
    potential = BUILTINS[name]
    family = potential.basis(b, max(orders), n_points)
    g1, g2 = goursat_targets(potential.grid(b, n_points), family.h)
    exact = reference(potential.reference)
    rows = []
    for N in orders:
        remez = fit_goursat(family, g1, g2, N, method="remez")
        lsq = fit_goursat(family, g1, g2, N, method="least_squares")
        rows.append((N, mesh_error(remez, exact, b), mesh_error(lsq, exact, b)))
    return rows


def run_evaluation(suites=None):
    """Run the validation suites and the convergence studies."""
    print("📐 Transmutation Kernel Evaluation")
    print("=" * 50)

    print("Running validation suites...")
    try:
        report = run_validation(suites)
    except Exception as e:
        print(f"❌ Error running validation: {e}")
        return
    print(summarize(report))
    for suite, seconds in report.seconds.items():
        print(f"  {suite}: {seconds:.1f}s")

    print("\n" + "=" * 50)
    print("TAYLOR METHOD, K_cosh on b = 2")
    print("=" * 50)
    for N, error in taylor_convergence("cosh", 2.0, [3, 5, 7, 9, 11, 13, 15, 17, 19]):
        print(f"N = {N:>2}  mesh error = {error:.3e}")

    print("\n" + "=" * 50)
    print("GOURSAT FIT, K_sech on b = 2")
    print("=" * 50)
    print(f"{'N':>4}  {'remez':>10}  {'least squares':>14}")
    for N, remez, lsq in goursat_convergence("sech", 2.0, [5, 7, 9, 11, 13]):
        print(f"{N:>4}  {remez:>10.3e}  {lsq:>14.3e}")

    print("\n" + "=" * 50)
    if report.passed:
        print("✅ All published values reproduced!")
    else:
        print(f"❌ {len(report.failures)} checks failed:")
        for item in report.failures:
            print(f"  {item.suite} {item.name}: expected {item.expected}, got {item.actual}")


if __name__ == "__main__":
    run_evaluation(sys.argv[1:] or None)
