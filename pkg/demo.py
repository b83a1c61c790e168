"""
Demo script: eigenvalues of -y'' + eˣ y = ω² y on [0, π] with Dirichlet
conditions, computed from a Goursat-fitted transmutation kernel.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from transmute.spectral import find_eigenvalues
from transmute.validation import EXP_EIGENVALUES, exp_problem


def demo_eigenvalues(count: int = 50):
    """Fit the kernel, then find and compare the first eigenvalues."""
    print("📐 Transmutation Kernel Demo")
    print("=" * 50)

    print("Building the basis and fitting the kernel (N = 30)...")
    try:
        problem = exp_problem(N=30)
        print("✅ Kernel fitted successfully!")
    except Exception as e:
        print(f"❌ Error: {e}")
        return

    kernel = problem.kernel
    print(f"\nMethod: {kernel.method}  eps1 = {kernel.eps1:.2e}  eps2 = {kernel.eps2:.2e}")
    if kernel.fallback:
        print("⚠️ Remez did not converge, least-squares coefficients used")

    print(f"\nSearching for the first {count} eigenvalues...")
    results = find_eigenvalues(problem, count)
    if not results.complete:
        print(f"⚠️ Only {len(results)} eigenvalues found in the search window")

    print("\n" + "=" * 50)
    print("EIGENVALUES")
    print("=" * 50)
    print(f"{'n':>5}  {'omega^2':>22}  {'published':>22}  {'error':>9}")
    for result in results:
        expected = EXP_EIGENVALUES.get(result.index)
        if expected is None and result.index > 5:
            continue
        line = f"{result.index:>5}  {result.omega_sq:>22.15g}"
        if expected is not None:
            line += f"  {expected:>22.15g}  {abs(result.omega_sq - expected):>9.2e}"
        print(line)

    print("\n" + "=" * 50)
    print("Demo completed!")
    print("Try: transmute eigen --potential builtin:exp --b pi --N 30 --count 1000")


if __name__ == "__main__":
    demo_eigenvalues()
