"""Tour of the three limiting covariance structures.

The normalized covariance between counts in a box and in its shifted copy
converges, as boxes grow, to a limit that depends on the pair-correlation
tails in exactly one of three ways.  This script prints each regime next
to the exact finite-box ratio it is the limit of.

Run:  python demos/cov_structures.py
"""

import numpy as np

from hyperbox import (cov_finite_1d, cov_integrable, cov_rv_1d,
                      power_law_mixture_model, pyramidal_model, var_finite_1d)


def main():
    print("1. Integrable tails: the limit only sees shared box faces.")
    print("   d=2 examples: shift (0,0) ->", cov_integrable([0, 0]),
          " shift (1,0) ->", cov_integrable([1, 0]),
          " shift (0,0.5) ->", cov_integrable([0, 0.5]))
    print("   Any interior shift without a face contact gives zero:",
          cov_integrable([0.5, 0.3]))

    print("\n2. Compactly supported correlations hit the limit exactly once the")
    print("   box dwarfs the support; slowly decaying ones crawl there:")
    model = pyramidal_model(4)
    for n in (32.0, 8000.0):
        ratio = cov_finite_1d(model, n, 1.0) / var_finite_1d(model, n)
        print(f"   uniform-4 lattice  n={n:7.0f}:  cov(1) ratio = {ratio:+.6f}")
    from hyperbox import sine2_model
    s2 = sine2_model()
    for n in (1e2, 1e4, 1e6):
        ratio = cov_finite_1d(s2, n, 1.0) / var_finite_1d(s2, n)
        print(f"   sine2 (log tails)  n={n:7.0f}:  cov(1) ratio = {ratio:+.6f}"
              "   (limit -0.5)")

    print("\n3. Heavier tails interpolate toward Poisson: cov(z) ="
          " |z-1|^a/2 + |z+1|^a/2 - |z|^a")
    for a in (0.1, 0.5, 0.9):
        vals = ", ".join(f"cov({z:g})={cov_rv_1d(z, a):+.4f}"
                         for z in (0.5, 1.0, 2.0))
        print(f"   a={a}: {vals}")

    print("\n4. The mixture of pyramid widths realizes any exponent a;"
          " its exact finite-n ratios approach the a-kernel:")
    mix = power_law_mixture_model(0.5)
    n = 2.0 ** 14
    var = var_finite_1d(mix, n)
    for z in (0.5, 1.0, 2.0):
        ratio = cov_finite_1d(mix, n, z) / var
        print(f"   z={z}:  finite ratio {ratio:+.5f}   limit "
              f"{cov_rv_1d(z, 0.5):+.5f}")


if __name__ == "__main__":
    main()
