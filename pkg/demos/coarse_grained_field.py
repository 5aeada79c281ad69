"""The coarse-grained count field and its Gaussian limit.

Normalized counts (N(nz + [0,n)) - n) / sqrt(Var) trace a random path in
the shift z.  For heavy-tailed perturbations this path converges to the
increment process of a fractional Brownian motion: rougher for small a,
smoother for large a, always anticorrelated one box apart.  The script
samples both the finite-n paths and the exact limit field.

Run:  python demos/coarse_grained_field.py
"""

import numpy as np

from hyperbox.estimators import coarse_grained_path, estimate_variance_growth
from hyperbox.gaussian_limit import rv1d_kernel, sample_limit_field
from hyperbox.samplers import perturbed_heavy

SEED = 41
N = 500.0


def sparkline(values, width=61):
    marks = " .:-=+*#%@"
    lo, hi = values.min(), values.max()
    span = (hi - lo) or 1.0
    idx = np.linspace(0, len(values) - 1, width).astype(int)
    return "".join(marks[int((values[i] - lo) / span * (len(marks) - 1))]
                   for i in idx)


def main():
    zgrid = np.arange(-2.0, 2.0001, 0.05)
    for s, a in ((0.75, 0.25), (0.25, 0.75)):
        proc = perturbed_heavy(s)
        var = estimate_variance_growth(proc, [N], 400, SEED).var_hat[0]
        path = coarse_grained_path(proc, N, zgrid, SEED, replica=1, var_ref=var)
        print(f"a = {a} (tail s = {s}), one replica at n = {N:.0f}:")
        print("  " + sparkline(path))

        kern = rv1d_kernel(a)
        limit = sample_limit_field(kern, zgrid, SEED, 1)[0]
        print("  exact limit field (same kernel):")
        print("  " + sparkline(limit))
        c01 = kern.cov(1.0)
        print(f"  kernel cov at lag 1: {c01:+.4f} (negative: neighbouring "
              f"boxes compensate each other)\n")


if __name__ == "__main__":
    main()
