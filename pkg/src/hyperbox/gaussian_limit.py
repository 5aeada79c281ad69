"""The limiting Gaussian field of the coarse-grained count process.

The normalized counts converge (under Brillinger mixing) to a centred
stationary Gaussian field whose covariance is one of the limit kernels
from :mod:`hyperbox.theory`.  In d = 1 with variance exponent a > 0 the
field is the unit-lag increment process of a fractional Brownian motion
with Hurst index a/2, which gives an exact identity between the increment
covariance and the limit kernel -- tested to float precision.

Sampling is by dense symmetric square-root factorization of the Gram
matrix: grids are capped at 4096 points, where an O(N^3) eigendecomposition
is trivial and sidesteps the nonnegativity failures circulant embeddings
hit for a < 1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .samplers import _as_seed, _stream
from .theory import cov_integrable, cov_rv_1d, cov_rv_2d

_GRID_CAP = 4096


class KernelError(ValueError):
    pass


class NotPositiveSemidefinite(KernelError):
    def __init__(self, most_negative, trace):
        super().__init__(
            f"Gram matrix fails the PSD tolerance: most negative eigenvalue "
            f"{most_negative:.3e} against trace {trace:.3e}")
        self.most_negative = most_negative


def fbm_cov(hurst, s, t):
    """Fractional Brownian motion covariance (|s|^2H + |t|^2H - |s-t|^2H)/2."""
    if not 0.0 < hurst <= 1.0:
        raise KernelError(f"Hurst index must be in (0, 1], got {hurst}")
    h2 = 2.0 * hurst
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    out = 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(s - t) ** h2)
    return float(out) if out.ndim == 0 else out


def increment_cov(hurst, z, w):
    """Covariance of unit-lag fBM increments at z and w.

    Equals the d = 1 limit kernel at lag z - w with exponent a = 2H,
    identically in (z, w).
    """
    return (fbm_cov(hurst, np.asarray(z) + 1.0, np.asarray(w) + 1.0)
            - fbm_cov(hurst, np.asarray(z) + 1.0, w)
            - fbm_cov(hurst, z, np.asarray(w) + 1.0)
            + fbm_cov(hurst, z, w))


@dataclass(frozen=True)
class LimitKernel:
    """A limit covariance kernel cov(z) usable for Gaussian-field sampling."""

    family: str                # 'integrable' | 'rv1d' | 'rv2d'
    d: int
    a: float = None
    params: object = None      # RV2DParams for the rv2d family

    def __post_init__(self):
        if self.family not in ("integrable", "rv1d", "rv2d"):
            raise KernelError(f"unknown kernel family {self.family!r}")
        if self.family == "rv1d":
            if self.d != 1:
                raise KernelError("rv1d kernel is one-dimensional")
            if self.a is None or not 0.0 <= self.a <= 1.0:
                raise KernelError(f"rv1d needs a in [0, 1], got {self.a}")
        if self.family == "rv2d":
            if self.d != 2:
                raise KernelError("rv2d kernel is two-dimensional")
            if self.params is None:
                raise KernelError("rv2d kernel needs fitted RV2DParams")

    def cov(self, z):
        if self.family == "integrable":
            return float(cov_integrable(np.atleast_1d(np.asarray(z, dtype=float))))
        if self.family == "rv1d":
            return float(cov_rv_1d(float(np.asarray(z).reshape(())), self.a))
        return float(cov_rv_2d(np.asarray(z, dtype=float), self.params))

    def is_discontinuous(self):
        """Kernels with atoms: the integrable case and the a = 0 boundary."""
        return self.family == "integrable" or (self.family == "rv1d" and self.a == 0.0)

    def gram(self, zgrid):
        zgrid = np.asarray(zgrid, dtype=float)
        pts = zgrid.reshape(len(zgrid), -1)
        if pts.shape[1] != self.d:
            raise KernelError(f"grid dimension {pts.shape[1]} != kernel d = {self.d}")
        n = len(pts)
        gram = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                gram[i, j] = gram[j, i] = self.cov(pts[i] - pts[j])
        return gram


def integrable_kernel(d=1):
    return LimitKernel(family="integrable", d=d)


def rv1d_kernel(a):
    return LimitKernel(family="rv1d", d=1, a=a)


def rv2d_kernel(params):
    return LimitKernel(family="rv2d", d=2, params=params)


_SAMPLE_PURPOSE = 9


def sample_limit_field(kernel, zgrid, seed, n_paths, clip_fraction=1e-6):
    """Exact Gaussian paths of the kernel on a finite grid.

    Factorizes the Gram matrix as Q sqrt(L) Q^T, clipping tiny negative
    eigenvalues to zero as long as the clipped total stays below
    ``clip_fraction`` of the trace; a genuinely indefinite matrix raises
    with the most negative eigenvalue.  Discontinuous kernels only make
    sense on integer lattices (the limit field has jump discontinuities),
    so off-lattice grids are rejected for them.
    """
    zgrid = np.asarray(zgrid, dtype=float)
    if len(zgrid) > _GRID_CAP:
        raise KernelError(f"grid size {len(zgrid)} exceeds the dense cap {_GRID_CAP}")
    if kernel.is_discontinuous():
        if not np.allclose(zgrid, np.round(zgrid), atol=0.0):
            raise KernelError(
                "this kernel is discontinuous off the integer lattice; sample it on "
                "integer shifts (or use an rv1d kernel with a > 0 for dense grids)")
    gram = kernel.gram(zgrid)
    eigvals, eigvecs = np.linalg.eigh(gram)
    trace = float(np.trace(gram))
    clipped = float(-eigvals[eigvals < 0.0].sum())
    if clipped > clip_fraction * trace:
        raise NotPositiveSemidefinite(float(eigvals.min()), trace)
    root = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    g = _stream(_as_seed(seed), 0, _SAMPLE_PURPOSE)
    noise = g.standard_normal((len(zgrid), int(n_paths)))
    return (root @ noise).T
