"""Covariance structure of box counts for hyperuniform processes.

Two layers live here:

* exact finite-box identities driven by a model's tail function
  (``cov_finite_1d`` / ``cov_finite_2d`` and the matching variances) --
  these are inclusion-exclusion sums of the cumulative G over rectangles
  anchored at the origin;
* the three limiting covariance structures the finite ratios converge to:
  the face-overlap form for integrable models, the fractional-increment
  kernel in d = 1, and the two-exponent regularly-varying kernel in d = 2.

All limits are normalized so cov(0) = 1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .beta_models import cumulative_G
from .geometry import as_shift, shared_face_measure


class TheoryError(ValueError):
    """Out-of-contract argument to a covariance formula."""


# ---------------------------------------------------------------------------
# limiting structures
# ---------------------------------------------------------------------------

def cov_integrable(shift):
    """Limit covariance under an integrable first moment: face overlap / 2d.

    Positive sign when the open boxes intersect, negative when they only
    touch; exactly 1 at z = 0.  Exact-type friendly: Fraction coordinates
    give a Fraction back.
    """
    shift = as_shift(shift)
    measure, interiors_overlap = shared_face_measure(shift)
    signed = measure if interiors_overlap else -measure
    return signed / (2 * shift.d)


def cov_rv_1d(z, a):
    """d = 1 limit covariance for variance exponent a in [0, 1].

    For a > 0 this is |z-1|^a/2 + |z+1|^a/2 - |z|^a, the increment kernel
    of a fractional Brownian motion with Hurst index a/2.  The slowly
    varying case a = 0 degenerates to atoms: 1 at 0 and -1/2 at +-1.
    """
    if not 0.0 <= a <= 1.0:
        raise TheoryError(f"variance exponent a must lie in [0, 1], got {a}")
    z = np.asarray(z, dtype=float)
    if a == 0.0:
        out = np.where(z == 0.0, 1.0, np.where(np.abs(z) == 1.0, -0.5, 0.0))
        return float(out) if out.ndim == 0 else out
    out = 0.5 * np.abs(z - 1.0) ** a + 0.5 * np.abs(z + 1.0) ** a - np.abs(z) ** a
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RV2DParams:
    """Parameters of the d = 2 limiting kernel.

    ``g_plus`` / ``g_minus`` are the angular profiles of the two cumulative
    growth functions on the quarter circle, as functions of the angle
    theta in [0, pi/2]; ``a_plus`` / ``a_minus`` the matching homogeneity
    exponents, and ``K_plus`` the limit ratio of the two growth functions
    on the diagonal.  Normalization: g(pi/4) = 2^{-a/2}, so the diagonal
    profile value at (1,1) is exactly 1.

    ``g_minus`` is not required to be swap-symmetric: the kernel evaluator
    keeps track of which coordinate the orientation flip acts on, so
    asymmetric profiles (which the pyramid mixtures genuinely have) are
    handled exactly.  ``g_minus_asymmetry`` records the measured deviation.
    """

    a_plus: float
    a_minus: float
    g_plus: object
    g_minus: object
    K_plus: float
    K_minus: float = -1.0
    g_minus_asymmetry: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.a_plus <= self.a_minus <= 2.0:
            raise TheoryError(
                f"need 0 <= a_plus <= a_minus <= 2, got ({self.a_plus}, {self.a_minus})")
        if self.K_minus != -1.0:
            raise TheoryError("K_minus is fixed at -1 by the variance normalization")
        if not np.isfinite(self.K_plus) or self.K_plus < 0.0:
            raise TheoryError(f"K_plus must be finite and >= 0, got {self.K_plus}")
        quarter = math.pi / 4.0
        for name, g, a in (("g_plus", self.g_plus, self.a_plus),
                           ("g_minus", self.g_minus, self.a_minus)):
            probe = np.linspace(0.05, math.pi / 2 - 0.05, 19)
            vals = np.array([float(g(t)) for t in probe])
            if np.any(vals <= 0.0):
                raise TheoryError(f"{name} must be positive on the open quarter circle")
            if abs(float(g(quarter)) - 2.0 ** (-a / 2.0)) > 1e-2:
                raise TheoryError(
                    f"{name}(pi/4) must equal 2^(-a/2) (diagonal normalization)")

    def profile_plus(self, w1, w2):
        r = math.hypot(w1, w2)
        return r ** self.a_plus * float(self.g_plus(math.atan2(w2, w1)))

    def profile_minus(self, w1, w2):
        r = math.hypot(w1, w2)
        return r ** self.a_minus * float(self.g_minus(math.atan2(w2, w1)))


# stencil of the four-square inclusion-exclusion: center 4, edges -2, corners +1
_STENCIL = [(i, j, 4 if (i == 0 and j == 0) else (-2 if (i == 0 or j == 0) else 1))
            for i in (-1, 0, 1) for j in (-1, 0, 1)]


def cov_rv_2d(shift, params):
    """d = 2 limit covariance for a regularly-varying model.

    Evaluates the nine-term shifted-square stencil with each term mapped to
    the growth profile matching its quadrant signature: both coordinates
    positive uses K_plus * profile_plus; a negative first (resp. second)
    coordinate uses -profile_minus with the flipped coordinate first; the
    doubly negative corner is merged with the overlap-area term, which
    cancels its volume part exactly.  At z = 0 returns 1 by normalization.
    """
    shift = as_shift(shift)
    if shift.d != 2:
        raise TheoryError(f"cov_rv_2d needs d = 2, got d = {shift.d}")
    z1, z2 = (abs(float(c)) for c in shift.z)
    if z1 == 0.0 and z2 == 0.0:
        return 1.0
    total = 0.0
    for i, j, c in _STENCIL:
        w1, w2 = z1 + i, z2 + j
        if w1 == 0.0 or w2 == 0.0:
            continue
        if w1 > 0.0 and w2 > 0.0:
            val = params.K_plus * params.profile_plus(w1, w2)
        elif w1 < 0.0 and w2 > 0.0:
            val = -params.profile_minus(-w1, w2)
        elif w1 > 0.0 and w2 < 0.0:
            val = -params.profile_minus(-w2, w1)
        else:
            # only the (-1,-1) corner can reach here (z >= 0); the box-overlap
            # area cancels against the constant part of the doubly-reflected
            # tail, leaving the three reflected profiles
            val = (-params.K_plus * params.profile_plus(-w1, -w2)
                   - params.profile_minus(-w1, -w2)
                   - params.profile_minus(-w2, -w1))
        total += c * val
    return total / -4.0


# ---------------------------------------------------------------------------
# exact finite-box identities
# ---------------------------------------------------------------------------

def _model_mass(model):
    if model.mass is not None:
        return float(model.mass)
    from .beta_models import hyperuniformity_check
    return hyperuniformity_check(model)[0]


def cov_finite_1d(model, n, z):
    """Cov(count([0,n]), count(nz + [0,n])) from the model's cumulative G.

    For a hyperuniform model this is the pure tail-integral identity
    -2 G(n|z|) + G(n||z|-1|) + G(n(|z|+1)); the (1 + mass) correction term
    vanishes there and restores the Lebesgue overlap for non-hyperuniform
    models such as the zero measure (Poisson).
    """
    if model.d != 1:
        raise TheoryError(f"cov_finite_1d needs a d = 1 model, got d = {model.d}")
    if n <= 0:
        raise TheoryError(f"box side n must be positive, got {n}")
    az = abs(float(z))
    G = model.cumulative
    lebesgue = (1.0 + _model_mass(model)) * n * max(0.0, 1.0 - az)
    return lebesgue - 2.0 * G(n * az) + G(n * abs(az - 1.0)) + G(n * (az + 1.0))


def var_finite_1d(model, n):
    """Var(count([0,n])) = (1 + mass) n + 2 G(n); the first term is 0 when
    the model is hyperuniform."""
    if model.d != 1:
        raise TheoryError(f"var_finite_1d needs a d = 1 model, got d = {model.d}")
    if n < 0:
        raise TheoryError(f"box side n must be nonnegative, got {n}")
    return (1.0 + _model_mass(model)) * float(n) + 2.0 * model.cumulative(float(n))


def _rect_integral(model, u, v, mass):
    """Signed integral of the tail over the rectangle spanned by 0 and (u, v).

    Orientation '-' of the cumulative flips the first coordinate; the
    (+,-) signature is folded onto it through the model's coordinate-swap
    symmetry, and the doubly negative case is reduced with the quadrant
    identity (whose constant is the model's total mass).
    """
    if u == 0.0 or v == 0.0:
        return 0.0
    au, av = abs(u), abs(v)
    if u > 0.0 and v > 0.0:
        return cumulative_G(model, (au, av), "+")
    if u < 0.0 and v > 0.0:
        return -cumulative_G(model, (au, av), "-")
    if u > 0.0 and v < 0.0:
        return -cumulative_G(model, (av, au), "-")
    return (mass * au * av - cumulative_G(model, (au, av), "+")
            - cumulative_G(model, (au, av), "-")
            - cumulative_G(model, (av, au), "-"))


def cov_finite_2d(model, n, z):
    """Cov(count([0,n]^2), count(nz + [0,n]^2)) by the nine-term identity."""
    if model.d != 2:
        raise TheoryError(f"cov_finite_2d needs a d = 2 model, got d = {model.d}")
    if not model.swap_symmetric:
        raise TheoryError("the 2-D identity requires a coordinate-swap-symmetric model")
    if n <= 0:
        raise TheoryError(f"box side n must be positive, got {n}")
    z = np.abs(np.asarray(z, dtype=float))
    if z.shape != (2,):
        raise TheoryError(f"z must be a pair, got shape {z.shape}")
    z1, z2 = float(z[0]), float(z[1])
    mass = _model_mass(model)
    total = n * n * max(0.0, 1.0 - z1) * max(0.0, 1.0 - z2)
    for i, j, c in _STENCIL:
        total += c * _rect_integral(model, n * (z1 + i), n * (z2 + j), mass)
    return total


def var_finite_2d(model, n):
    """Var(count([0,n]^2)) = (1 + mass) n^2 - 4 G_-(n, n)."""
    if model.d != 2:
        raise TheoryError(f"var_finite_2d needs a d = 2 model, got d = {model.d}")
    if n < 0:
        raise TheoryError(f"box side n must be nonnegative, got {n}")
    if n == 0:
        return 0.0
    n = float(n)
    return ((1.0 + _model_mass(model)) * n * n
            - 4.0 * cumulative_G(model, (n, n), "-"))


def var_slope_integrable(model):
    """Leading variance coefficient -d * int |y_1| beta(dy) (integrable case).

    Var(count) ~ this * n^{d-1}; for a pyramid of width m it is d * m / 3.
    """
    if not model.integrable_first_moment:
        raise TheoryError(
            f"model {model.kind!r} does not assert an integrable first moment")
    if model.first_moment is None:
        raise TheoryError("model asserts integrability but carries no first moment")
    return -model.d * float(model.first_moment)


# ---------------------------------------------------------------------------
# fitting the d = 2 kernel parameters from a model
# ---------------------------------------------------------------------------

def _interp_profile(thetas, values):
    from scipy.interpolate import PchipInterpolator
    spline = PchipInterpolator(np.asarray(thetas, float), np.asarray(values, float),
                               extrapolate=False)
    lo, hi = thetas[0], thetas[-1]

    def g(theta):
        return float(spline(min(max(theta, lo), hi)))

    return g


def fit_rv2d_params(model, n_fit=2 ** 14, n_lo=2 ** 10, n_theta=129):
    """Fit (a_+-, g_+-, K_+) from a model's cumulative growth functions.

    Exponents come from diagonal log-ratios between ``n_lo`` and ``n_fit``,
    the angular profiles from sweeping the quarter circle at radius
    ``n_fit``, normalized by the diagonal value.  Both profiles vanish at
    the axes, which pins the interpolation endpoints.
    """
    if model.d != 2:
        raise TheoryError(f"fit_rv2d_params needs a d = 2 model, got d = {model.d}")
    g_diag = {o: cumulative_G(model, (n_fit, n_fit), o) for o in "+-"}
    g_diag_lo = {o: cumulative_G(model, (n_lo, n_lo), o) for o in "+-"}
    span = math.log(n_fit / n_lo)
    a_plus = math.log(g_diag["+"] / g_diag_lo["+"]) / span
    a_minus = math.log(g_diag["-"] / g_diag_lo["-"]) / span
    K_plus = g_diag["+"] / g_diag["-"]

    thetas = np.linspace(0.0, math.pi / 2.0, n_theta)
    prof = {"+": np.zeros(n_theta), "-": np.zeros(n_theta)}
    for k in range(1, n_theta - 1):
        x = (n_fit * math.cos(thetas[k]), n_fit * math.sin(thetas[k]))
        for o in "+-":
            prof[o][k] = cumulative_G(model, x, o) / g_diag[o]
    gm = prof["-"][1:-1]
    asym = float(np.max(np.abs(gm - gm[::-1]) / np.maximum(gm, gm[::-1])))
    return RV2DParams(a_plus=a_plus, a_minus=a_minus,
                      g_plus=_interp_profile(thetas, prof["+"]),
                      g_minus=_interp_profile(thetas, prof["-"]),
                      K_plus=K_plus, g_minus_asymmetry=asym)
