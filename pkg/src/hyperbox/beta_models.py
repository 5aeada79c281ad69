"""Catalog of truncated pair correlation measures.

A model here is the signed measure describing pair correlations of a
stationary unit-intensity point process relative to Poisson.  Everything
downstream (finite-box covariances, variance growth, limit kernels)
consumes a model only through two functions:

* the quadrant tail  F(x) = beta([x, inf))            (d = 1)
                     F(x) = beta([x1,inf) x [x2,inf)) (d = 2)
* the cumulative     G(y)        = -int_0^y F                (d = 1)
                     G_or(y1,y2) = int_0^y1 int_0^y2 F(or*x1, x2)  (d = 2)

Catalog entries carry closed forms; the pieces that would need infinite
component sums (power-law mixtures) are completed analytically with
Hurwitz-zeta tails, which keeps them exact for arguments up to the
explicit component range.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import sici, zeta as hurwitz_zeta

from .quadrature import adaptive_simpson, integrate_to_infinity

_EULER = float(np.euler_gamma)

#: default number of explicitly tabulated mixture components
DEFAULT_COMPONENT_CAP = 2 ** 16


class ModelError(ValueError):
    """Invalid model descriptor or out-of-contract evaluation."""


@dataclass(frozen=True)
class TailFunction:
    """Evaluation rule for the quadrant tail F, with provenance."""

    fn: object
    closed_form: bool

    def __call__(self, *args):
        return self.fn(*args)


@dataclass(frozen=True)
class BetaModel:
    d: int
    kind: str
    tail: TailFunction
    cumulative: object                 # G(y) in d=1; G(y1, y2, orientation) in d=2
    mass: object                       # beta(R^d) if known in closed form, else None
    integrable_first_moment: bool
    first_moment: object               # int |y_1| beta(dy) when finite, else None
    reflection_symmetric: bool = True
    swap_symmetric: bool = True
    params: dict = field(default_factory=dict)
    density: object = None

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"BetaModel({self.kind}({ps}), d={self.d})"


# ---------------------------------------------------------------------------
# mixture-of-pyramids machinery
#
# component m is the beta of the Unif([0,m]^d)-perturbed lattice:
#   density -(1/m^{2d}) prod_i (m - |x_i|)_+
# scalar building blocks (x, y >= 0, all exact):
#   j(x; m)   = (1 - x/m)_+^2 / 2            one-coordinate tail integral / m^2
#   kap(t)    = (1 - (1-t)_+^3) / 6          int_0^y j dt = m * kap(y/m)
# ---------------------------------------------------------------------------

def _j(x, m):
    t = 1.0 - np.minimum(np.asarray(x, float) / m, 1.0)
    return 0.5 * t * t


def _kap(t):
    u = 1.0 - np.minimum(np.asarray(t, float), 1.0)
    return (1.0 - u ** 3) / 6.0


@dataclass(frozen=True)
class _PowerLawTail:
    """Analytic remainder sum_{m > m0} C m^{-(2-a)} * <component term>."""

    coeff: float      # C, the un-normalized weight scale
    a: float
    m0: int

    def zsum(self, extra_power, start):
        # sum_{m >= start} C m^{-(2-a) - extra_power}
        return self.coeff * hurwitz_zeta(2.0 - self.a + extra_power, start)


class _Mixture:
    """Weighted pyramids with an optional analytic power-law tail."""

    def __init__(self, ms, ws, tail=None):
        self.ms = np.asarray(ms, dtype=float)
        self.ws = np.asarray(ws, dtype=float)
        self.tail = tail

    # -- d = 1 -------------------------------------------------------------
    def F1(self, x):
        x = float(x)
        if x < 0.0:
            return -1.0 - self.F1(-x)
        out = -float(np.sum(self.ws * _j(x, self.ms)))
        t = self.tail
        if t is not None:
            start = t.m0 + 1 if x <= t.m0 else math.floor(x) + 1
            out -= 0.5 * (t.zsum(0, start) - 2.0 * x * t.zsum(1, start)
                          + x * x * t.zsum(2, start))
        return out

    def G1(self, y):
        y = float(y)
        if y < 0.0:
            raise ModelError("cumulative G is defined for y >= 0")
        out = float(np.sum(self.ws * self.ms * _kap(y / self.ms)))
        t = self.tail
        if t is not None:
            if y <= t.m0:
                start = t.m0 + 1
            else:
                # components in (m0, floor(y)] are saturated at m/6
                sat = np.arange(t.m0 + 1, math.floor(y) + 1, dtype=float)
                out += float(np.sum(t.coeff * sat ** (t.a - 1.0))) / 6.0
                start = math.floor(y) + 1
            out += (0.5 * y * t.zsum(0, start) - 0.5 * y * y * t.zsum(1, start)
                    + y ** 3 / 6.0 * t.zsum(2, start))
        return out

    # -- d = 2 -------------------------------------------------------------
    def _m1(self, x):
        """sum_m w_m j(x; m) for x >= 0."""
        out = float(np.sum(self.ws * _j(x, self.ms)))
        t = self.tail
        if t is not None:
            start = t.m0 + 1 if x <= t.m0 else math.floor(x) + 1
            out += 0.5 * (t.zsum(0, start) - 2.0 * x * t.zsum(1, start)
                          + x * x * t.zsum(2, start))
        return out

    def _m2(self, x1, x2):
        """sum_m w_m j(x1; m) j(x2; m) for x1, x2 >= 0."""
        out = float(np.sum(self.ws * _j(x1, self.ms) * _j(x2, self.ms)))
        t = self.tail
        if t is not None:
            hi = max(x1, x2)
            start = t.m0 + 1 if hi <= t.m0 else math.floor(hi) + 1
            # (1-x1/m)^2 (1-x2/m)^2 / 4 expanded in powers of 1/m
            c = [1.0,
                 -2.0 * (x1 + x2),
                 x1 * x1 + x2 * x2 + 4.0 * x1 * x2,
                 -2.0 * (x1 * x2 * x2 + x1 * x1 * x2),
                 x1 * x1 * x2 * x2]
            out += 0.25 * sum(cp * t.zsum(p, start) for p, cp in enumerate(c))
        return out

    def total_mass(self):
        w = float(np.sum(self.ws))
        if self.tail is not None:
            w += self.tail.zsum(0, self.tail.m0 + 1)
        return w

    def F2(self, x1, x2):
        x1, x2 = float(x1), float(x2)
        if x1 >= 0.0 and x2 >= 0.0:
            return -self._m2(x1, x2)
        if x1 < 0.0 and x2 >= 0.0:
            return -(self._m1(x2) - self._m2(-x1, x2))
        if x1 >= 0.0 and x2 < 0.0:
            return -(self._m1(x1) - self._m2(x1, -x2))
        return -(self.total_mass() - self._m1(-x1) - self._m1(-x2)
                 + self._m2(-x1, -x2))

    def _k1(self, y):
        """sum_m w_m m kap(y/m), the one-coordinate cumulative, y >= 0."""
        out = float(np.sum(self.ws * self.ms * _kap(y / self.ms)))
        t = self.tail
        if t is not None:
            if y > t.m0:
                raise ModelError(
                    f"2-D power-law mixture is tabulated for arguments <= {t.m0}; "
                    f"got {y:g} (increase the explicit component range)")
            start = t.m0 + 1
            out += (0.5 * y * t.zsum(0, start) - 0.5 * y * y * t.zsum(1, start)
                    + y ** 3 / 6.0 * t.zsum(2, start))
        return out

    def _k2(self, y1, y2):
        """sum_m w_m m^2 kap(y1/m) kap(y2/m), y1, y2 >= 0."""
        out = float(np.sum(self.ws * self.ms ** 2 * _kap(y1 / self.ms) * _kap(y2 / self.ms)))
        t = self.tail
        if t is not None:
            if max(y1, y2) > t.m0:
                raise ModelError(
                    f"2-D power-law mixture is tabulated for arguments <= {t.m0}; "
                    f"got {max(y1, y2):g} (increase the explicit component range)")
            start = t.m0 + 1
            c = {1: 0.5, 2: -0.5, 3: 1.0 / 6.0}
            for i in (1, 2, 3):
                for k in (1, 2, 3):
                    out += c[i] * c[k] * y1 ** i * y2 ** k * t.zsum(i + k - 2, start)
        return out

    def G2(self, y1, y2, orientation):
        y1, y2 = float(y1), float(y2)
        if y1 < 0.0 or y2 < 0.0:
            raise ModelError("cumulative G_+- is defined for y >= 0 componentwise")
        if y1 == 0.0 or y2 == 0.0:
            return 0.0
        if orientation == "+":
            return -self._k2(y1, y2)
        if orientation == "-":
            # int_0^y j(-t; m) dt = y - m kap(y/m) per component
            return -(y1 * self._k1(y2) - self._k2(y1, y2))
        raise ModelError(f"orientation must be '+' or '-', got {orientation!r}")


# ---------------------------------------------------------------------------
# catalog constructors
# ---------------------------------------------------------------------------

def _finish_mixture(mix, d, kind, params, first_moment):
    if d == 1:
        tail = TailFunction(mix.F1, closed_form=True)
        cumulative = mix.G1
    elif d == 2:
        tail = TailFunction(mix.F2, closed_form=True)
        cumulative = mix.G2
    else:
        raise ModelError(f"pyramidal mixtures are implemented for d in {{1, 2}}, got d={d}")
    mass = -mix.total_mass()

    def density(*x):
        if len(x) != d:
            raise ModelError(f"density expects {d} coordinates")
        val = 0.0
        for m, w in zip(mix.ms, mix.ws):
            term = w
            for xi in x:
                term = term * np.maximum(m - np.abs(xi), 0.0) / (m * m)
            val = val - term
        return val

    return BetaModel(d=d, kind=kind, tail=tail, cumulative=cumulative, mass=mass,
                     integrable_first_moment=first_moment is not None,
                     first_moment=first_moment, params=params, density=density)


def pyramidal_model(m, d=1):
    """beta of the Unif([0,m]^d) i.i.d. perturbed lattice (integer m >= 1)."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ModelError(f"pyramidal m must be an integer >= 1, got {m!r}")
    mix = _Mixture([m], [1.0])
    return _finish_mixture(mix, d, "pyramidal", {"m": int(m)}, first_moment=-m / 3.0)


def mixture_model(weights, d=1):
    """Explicit finite mixture of pyramids; weights is {m: p_m}.

    Weights must be nonnegative and sum to 1 within 1e-12.
    """
    ms = np.array(sorted(int(m) for m in weights), dtype=float)
    if np.any(ms < 1) or len(ms) == 0:
        raise ModelError("mixture component indices must be integers >= 1")
    ws = np.array([weights[int(m)] for m in ms], dtype=float)
    if np.any(ws < 0):
        raise ModelError("mixture weights must be nonnegative")
    if abs(float(np.sum(ws)) - 1.0) > 1e-12:
        raise ModelError(f"mixture weights must sum to 1 (got {float(np.sum(ws))!r})")
    mix = _Mixture(ms, ws)
    fm = -float(np.sum(ws * ms)) / 3.0
    return _finish_mixture(mix, d, "mixture", {"weights": dict(zip(ms.astype(int).tolist(),
                                                                   ws.tolist()))},
                           first_moment=fm)


def power_law_mixture_model(a, d=1, m_explicit=DEFAULT_COMPONENT_CAP, infinite_tail=True):
    """Mixture with p_m proportional to m^{-(2-a)}, the tail-exponent family.

    With ``infinite_tail`` the weights run over all m >= 1 (normalized by the
    zeta function) and components beyond ``m_explicit`` are summed
    analytically, so evaluations are exact for arguments <= ``m_explicit``.
    Otherwise the catalog is truncated and renormalized over
    m <= ``m_explicit``, matching the sampleable mixture process.
    """
    if not 0.0 < a < 1.0:
        raise ModelError(f"power-law mixture needs a in (0,1), got {a}")
    ms = np.arange(1, m_explicit + 1, dtype=float)
    raw = ms ** (-(2.0 - a))
    if infinite_tail:
        norm = float(hurwitz_zeta(2.0 - a, 1.0))
        mix = _Mixture(ms, raw / norm, tail=_PowerLawTail(1.0 / norm, a, m_explicit))
    else:
        mix = _Mixture(ms, raw / float(np.sum(raw)))
    params = {"a": float(a), "m_explicit": int(m_explicit), "infinite_tail": bool(infinite_tail)}
    # sum m * p_m diverges for a > 0: first moment of |beta| is infinite
    fm = None if infinite_tail else -float(np.sum(mix.ws * mix.ms)) / 3.0
    return _finish_mixture(mix, d, "mixture", params, first_moment=fm)


def sine2_model():
    """The GUE-eigenvalue bulk limit model, d = 1, slowly varying (a = 0).

    Density -sin(pi x)^2 / (pi x)^2; tail and cumulative reduce to the sine
    integral, evaluated by scipy's series/asymptotic implementation.
    """

    def F(x):
        x = float(x)
        if x == 0.0:
            return -0.5
        ax = abs(x)
        si, _ = sici(2.0 * math.pi * ax)
        val = -(0.5 + (math.sin(math.pi * ax) ** 2 / (math.pi * ax) - si) / math.pi)
        return val if x > 0 else -1.0 - val

    def G(y):
        y = float(y)
        if y < 0.0:
            raise ModelError("cumulative G is defined for y >= 0")
        if y == 0.0:
            return 0.0
        zz = 2.0 * math.pi * y
        si, ci = sici(zz)
        return (y / 2.0 + (_EULER + math.log(zz) - ci) / (2.0 * math.pi ** 2)
                - (zz * si + math.cos(zz) - 1.0) / (2.0 * math.pi ** 2))

    def density(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = -(np.sin(math.pi * x) / (math.pi * x)) ** 2
        return np.where(x == 0.0, -1.0, val)

    return BetaModel(d=1, kind="sine2", tail=TailFunction(F, closed_form=True),
                     cumulative=G, mass=-1.0, integrable_first_moment=False,
                     first_moment=None, params={}, density=density)


def perturbation_tail_model(s, scale=1.0):
    """Tail-only model for the lattice perturbed by Unif + symmetric Pareto.

    The displacement noise has density proportional to (1 + |x|/scale)^{-(1+s)};
    the model represents beta through F(x) = -mu([x, inf)), the symmetric tail
    of the noise law, which satisfies the hyperuniform F(x) + F(-x) = -1
    identity exactly and has G regularly varying with exponent a = 1 - s.
    """
    if not 0.0 < s < 1.0:
        raise ModelError(f"perturbation tail exponent must be in (0,1), got {s}")
    if scale <= 0.0:
        raise ModelError("scale must be positive")

    def F(x):
        x = float(x)
        if x >= 0.0:
            return -0.5 * (1.0 + x / scale) ** (-s)
        return -1.0 + 0.5 * (1.0 - x / scale) ** (-s)

    def G(y):
        y = float(y)
        if y < 0.0:
            raise ModelError("cumulative G is defined for y >= 0")
        return scale / (2.0 * (1.0 - s)) * ((1.0 + y / scale) ** (1.0 - s) - 1.0)

    return BetaModel(d=1, kind="perturbation_tail", tail=TailFunction(F, closed_form=True),
                     cumulative=G, mass=-1.0, integrable_first_moment=False,
                     first_moment=None, params={"s": float(s), "scale": float(scale)},
                     density=None)


def general_tail_model(mu_tail, scale=1.0, grid_hint=None):
    """perturbation_tail with a caller-supplied symmetric noise tail.

    ``mu_tail(t)`` must return P(X >= t) for t >= 0 of a symmetric law with
    finite total mass; G falls back to adaptive quadrature (relative 1e-8).
    """

    def F(x):
        x = float(x)
        if x >= 0.0:
            return -float(mu_tail(x))
        return -1.0 + float(mu_tail(-x))

    def G(y):
        y = float(y)
        if y < 0.0:
            raise ModelError("cumulative G is defined for y >= 0")
        if y == 0.0:
            return 0.0
        return adaptive_simpson(lambda t: float(mu_tail(t)), 0.0, y,
                                abs_tol=1e-12, rel_tol=1e-8)

    return BetaModel(d=1, kind="perturbation_tail", tail=TailFunction(F, closed_form=False),
                     cumulative=G, mass=-1.0, integrable_first_moment=False,
                     first_moment=None, params={"scale": scale}, density=None)


def zero_model(d=1):
    """The zero measure: Poisson pair correlations (not hyperuniform)."""
    if d == 1:
        tail = TailFunction(lambda x: 0.0, closed_form=True)
        cumulative = lambda y: 0.0  # noqa: E731
    else:
        tail = TailFunction(lambda x1, x2: 0.0, closed_form=True)
        cumulative = lambda y1, y2, orientation: 0.0  # noqa: E731
    return BetaModel(d=d, kind="zero", tail=tail, cumulative=cumulative, mass=0.0,
                     integrable_first_moment=True, first_moment=0.0, params={},
                     density=(lambda *x: 0.0))


def user_model(density, support_radius=None):
    """d = 1 model from a raw density callback; tails by adaptive quadrature.

    ``support_radius`` bounds the support if known; otherwise the tail
    integral is mapped to a half-open interval transform.  F uses absolute
    tolerance 1e-10, G relative tolerance 1e-8.
    """

    def F(x):
        x = float(x)
        if support_radius is not None:
            if x >= support_radius:
                return 0.0
            if x <= -support_radius:
                return _mass()
            return adaptive_simpson(lambda t: float(density(t)), x, support_radius,
                                    abs_tol=1e-10)
        return integrate_to_infinity(lambda t: float(density(t)), x, abs_tol=1e-10)

    def G(y):
        y = float(y)
        if y < 0.0:
            raise ModelError("cumulative G is defined for y >= 0")
        if y == 0.0:
            return 0.0
        return -adaptive_simpson(F, 0.0, y, abs_tol=1e-12, rel_tol=1e-8)

    def _mass():
        if support_radius is not None:
            return adaptive_simpson(lambda t: float(density(t)), -support_radius,
                                    support_radius, abs_tol=1e-8)
        left = integrate_to_infinity(lambda t: float(density(-t)), 0.0, abs_tol=1e-8)
        right = integrate_to_infinity(lambda t: float(density(t)), 0.0, abs_tol=1e-8)
        return left + right

    return BetaModel(d=1, kind="user", tail=TailFunction(F, closed_form=False),
                     cumulative=G, mass=None, integrable_first_moment=False,
                     first_moment=None, params={"support_radius": support_radius},
                     density=density)


def make_model(spec):
    """Build a catalog entry from a plain descriptor (the CLI JSON form)."""
    if isinstance(spec, BetaModel):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelError(f"model descriptor must be a dict with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    d = int(spec.get("d", 1))
    if kind == "pyramidal":
        return pyramidal_model(spec["m"], d=d)
    if kind == "mixture":
        if "weights" in spec:
            return mixture_model({int(k): float(v) for k, v in spec["weights"].items()}, d=d)
        return power_law_mixture_model(float(spec["a"]), d=d,
                                       m_explicit=int(spec.get("m_explicit",
                                                               DEFAULT_COMPONENT_CAP)),
                                       infinite_tail=bool(spec.get("infinite_tail", True)))
    if kind == "sine2":
        if d != 1:
            raise ModelError("sine2 is a d=1 model")
        return sine2_model()
    if kind == "perturbation_tail":
        return perturbation_tail_model(float(spec["s"]), scale=float(spec.get("scale", 1.0)))
    if kind in ("zero", "poisson"):
        return zero_model(d=d)
    raise ModelError(f"unknown model kind {kind!r}")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tail_F(model, x):
    """Quadrant tail F at x (scalar for d=1, pair for d=2)."""
    if model.d == 1:
        if np.ndim(x) > 0:
            return np.array([model.tail(float(t)) for t in np.asarray(x).ravel()])
        return model.tail(float(x))
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ModelError(f"d=2 tail expects a coordinate pair, got shape {x.shape}")
    return model.tail(float(x[0]), float(x[1]))


def cumulative_G(model, y, orientation="+"):
    """Cumulative integral of the tail; orientation applies in d=2 only."""
    if model.d == 1:
        return model.cumulative(float(y))
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise ModelError(f"d=2 cumulative expects a coordinate pair, got shape {y.shape}")
    return model.cumulative(float(y[0]), float(y[1]), orientation)


def hyperuniformity_check(model, tol=1e-6):
    """Total mass beta(R^d) and whether the hyperuniform 1 + mass = 0 holds."""
    if model.mass is not None:
        mass = float(model.mass)
    elif model.d == 1:
        # integrate the density left and right of the origin
        dens = model.density
        if dens is None:
            raise ModelError("model exposes neither a closed-form mass nor a density")
        sr = model.params.get("support_radius")
        if sr is not None:
            mass = adaptive_simpson(lambda t: float(dens(t)), -sr, sr, abs_tol=1e-8)
        else:
            mass = (integrate_to_infinity(lambda t: float(dens(t)), 0.0, abs_tol=1e-8)
                    + integrate_to_infinity(lambda t: float(dens(-t)), 0.0, abs_tol=1e-8))
    else:
        raise ModelError("quadrature mass check is implemented for d = 1 only")
    return mass, bool(abs(1.0 + mass) <= tol)
