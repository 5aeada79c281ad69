"""Seeded samplers for the constructive hyperuniform processes.

Kinds: homogeneous Poisson (the non-hyperuniform control), stationarized
i.i.d. perturbed lattices with Unif([0,m]^d) displacements, the
non-ergodic mixture over m, and the heavy-tailed perturbation
(per-site Unif[0,1) + symmetric Pareto noise) whose variance exponent is
a = 1 - s.

Randomness discipline: every variate comes from a counter-based Philox
stream keyed by (master seed, replica, purpose, block), where ``block``
ranges over fixed tiles of lattice sites / Poisson cells.  A realization
is therefore a pure function of (seed, replica): counts and point dumps
agree with each other, replicas are independent, and results cannot
depend on thread scheduling.

Counts use half-open boxes [nz, nz + n); ties have probability zero for
every displacement law here, so this matches the closed boxes of the
covariance formulas.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.random import Generator, Philox

from .beta_models import (mixture_model, perturbation_tail_model,
                          pyramidal_model, zero_model)

_MASK64 = (1 << 64) - 1
_PUR_U, _PUR_LABEL, _PUR_SITE, _PUR_CELL, _PUR_FAR = range(5)

# block of consecutive lattice sites / cells served by one stream; small for
# the bounded-displacement kinds (queries touch narrow bands around box
# edges), large for heavy tails (queries sweep the whole direct pad)
_BLOCK_NARROW = 64
_BLOCK_WIDE = 32768
_BLOCK_CELL = 1024
_TILE = 16                      # d=2 site/cell tile is _TILE x _TILE
_ORIGIN = 1 << 37               # shifts signed site indices into unsigned range
_ORIGIN_2D = 1 << 15            # tile-index origin: sites span +-(2^15 * _TILE)


class SamplerError(ValueError):
    """Invalid sampling request."""


@dataclass(frozen=True)
class SeedSpec:
    """Master seed; replica r uses the keyed stream family (seed, r)."""

    master_seed: int

    def __post_init__(self):
        if not isinstance(self.master_seed, (int, np.integer)):
            raise SamplerError(f"master seed must be an integer, got {self.master_seed!r}")


def _as_seed(seed):
    if isinstance(seed, SeedSpec):
        return seed.master_seed & _MASK64
    return SeedSpec(seed).master_seed & _MASK64


def _stream(seed, replica, purpose, block=0):
    if replica < 0 or replica >= 1 << 28:
        raise SamplerError(f"replica index must be in [0, 2^28), got {replica}")
    if block < 0 or block >= 1 << 32:
        raise SamplerError("site range exceeds the keyed block space")
    key1 = (purpose << 60) | (replica << 32) | block
    return Generator(Philox(key=np.array([seed, key1], dtype=np.uint64)))


@dataclass(frozen=True)
class ProcessSpec:
    """A sampleable stationary unit-intensity point process."""

    kind: str
    d: int = 1
    m: int = None
    a: float = None
    m_max: int = None
    s: float = None
    scale: float = 1.0
    z_max: float = 4.0
    r0_factor: float = 64.0
    band_residual: float = 1e-4
    beta: object = field(default=None, compare=False)

    def label(self):
        if self.kind == "poisson":
            return "poisson"
        if self.kind == "perturbed_uniform":
            return f"perturbed_uniform(m={self.m})"
        if self.kind == "perturbed_mixture":
            return f"perturbed_mixture(a={self.a})"
        return f"perturbed_heavy(s={self.s})"

    def descriptor(self):
        """Plain-dict form (the CLI JSON schema); rebuildable by make_process."""
        out = {"kind": self.kind, "d": self.d, "z_max": self.z_max}
        if self.kind == "perturbed_uniform":
            out["m"] = self.m
        elif self.kind == "perturbed_mixture":
            out.update(a=self.a, m_max=self.m_max)
        elif self.kind == "perturbed_heavy":
            out.update(s=self.s, scale=self.scale, r0_factor=self.r0_factor,
                       band_residual=self.band_residual)
        return out


def poisson_process(d=1, z_max=4.0):
    return ProcessSpec(kind="poisson", d=d, z_max=z_max, beta=zero_model(d=d))


def perturbed_uniform(m, d=1, z_max=4.0):
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise SamplerError(f"uniform perturbation width must be an integer >= 1, got {m!r}")
    return ProcessSpec(kind="perturbed_uniform", d=d, m=int(m), z_max=z_max,
                       beta=pyramidal_model(int(m), d=d))


def perturbed_mixture(a, d=1, m_max=2 ** 16, z_max=4.0):
    """Non-ergodic mixture: one width Y per replica, p_m ~ m^{-(2-a)} up to m_max."""
    if not 0.0 < a < 1.0:
        raise SamplerError(f"mixture exponent a must be in (0,1), got {a}")
    ms, ws = _mixture_weights(float(a), int(m_max))
    beta = mixture_model(dict(zip(ms.tolist(), ws.tolist())), d=d)
    return ProcessSpec(kind="perturbed_mixture", d=d, a=float(a), m_max=int(m_max),
                       z_max=z_max, beta=beta)


def perturbed_heavy(s, scale=1.0, d=1, z_max=4.0, r0_factor=64.0, band_residual=1e-4):
    """Lattice perturbed by Unif[0,1) plus symmetric Pareto(s) noise (d = 1)."""
    if not 0.0 < s < 1.0:
        raise SamplerError(f"heavy-tail exponent s must be in (0,1) strictly, got {s}")
    if d != 1:
        raise SamplerError("the heavy-tailed sampler is implemented for d = 1")
    return ProcessSpec(kind="perturbed_heavy", d=d, s=float(s), scale=float(scale),
                       z_max=z_max, r0_factor=float(r0_factor),
                       band_residual=float(band_residual),
                       beta=perturbation_tail_model(float(s), scale=float(scale)))


def make_process(spec):
    """Build a ProcessSpec from a plain descriptor (the CLI JSON form)."""
    if isinstance(spec, ProcessSpec):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SamplerError(f"process descriptor must be a dict with 'kind', got {spec!r}")
    kind = spec["kind"]
    d = int(spec.get("d", 1))
    z_max = float(spec.get("z_max", 4.0))
    if kind == "poisson":
        return poisson_process(d=d, z_max=z_max)
    if kind == "perturbed_uniform":
        return perturbed_uniform(int(spec["m"]), d=d, z_max=z_max)
    if kind == "perturbed_mixture":
        return perturbed_mixture(float(spec["a"]), d=d,
                                 m_max=int(spec.get("m_max", 2 ** 16)), z_max=z_max)
    if kind == "perturbed_heavy":
        return perturbed_heavy(float(spec["s"]), scale=float(spec.get("scale", 1.0)),
                               d=d, z_max=z_max,
                               r0_factor=float(spec.get("r0_factor", 64.0)),
                               band_residual=float(spec.get("band_residual", 1e-4)))
    raise SamplerError(f"unknown process kind {kind!r}")


@lru_cache(maxsize=8)
def _mixture_weights(a, m_max):
    ms = np.arange(1, m_max + 1)
    ws = ms.astype(float) ** (-(2.0 - a))
    ws /= ws.sum()
    return ms, ws


# ---------------------------------------------------------------------------
# per-replica primitive draws
# ---------------------------------------------------------------------------

def _stationarizer(seed, replica, d):
    return _stream(seed, replica, _PUR_U).random(d)


def _mixture_label(process, seed, replica):
    ms, ws = _mixture_weights(process.a, process.m_max)
    u = _stream(seed, replica, _PUR_LABEL).random()
    return int(ms[np.searchsorted(np.cumsum(ws), u, side="right").clip(max=len(ms) - 1)])


class _BlockCache:
    """Lazy per-replica cache of keyed block draws."""

    def __init__(self, seed, replica, purpose, block_size, draw):
        self.seed = seed
        self.replica = replica
        self.purpose = purpose
        self.block_size = block_size
        self.draw = draw
        self.blocks = {}

    def block(self, b):
        out = self.blocks.get(b)
        if out is None:
            g = _stream(self.seed, self.replica, self.purpose, b)
            out = self.blocks[b] = self.draw(g, self.block_size)
            del g
        return out

    def gather_1d(self, lo, hi):
        """Values for consecutive linear indices [lo, hi) (already shifted >= 0)."""
        b0, b1 = lo // self.block_size, (hi - 1) // self.block_size
        if b0 == b1:
            base = b0 * self.block_size
            return self.block(b0)[lo - base:hi - base]
        parts = []
        for b in range(b0, b1 + 1):
            base = b * self.block_size
            s = max(lo, base) - base
            e = min(hi, base + self.block_size) - base
            parts.append(self.block(b)[s:e])
        return np.concatenate(parts)


def _site_words(seed, replica):
    """uint64 word per site (heavy kind): sign, offset and tail bits."""
    return _BlockCache(seed, replica, _PUR_SITE, _BLOCK_WIDE,
                       lambda g, b: g.integers(0, 1 << 64, size=b, dtype=np.uint64))


def _site_uniforms_1d(seed, replica):
    """one double per site (bounded-displacement kinds, d = 1)."""
    return _BlockCache(seed, replica, _PUR_SITE, _BLOCK_NARROW,
                       lambda g, b: g.random(b))


def _cell_stats_1d(seed, replica):
    """Poisson cell counts plus canonical in-cell positions, d = 1."""

    def draw(g, b):
        counts = g.poisson(1.0, size=b)
        offsets = np.concatenate(([0], np.cumsum(counts)))
        pos = g.random(int(offsets[-1]))
        return counts, offsets, pos

    return _BlockCache(seed, replica, _PUR_CELL, _BLOCK_CELL, draw)


# 2-D tiles: one stream per (_TILE x _TILE) tile of sites/cells
def _tile_block(t1, t2):
    u1, u2 = t1 + _ORIGIN_2D, t2 + _ORIGIN_2D
    if not (0 <= u1 < (1 << 16) and 0 <= u2 < (1 << 16)):
        raise SamplerError("2-D site range exceeds the keyed tile space")
    return (u1 << 16) | u2


def _gather_tiles_2d(seed, replica, purpose, s1_lo, s1_hi, s2_lo, s2_hi, per_site, draw):
    """Array of per-site draws for the site rectangle [s1_lo,s1_hi)x[s2_lo,s2_hi)."""
    n1, n2 = s1_hi - s1_lo, s2_hi - s2_lo
    out = np.empty((n1, n2, per_site))
    t1_lo, t1_hi = math.floor(s1_lo / _TILE), math.floor((s1_hi - 1) / _TILE)
    t2_lo, t2_hi = math.floor(s2_lo / _TILE), math.floor((s2_hi - 1) / _TILE)
    for t1 in range(t1_lo, t1_hi + 1):
        for t2 in range(t2_lo, t2_hi + 1):
            g = _stream(seed, replica, purpose, _tile_block(t1, t2))
            vals = draw(g).reshape(_TILE, _TILE, per_site)
            a1, b1 = max(s1_lo, t1 * _TILE), min(s1_hi, (t1 + 1) * _TILE)
            a2, b2 = max(s2_lo, t2 * _TILE), min(s2_hi, (t2 + 1) * _TILE)
            out[a1 - s1_lo:b1 - s1_lo, a2 - s2_lo:b2 - s2_lo] = \
                vals[a1 - t1 * _TILE:b1 - t1 * _TILE, a2 - t2 * _TILE:b2 - t2 * _TILE]
    return out


# ---------------------------------------------------------------------------
# boxes and windows
# ---------------------------------------------------------------------------

def _shift_array(process, shifts):
    arr = np.atleast_2d(np.asarray(
        [getattr(s, "z", s if np.ndim(s) else (s,)) for s in shifts], dtype=float))
    if arr.shape[1] != process.d:
        raise SamplerError(f"shift dimension {arr.shape[1]} != process d = {process.d}")
    if np.any(np.abs(arr) > process.z_max):
        raise SamplerError(
            f"shifts exceed the configured |z| <= {process.z_max} window")
    return arr


def _boxes(process, n, shifts):
    z = _shift_array(process, shifts)
    lo = z * n
    return lo, lo + n


# ---------------------------------------------------------------------------
# Poisson
# ---------------------------------------------------------------------------

def _poisson_counts_1d(boxes_lo, boxes_hi, seed, replica):
    cache = _cell_stats_1d(seed, replica)
    counts = np.zeros(len(boxes_lo), dtype=np.int64)
    for i, (lo, hi) in enumerate(zip(boxes_lo, boxes_hi)):
        c_full_lo, c_full_hi = math.ceil(lo), math.floor(hi)
        total = 0
        u0, u1 = c_full_lo + _ORIGIN, c_full_hi + _ORIGIN
        b = u0 // _BLOCK_CELL
        while u0 < u1:
            base = b * _BLOCK_CELL
            s, e = u0 - base, min(u1, base + _BLOCK_CELL) - base
            total += int(cache.block(b)[0][s:e].sum())
            u0 = base + _BLOCK_CELL
            b += 1
        for c, a, bb in _partial_cells_1d(lo, hi):
            u = c + _ORIGIN
            blk_counts, offsets, pos = cache.block(u // _BLOCK_CELL)
            k = u % _BLOCK_CELL
            pts = pos[offsets[k]:offsets[k + 1]]
            total += int(np.count_nonzero((pts >= a) & (pts < bb)))
        counts[i] = total
    return counts


def _partial_cells_1d(lo, hi):
    """Cells only partially covered by [lo, hi): (cell, in-cell lo, in-cell hi)."""
    full_lo, full_hi = math.ceil(lo), math.floor(hi)
    out = []
    for c in sorted({math.floor(lo), math.floor(hi)}):
        if full_lo <= c < full_hi:
            continue                       # fully covered
        a, b = max(lo, c), min(hi, c + 1.0)
        if b > a:
            out.append((c, a - c, b - c))
    return out


def _poisson_points_1d(window, seed, replica):
    lo, hi = window
    cache = _cell_stats_1d(seed, replica)
    pts = []
    for c in range(math.floor(lo), math.ceil(hi)):
        u = c + _ORIGIN
        blk_counts, offsets, pos = cache.block(u // _BLOCK_CELL)
        k = u % _BLOCK_CELL
        p = c + pos[offsets[k]:offsets[k + 1]]
        pts.append(p[(p >= lo) & (p < hi)])
    if not pts:
        return np.empty(0)
    return np.concatenate(pts)


def _poisson_counts_2d(boxes_lo, boxes_hi, seed, replica):
    counts = np.zeros(len(boxes_lo), dtype=np.int64)
    for i in range(len(boxes_lo)):
        pts = _poisson_points_2d((boxes_lo[i], boxes_hi[i]), seed, replica)
        counts[i] = len(pts)
    return counts


def _poisson_points_2d(window, seed, replica):
    (lo1, lo2), (hi1, hi2) = window
    c1_lo, c1_hi = math.floor(lo1), math.ceil(hi1)
    c2_lo, c2_hi = math.floor(lo2), math.ceil(hi2)
    t1_lo, t1_hi = math.floor(c1_lo / _TILE), math.floor((c1_hi - 1) / _TILE)
    t2_lo, t2_hi = math.floor(c2_lo / _TILE), math.floor((c2_hi - 1) / _TILE)
    pts = []
    for t1 in range(t1_lo, t1_hi + 1):
        for t2 in range(t2_lo, t2_hi + 1):
            g = _stream(seed, replica, _PUR_CELL, _tile_block(t1, t2))
            cell_counts = g.poisson(1.0, size=_TILE * _TILE)
            pos = g.random((int(cell_counts.sum()), 2))
            cell = np.repeat(np.arange(_TILE * _TILE), cell_counts)
            x = t1 * _TILE + cell // _TILE + pos[:, 0]
            y = t2 * _TILE + cell % _TILE + pos[:, 1]
            keep = (x >= lo1) & (x < hi1) & (y >= lo2) & (y < hi2)
            if np.any(keep):
                pts.append(np.column_stack([x[keep], y[keep]]))
    if not pts:
        return np.empty((0, 2))
    return np.concatenate(pts)


# ---------------------------------------------------------------------------
# bounded-displacement lattices (uniform and mixture)
# ---------------------------------------------------------------------------

def _uniform_counts_1d(m, boxes_lo, boxes_hi, seed, replica, u_stat):
    cache = _site_uniforms_1d(seed, replica)
    counts = np.zeros(len(boxes_lo), dtype=np.int64)
    for i, (lo, hi) in enumerate(zip(boxes_lo, boxes_hi)):
        a, b = lo - u_stat, hi - u_stat            # site + X in [a, b)
        cert_lo, cert_hi = math.ceil(a), math.floor(b - m)      # X in [0, m) certain
        cand_lo, cand_hi = math.floor(a - m) + 1, math.ceil(b) - 1
        total = max(0, cert_hi - cert_lo + 1)
        bands = []
        if total:
            bands = [(cand_lo, cert_lo - 1), (cert_hi + 1, cand_hi)]
        else:
            bands = [(cand_lo, cand_hi)]
        for s0, s1 in bands:
            if s1 < s0:
                continue
            v = cache.gather_1d(s0 + _ORIGIN, s1 + _ORIGIN + 1)
            sites = np.arange(s0, s1 + 1)
            x = m * v
            total += int(np.count_nonzero((x >= a - sites) & (x < b - sites)))
        counts[i] = total
    return counts


def _uniform_points_1d(m, window, seed, replica, u_stat):
    lo, hi = window
    a, b = lo - u_stat, hi - u_stat
    s0, s1 = math.floor(a - m) + 1, math.ceil(b) - 1
    if s1 < s0:
        return np.empty(0)
    cache = _site_uniforms_1d(seed, replica)
    v = cache.gather_1d(s0 + _ORIGIN, s1 + _ORIGIN + 1)
    sites = np.arange(s0, s1 + 1)
    pos = sites + u_stat + m * v
    return pos[(pos >= lo) & (pos < hi)]


def _uniform_landing_2d(m, rect_lo, rect_hi, seed, replica, u_stat):
    """Positions of landed points for a rectangle [lo, hi) x [lo, hi), d = 2."""
    s_lo = [math.floor(rect_lo[k] - u_stat[k] - m) + 1 for k in range(2)]
    s_hi = [math.ceil(rect_hi[k] - u_stat[k]) - 1 for k in range(2)]
    if s_hi[0] < s_lo[0] or s_hi[1] < s_lo[1]:
        return np.empty((0, 2))
    v = _gather_tiles_2d(seed, replica, _PUR_SITE, s_lo[0], s_hi[0] + 1,
                         s_lo[1], s_hi[1] + 1, 2,
                         lambda g: g.random((_TILE * _TILE, 2)))
    sites1 = np.arange(s_lo[0], s_hi[0] + 1)[:, None]
    sites2 = np.arange(s_lo[1], s_hi[1] + 1)[None, :]
    x = sites1 + u_stat[0] + m * v[..., 0]
    y = sites2 + u_stat[1] + m * v[..., 1]
    keep = (x >= rect_lo[0]) & (x < rect_hi[0]) & (y >= rect_lo[1]) & (y < rect_hi[1])
    return np.column_stack([x[keep], y[keep]])


def _uniform_counts_2d(m, rect_lo, rect_hi, seed, replica, u_stat):
    """Count of landed points in one rectangle, skipping the certain interior.

    Sites whose whole displacement square sits inside the box land with
    probability one; only a frame of width ~m+1 around the box boundary is
    uncertain.  The frame pulls the same per-tile keyed draws the full
    materialization would, so counts and point dumps stay consistent.
    """
    a = [rect_lo[k] - u_stat[k] for k in range(2)]
    b = [rect_hi[k] - u_stat[k] for k in range(2)]
    cert_lo = [math.ceil(a[k]) for k in range(2)]
    cert_hi = [math.floor(b[k] - m) for k in range(2)]
    cand_lo = [math.floor(a[k] - m) + 1 for k in range(2)]
    cand_hi = [math.ceil(b[k]) - 1 for k in range(2)]
    if cand_hi[0] < cand_lo[0] or cand_hi[1] < cand_lo[1]:
        return 0
    has_interior = cert_hi[0] >= cert_lo[0] and cert_hi[1] >= cert_lo[1]
    if has_interior:
        total = (cert_hi[0] - cert_lo[0] + 1) * (cert_hi[1] - cert_lo[1] + 1)
        strips = [
            (cand_lo[0], cert_lo[0] - 1, cand_lo[1], cand_hi[1]),
            (cert_hi[0] + 1, cand_hi[0], cand_lo[1], cand_hi[1]),
            (cert_lo[0], cert_hi[0], cand_lo[1], cert_lo[1] - 1),
            (cert_lo[0], cert_hi[0], cert_hi[1] + 1, cand_hi[1]),
        ]
    else:
        total = 0
        strips = [(cand_lo[0], cand_hi[0], cand_lo[1], cand_hi[1])]
    for s1a, s1b, s2a, s2b in strips:
        if s1b < s1a or s2b < s2a:
            continue
        v = _gather_tiles_2d(seed, replica, _PUR_SITE, s1a, s1b + 1, s2a, s2b + 1,
                             2, lambda g: g.random((_TILE * _TILE, 2)))
        sites1 = np.arange(s1a, s1b + 1)[:, None]
        sites2 = np.arange(s2a, s2b + 1)[None, :]
        x = sites1 + m * v[..., 0]
        y = sites2 + m * v[..., 1]
        total += int(np.count_nonzero((x >= a[0]) & (x < b[0])
                                      & (y >= a[1]) & (y < b[1])))
    return total


# ---------------------------------------------------------------------------
# heavy tails: direct pad + dyadic band thinning
# ---------------------------------------------------------------------------

def _pareto_tail(t, s, scale):
    """P(Y >= t) = (1/2)(1 + t/scale)^{-s} for t >= 0 (symmetric noise)."""
    return 0.5 * (1.0 + np.maximum(t, 0.0) / scale) ** (-s)


def _pareto_tail_inv(q, s, scale):
    """t with P(Y >= t) = q, for q in (0, 1/2]."""
    return scale * ((2.0 * q) ** (-1.0 / s) - 1.0)


@dataclass(frozen=True)
class _HeavyPlan:
    w_lo: float
    w_hi: float
    s_lo: int                 # direct site range [s_lo, s_hi)
    s_hi: int
    word_flip: object         # uint64 per site: xor mask folding the sign test
    word_thresh: object       # uint64 per site: prefilter threshold
    band_start: object        # (2, K) first site of each band, per side
    band_n: object            # (2, K) integer site count per band (float storage)
    band_pbar: object         # (K,) per-site landing probability bound


@lru_cache(maxsize=8)
def _heavy_plan(process, w_lo, w_hi, n):
    s_exp, scale = process.s, process.scale
    width = w_hi - w_lo
    r0 = max(process.r0_factor * n, 16.0)
    s_lo = math.floor(w_lo - r0)
    s_hi = math.ceil(w_hi + r0)
    sites = np.arange(s_lo, s_hi, dtype=float)

    # prefilter: a site strictly outside the window can only land if its
    # noise points toward the window and its tail variate clears the
    # worst-case gap (slack 2 covers U + V1 in [0, 2)).  Site words carry
    # [sign:1][tail:42][offset:21] from the top bit down, so "required sign
    # and tail variate >= vmin" collapses to one xor and one compare.
    gap_left = w_lo - sites - 2.0          # > 0 for sites left of the window
    gap_right = sites - w_hi               # >= 0 for sites right of the window
    # sites whose no-tail position s + U + V1 can fall inside the window carry
    # no sign constraint at all
    near = (gap_left <= 0.0) & (gap_right < 0.0)
    toward_right = np.where(near, 0, np.where(gap_left > 0.0, 1, -1)).astype(np.int8)
    t_min = np.where(toward_right > 0, gap_left, np.where(toward_right < 0, gap_right, 0.0))
    vmin = 1.0 - (1.0 + np.maximum(t_min, 0.0) / scale) ** (-s_exp)
    thresh_bits = np.floor(vmin * 2.0 ** 42).astype(np.uint64)
    word_thresh = np.where(near, np.uint64(0),
                           (np.uint64(1) << np.uint64(63))
                           | (thresh_bits << np.uint64(21)))
    word_flip = np.where(toward_right < 0, np.uint64(1) << np.uint64(63), np.uint64(0))

    # dyadic bands beyond the direct pad; integer site ranges per side so the
    # far field lives on the same lattice as the pad
    dists = []
    dist = float(r0)
    while True:
        if width * float(_pareto_tail(dist - 3.0, s_exp, scale)) < process.band_residual:
            break
        if len(dists) >= 512:
            raise SamplerError("band table failed to converge; residual too strict")
        dists.append(dist)
        dist *= 2.0
    k = len(dists)
    band_start = np.zeros((2, k))
    band_n = np.zeros((2, k))
    pbars = np.zeros(k)
    for b, dist in enumerate(dists):
        # left: sites with w_lo - s in [dist, 2 dist); right: s - w_hi likewise
        left_hi = math.floor(w_lo - dist)
        left_lo = math.floor(w_lo - 2.0 * dist) + 1
        right_lo = math.ceil(w_hi + dist)
        right_hi = math.ceil(w_hi + 2.0 * dist) - 1
        band_start[0, b], band_n[0, b] = left_lo, max(0, left_hi - left_lo + 1)
        band_start[1, b], band_n[1, b] = right_lo, max(0, right_hi - right_lo + 1)
        pbars[b] = float(_pareto_tail(dist - 3.0, s_exp, scale)
                         - _pareto_tail(dist - 3.0 + width, s_exp, scale))
    return _HeavyPlan(w_lo=w_lo, w_hi=w_hi, s_lo=s_lo, s_hi=s_hi,
                      word_flip=word_flip, word_thresh=word_thresh,
                      band_start=band_start, band_n=band_n, band_pbar=pbars)


def _slice_words(words):
    """Decode site words: sign in the top bit, then 42 tail bits, 21 offset bits."""
    sign = np.where(words >> np.uint64(63), 1.0, -1.0)
    v2 = ((words >> np.uint64(21)) & np.uint64((1 << 42) - 1)) * 2.0 ** -42
    v1 = (words & np.uint64((1 << 21) - 1)) * 2.0 ** -21
    return sign, v1, v2


def _heavy_direct_positions(process, plan, seed, replica, u_stat):
    """Landed positions contributed by the direct site pad."""
    cache = _site_words(seed, replica)
    words = cache.gather_1d(plan.s_lo + _ORIGIN, plan.s_hi + _ORIGIN)
    idx = np.nonzero((words ^ plan.word_flip) >= plan.word_thresh)[0]
    sign, v1, v2 = _slice_words(words[idx])
    t = _pareto_tail_inv(0.5 * (1.0 - v2), process.s, process.scale)
    pos = (plan.s_lo + idx) + u_stat + v1 + sign * t
    keep = (pos >= plan.w_lo) & (pos < plan.w_hi)
    return pos[keep]


def _heavy_far_positions(process, plan, seed, replica, u_stat):
    """Landed positions from beyond the pad, by exact band thinning.

    Per band each lattice site is Bernoulli(pbar)-marked (Poisson limit
    once the site count exceeds 2^31; the switch-over total-variation gap
    is ~ count * pbar^2, far below float resolution there), marked sites
    get a fresh offset variate, and survive with probability equal to
    their exact landing probability over pbar; survivors draw the noise
    from its law conditioned on hitting the window.
    """
    n_bands = plan.band_pbar.shape[0]
    if n_bands == 0:
        return np.empty(0)
    g = _stream(seed, replica, _PUR_FAR)
    s_exp, scale = process.s, process.scale
    width = plan.w_hi - plan.w_lo
    out = []
    for side in (0, 1):                       # left of window, then right
        counts = plan.band_n[side]
        small = counts <= 2.0 ** 31
        k_small = g.binomial(np.minimum(counts, 2.0 ** 31).astype(np.int64),
                             plan.band_pbar)
        k_large = g.poisson(counts * plan.band_pbar)
        karr = np.where(small, k_small, k_large).astype(np.int64)
        total = int(karr.sum())
        if total == 0:
            continue
        band_of = np.repeat(np.arange(n_bands), karr)
        offs = np.floor(g.random(total) * counts[band_of])
        sites = plan.band_start[side][band_of] + offs
        # redraw collisions within a band until sites are distinct (bands
        # occupy disjoint ranges, so absolute positions can only collide
        # within one band); expected zero extra rounds
        while True:
            uniq, first = np.unique(sites, return_index=True)
            if len(uniq) == total:
                break
            dup = np.ones(total, dtype=bool)
            dup[first] = False
            redo = np.nonzero(dup)[0]
            sites[redo] = plan.band_start[side][band_of[redo]] \
                + np.floor(g.random(len(redo)) * counts[band_of[redo]])
        v1 = g.random(total)
        u_acc = g.random(total)
        u_cond = g.random(total)
        if side == 0:                         # left: noise must point right
            gap = plan.w_lo - sites - u_stat - v1
        else:
            gap = sites + u_stat + v1 - plan.w_hi
        q_hi = _pareto_tail(gap, s_exp, scale)
        q_lo = _pareto_tail(gap + width, s_exp, scale)
        accept = u_acc * plan.band_pbar[band_of] < (q_hi - q_lo)
        if not np.any(accept):
            continue
        q = q_lo[accept] + u_cond[accept] * (q_hi[accept] - q_lo[accept])
        t = _pareto_tail_inv(q, s_exp, scale)
        pos = sites[accept] + u_stat + v1[accept] + (t if side == 0 else -t)
        keep = (pos >= plan.w_lo) & (pos < plan.w_hi)
        out.append(pos[keep])
    if not out:
        return np.empty(0)
    return np.concatenate(out)


def _heavy_positions(process, w_lo, w_hi, n, seed, replica):
    plan = _heavy_plan(process, float(w_lo), float(w_hi), float(n))
    u_stat = float(_stationarizer(seed, replica, 1)[0])
    direct = _heavy_direct_positions(process, plan, seed, replica, u_stat)
    far = _heavy_far_positions(process, plan, seed, replica, u_stat)
    return np.sort(np.concatenate([direct, far]))


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def sample_counts(process, n, shifts, seed, replica):
    """Counts of one realization in the boxes nz + [0, n)^d, one per shift."""
    if n <= 0:
        raise SamplerError(f"box side n must be positive, got {n}")
    seed = _as_seed(seed)
    lo, hi = _boxes(process, float(n), shifts)
    kind = process.kind
    if kind == "poisson":
        if process.d == 1:
            return _poisson_counts_1d(lo[:, 0], hi[:, 0], seed, replica)
        return _poisson_counts_2d(lo, hi, seed, replica)
    if kind in ("perturbed_uniform", "perturbed_mixture"):
        u_stat = _stationarizer(seed, replica, process.d)
        m = process.m if kind == "perturbed_uniform" else \
            _mixture_label(process, seed, replica)
        if process.d == 1:
            return _uniform_counts_1d(m, lo[:, 0], hi[:, 0], seed, replica,
                                      float(u_stat[0]))
        counts = np.zeros(len(lo), dtype=np.int64)
        for i in range(len(lo)):
            counts[i] = _uniform_counts_2d(m, lo[i], hi[i], seed, replica, u_stat)
        return counts
    if kind == "perturbed_heavy":
        pos = _heavy_positions(process, float(lo.min()), float(hi.max()), float(n),
                               seed, replica)
        return (np.searchsorted(pos, hi[:, 0], side="left")
                - np.searchsorted(pos, lo[:, 0], side="left")).astype(np.int64)
    raise SamplerError(f"unknown process kind {kind!r}")


def sample_points(process, window, seed, replica, max_expected=1e8):
    """The realization restricted to ``window`` (pairs of (lo, hi) per axis).

    Includes far-field contributors that land inside.  For the heavy kind
    the far field is resolved relative to this window, so point dumps are
    coupled with count queries that use the same evaluation window.
    """
    seed = _as_seed(seed)
    win = np.atleast_2d(np.asarray(window, dtype=float))
    if win.shape != (process.d, 2) or np.any(win[:, 1] <= win[:, 0]):
        raise SamplerError(f"window must be d pairs (lo, hi), got {window!r}")
    volume = float(np.prod(win[:, 1] - win[:, 0]))
    if volume > max_expected:
        raise SamplerError(
            f"window volume {volume:.3g} exceeds the expected-count cap {max_expected:.3g}")
    kind = process.kind
    if kind == "poisson":
        if process.d == 1:
            return _poisson_points_1d(win[0], seed, replica)
        return _poisson_points_2d((win[:, 0], win[:, 1]), seed, replica)
    if kind in ("perturbed_uniform", "perturbed_mixture"):
        u_stat = _stationarizer(seed, replica, process.d)
        m = process.m if kind == "perturbed_uniform" else \
            _mixture_label(process, seed, replica)
        if process.d == 1:
            return _uniform_points_1d(m, win[0], seed, replica, float(u_stat[0]))
        return _uniform_landing_2d(m, win[:, 0], win[:, 1], seed, replica, u_stat)
    if kind == "perturbed_heavy":
        return _heavy_positions(process, win[0, 0], win[0, 1],
                                win[0, 1] - win[0, 0], seed, replica)
    raise SamplerError(f"unknown process kind {kind!r}")
