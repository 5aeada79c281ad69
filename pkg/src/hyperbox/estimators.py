"""Monte Carlo estimators over independent replicas.

All estimators are pure functions of (process, parameters, seed): replicas
map to keyed sampler streams, per-block partial sums are combined in a
fixed order with exact (fsum) reduction, and standard errors come from a
leave-one-block-out jackknife.  Running with a different worker count
changes nothing in the output bytes.

Replica averaging is the only averaging offered -- the mixture process is
not ergodic, so spatial averages within one realization would estimate a
conditional quantity.  Each replica draws a fresh mixture label.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .samplers import make_process, sample_counts


class EstimatorError(RuntimeError):
    pass


class DegenerateVarianceError(EstimatorError):
    """All counts equal: no variance to normalize by."""


@dataclass(frozen=True)
class CovCurve:
    process: str
    n: float
    replicas: int
    zgrid: np.ndarray            # (k,) for d = 1, (k, d) otherwise
    cov_hat: np.ndarray
    se: np.ndarray
    var_hat: float
    var_se: float
    cov_theory: np.ndarray = None


@dataclass(frozen=True)
class VarGrowthTable:
    process: str
    replicas: int
    n: np.ndarray
    var_hat: np.ndarray
    se: np.ndarray


@dataclass(frozen=True)
class RVFit:
    a_hat: float
    se: float
    ci: tuple
    n_grid: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class CumulantReport:
    process: str
    n: float
    replicas: int
    k: tuple                     # (k1, k2, k3, k4)
    skewness: float
    excess_kurtosis: float
    se_skewness: float
    se_kurtosis: float


def resolve_threads(threads=None):
    """Worker count: explicit arg, else HYPERBOX_THREADS, else single."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("HYPERBOX_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _n_blocks(replicas):
    # 100 jackknife blocks once there is enough data to fill them
    return 100 if replicas >= 1000 else max(2, replicas // 10)


def _block_ranges(replicas, blocks):
    edges = [replicas * b // blocks for b in range(blocks + 1)]
    return [(edges[b], edges[b + 1]) for b in range(blocks)]


# ---------------------------------------------------------------------------
# block workers (top level: must pickle for the process pool)
# ---------------------------------------------------------------------------

def _counts_matrix(descriptor, n, shifts, seed, r_lo, r_hi, center):
    process = make_process(descriptor)
    mat = np.empty((r_hi - r_lo, len(shifts)))
    for i, rep in enumerate(range(r_lo, r_hi)):
        mat[i] = sample_counts(process, n, shifts, seed, rep)
    return mat - center


def _cov_block(args):
    descriptor, n, shifts, seed, r_lo, r_hi, center = args
    c = _counts_matrix(descriptor, n, shifts, seed, r_lo, r_hi, center)
    ref = c[:, 0]
    # [count, sum c0, sum c0^2, sum cz..., sum c0*cz...]
    k = c.shape[1]
    out = np.empty(3 + 2 * k)
    out[0] = c.shape[0]
    out[1] = ref.sum()
    out[2] = (ref * ref).sum()
    out[3:3 + k] = c.sum(axis=0)
    out[3 + k:] = ref @ c
    return out


def _moment_block(args):
    descriptor, n, shifts, seed, r_lo, r_hi, center = args
    c = _counts_matrix(descriptor, n, shifts, seed, r_lo, r_hi, center)[:, 0]
    return np.array([len(c), c.sum(), (c ** 2).sum(), (c ** 3).sum(), (c ** 4).sum()])


def _run_blocks(worker, descriptor, n, shifts, seed, replicas, threads, center):
    blocks = _n_blocks(replicas)
    jobs = [(descriptor, n, shifts, seed, r_lo, r_hi, center)
            for r_lo, r_hi in _block_ranges(replicas, blocks)]
    if threads <= 1:
        parts = [worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(worker, jobs, chunksize=max(1, blocks // (4 * threads))))
    return np.vstack(parts)


def _fsum_columns(block_stats):
    return np.array([math.fsum(block_stats[:, j]) for j in range(block_stats.shape[1])])


# ---------------------------------------------------------------------------
# covariance curves
# ---------------------------------------------------------------------------

def _cov_from_sums(stats, k):
    """Normalized covariances and the variance from stacked sums."""
    r, s0, s00 = stats[0], stats[1], stats[2]
    sz = stats[3:3 + k]
    s0z = stats[3 + k:]
    var = (s00 - s0 * s0 / r) / (r - 1.0)
    cov = (s0z - s0 * sz / r) / (r - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = cov / var
    return ratio, var


def estimate_cov_curve(process, n, zgrid, replicas, seed, threads=None):
    """Normalized covariance cov_hat(z) = Cov(N_0, N_z)/Var(N_0) over replicas.

    The reference box at z = 0 is always included, so cov_hat at a grid
    point z = 0 is exactly 1.  Standard errors are leave-one-block-out
    jackknife over the replica blocks (valid for the ratio statistic).
    """
    process = make_process(process)
    if replicas < 20:
        raise EstimatorError(f"need at least 20 replicas for a covariance curve, "
                             f"got {replicas}")
    threads = resolve_threads(threads)
    zgrid = np.asarray(zgrid, dtype=float)
    grid2d = zgrid.reshape(len(zgrid), -1)
    shifts = tuple(tuple(row) for row in np.vstack([np.zeros((1, process.d)), grid2d]))
    center = float(n) ** process.d
    stats = _run_blocks(_cov_block, process.descriptor(), float(n), shifts,
                        seed, replicas, threads, center)
    k = len(shifts)
    total = _fsum_columns(stats)
    if total[0] != replicas:
        raise EstimatorError("replica bookkeeping mismatch")
    cov_all, var = _cov_from_sums(total, k)
    if var <= 0.0 or not np.isfinite(var):
        raise DegenerateVarianceError(
            f"degenerate count variance for {process.label()} at n = {n}")

    loo = total[None, :] - stats
    cov_jack = np.empty((len(stats), k))
    var_jack = np.empty(len(stats))
    for j in range(len(stats)):
        cov_jack[j], var_jack[j] = _cov_from_sums(loo[j], k)
    b = len(stats)
    se_all = np.sqrt((b - 1.0) / b * np.sum((cov_jack - cov_jack.mean(axis=0)) ** 2,
                                            axis=0))
    var_se = math.sqrt((b - 1.0) / b * np.sum((var_jack - var_jack.mean()) ** 2))
    grid_out = zgrid if process.d == 1 else grid2d
    return CovCurve(process=process.label(), n=float(n), replicas=replicas,
                    zgrid=grid_out, cov_hat=cov_all[1:], se=se_all[1:],
                    var_hat=float(var), var_se=var_se)


def estimate_variance_growth(process, n_grid, replicas, seed, threads=None):
    """Sample variance of the count per box side n, with jackknife s.e."""
    process = make_process(process)
    threads = resolve_threads(threads)
    n_grid = np.asarray(n_grid, dtype=float)
    var_hat = np.empty(len(n_grid))
    se = np.empty(len(n_grid))
    origin = tuple([(0.0,) * process.d])
    for i, n in enumerate(n_grid):
        stats = _run_blocks(_cov_block, process.descriptor(), float(n), origin,
                            seed, replicas, threads, float(n) ** process.d)
        total = _fsum_columns(stats)
        _, var = _cov_from_sums(total, 1)
        if var <= 0.0:
            raise DegenerateVarianceError(
                f"degenerate count variance for {process.label()} at n = {n}")
        loo = total[None, :] - stats
        vj = np.array([_cov_from_sums(loo[j], 1)[1] for j in range(len(stats))])
        b = len(stats)
        var_hat[i] = var
        se[i] = math.sqrt((b - 1.0) / b * np.sum((vj - vj.mean()) ** 2))
    return VarGrowthTable(process=process.label(), replicas=replicas,
                          n=n_grid, var_hat=var_hat, se=se)


def fit_rv_exponent(table=None, *, n=None, var_hat=None, se=None):
    """Regular-variation exponent of the variance by weighted log-log fit.

    Accepts a VarGrowthTable or explicit arrays; with se = None or zeros
    (exact theory tables) the fit is unweighted.  Returns the fitted
    exponent with a 95% interval from the WLS covariance.
    """
    if table is not None:
        n, var_hat, se = table.n, table.var_hat, table.se
    n = np.asarray(n, dtype=float)
    var_hat = np.asarray(var_hat, dtype=float)
    se = np.zeros_like(n) if se is None else np.asarray(se, dtype=float)
    if len(n) < 4:
        raise EstimatorError(f"need at least 4 grid points, got {len(n)}")
    if np.any(np.diff(n) <= 0):
        raise EstimatorError("n grid must be strictly increasing")
    if n[-1] / n[0] < 30.0:
        raise EstimatorError("n grid must span at least a factor of 30")
    if np.any(var_hat <= 0.0):
        raise EstimatorError("variance entries must be positive")
    x = np.log(n)
    y = np.log(var_hat)
    if np.all(se > 0.0):
        w = (var_hat / se) ** 2          # 1 / se(log var)^2
    else:
        w = np.ones_like(x)
    sw = w.sum()
    xbar = (w * x).sum() / sw
    ybar = (w * y).sum() / sw
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    dof = max(1, len(n) - 2)
    scale = (w * resid ** 2).sum() / dof
    se_slope = math.sqrt(max(scale, 1.0) / sxx) if np.all(se > 0.0) else \
        math.sqrt(scale / sxx)
    half = 1.96 * se_slope
    return RVFit(a_hat=float(slope), se=float(se_slope),
                 ci=(float(slope - half), float(slope + half)),
                 n_grid=n, residuals=resid)


def coarse_grained_path(process, n, zgrid, seed, replica, var_ref):
    """One replica's normalized count path z -> (N(nz) - n^d)/sqrt(var_ref).

    ``var_ref`` must come from a prior variance estimate (or the theory
    value); the path itself uses a single realization.
    """
    process = make_process(process)
    if var_ref is None or not np.isfinite(var_ref) or var_ref <= 0.0:
        raise EstimatorError("coarse_grained_path needs a positive variance reference")
    zgrid = np.asarray(zgrid, dtype=float)
    shifts = zgrid.reshape(len(zgrid), -1)
    counts = sample_counts(process, float(n), shifts, seed, replica)
    return (counts - float(n) ** process.d) / math.sqrt(var_ref)


# ---------------------------------------------------------------------------
# cumulants
# ---------------------------------------------------------------------------

def _kstats_from_power_sums(sums):
    """Fisher k-statistics (unbiased cumulant estimators) from raw power sums."""
    r, s1, s2, s3, s4 = sums
    if r < 5:
        raise EstimatorError("need at least 5 replicas for k-statistics")
    k1 = s1 / r
    k2 = (r * s2 - s1 ** 2) / (r * (r - 1.0))
    k3 = (r * r * s3 - 3.0 * r * s2 * s1 + 2.0 * s1 ** 3) / (r * (r - 1.0) * (r - 2.0))
    k4 = ((r * r * (r + 1.0) * s4
           - 4.0 * r * (r + 1.0) * s3 * s1
           - 3.0 * r * (r - 1.0) * s2 ** 2
           + 12.0 * r * s2 * s1 ** 2
           - 6.0 * s1 ** 4)
          / (r * (r - 1.0) * (r - 2.0) * (r - 3.0)))
    return k1, k2, k3, k4


def cumulant_report(process, n, replicas, seed, threads=None):
    """k-statistics of the count across replicas, with normalized shape stats.

    Counts are centered at the known mean n^d before accumulating (cumulants
    of order >= 2 are shift invariant; centering keeps the power sums well
    inside float precision).  Skewness is k3/k2^{3/2}, excess kurtosis
    k4/k2^2, with jackknife standard errors over replica blocks.
    """
    process = make_process(process)
    if replicas < 100:
        raise EstimatorError(f"need at least 100 replicas for cumulants, got {replicas}")
    threads = resolve_threads(threads)
    origin = tuple([(0.0,) * process.d])
    stats = _run_blocks(_moment_block, process.descriptor(), float(n), origin,
                        seed, replicas, threads, float(n) ** process.d)
    total = _fsum_columns(stats)
    k1, k2, k3, k4 = _kstats_from_power_sums(total)
    if k2 <= 0.0:
        raise DegenerateVarianceError(
            f"degenerate count variance for {process.label()} at n = {n}")
    skew = k3 / k2 ** 1.5
    kurt = k4 / k2 ** 2
    loo = total[None, :] - stats
    sj, kj = np.empty(len(stats)), np.empty(len(stats))
    for j in range(len(stats)):
        _, b2, b3, b4 = _kstats_from_power_sums(loo[j])
        sj[j] = b3 / b2 ** 1.5
        kj[j] = b4 / b2 ** 2
    b = len(stats)
    se_s = math.sqrt((b - 1.0) / b * np.sum((sj - sj.mean()) ** 2))
    se_k = math.sqrt((b - 1.0) / b * np.sum((kj - kj.mean()) ** 2))
    return CumulantReport(process=process.label(), n=float(n), replicas=replicas,
                          k=(float(k1 + float(n) ** process.d), float(k2),
                             float(k3), float(k4)),
                          skewness=float(skew), excess_kurtosis=float(kurt),
                          se_skewness=se_s, se_kurtosis=se_k)
