"""Figure builders over loaded CSV rows (no statistics recomputed here)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import SchemaError, column  # noqa: E402

# fixed palette: slowly varying in black, Poisson end in blue, as in the
# usual presentation of this kernel family
FAMILY_COLORS = ["black", "tab:red", "tab:green", "tab:olive", "tab:blue",
                 "tab:purple", "tab:brown"]


def save(fig, out_path):
    meta = {"Date": None} if out_path.endswith(".svg") else None
    fig.savefig(out_path, metadata=meta)
    plt.close(fig)


def cov_family_figure(rows):
    """One curve per exponent a; a jump at |z| = 1 shows up for a = 0."""
    a_values = sorted({r["a"] for r in rows}, key=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for color, a in zip(FAMILY_COLORS, a_values):
        sub = [r for r in rows if r["a"] == a]
        z = column(sub, "z1")
        cov = column(sub, "cov")
        order = np.argsort(z)
        ax.plot(z[order], cov[order], color=color, lw=1.6, label=f"a = {a}")
    ax.set_xlabel("shift z")
    ax.set_ylabel("cov(z)")
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    return fig


def paths_figure(rows_per_input, labels):
    """Overlaid coarse-grained paths, one color per input file."""
    grids = []
    for rows in rows_per_input:
        reps = sorted({r["replica"] for r in rows}, key=int)
        z = column([r for r in rows if r["replica"] == reps[0]], "z")
        grids.append(z)
    for other in grids[1:]:
        if len(other) != len(grids[0]) or not np.allclose(other, grids[0]):
            raise SchemaError("paths", [], [],
                              reason="path inputs use different z grids")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    colors = ["tab:blue", "tab:orange", "tab:green", "tab:red"]
    for rows, label, color in zip(rows_per_input, labels, colors):
        for i, rep in enumerate(sorted({r["replica"] for r in rows}, key=int)):
            sub = [r for r in rows if r["replica"] == rep]
            z = column(sub, "z")
            v = column(sub, "value")
            order = np.argsort(z)
            ax.plot(z[order], v[order], color=color, lw=1.0,
                    alpha=0.9 if i == 0 else 0.45,
                    label=label if i == 0 else None)
    ax.set_xlabel("shift z")
    ax.set_ylabel("normalized count")
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    return fig


def var_growth_figure(rows):
    n = column(rows, "n")
    var = column(rows, "var_hat")
    se = column(rows, "se")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(n, var, yerr=se, fmt="o-", ms=4, lw=1.2, capsize=3)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("box side n")
    ax.set_ylabel("Var(count)")
    fig.tight_layout()
    return fig


def overlay_figure(rows):
    """Monte Carlo covariance curve with its matched finite-box values."""
    z = column(rows, "z1")
    cov_hat = column(rows, "cov_hat")
    se = column(rows, "se")
    order = np.argsort(z)
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.errorbar(z[order], cov_hat[order], yerr=3.0 * se[order], fmt="o",
                ms=3.5, lw=1.0, capsize=2, label="Monte Carlo (3 s.e.)")
    theory = [r["cov_theory"] for r in rows]
    if all(t != "" for t in theory):
        th = np.array([float(t) for t in theory])
        ax.plot(z[order], th[order], "-", color="black", lw=1.2,
                label="finite-box identity")
    ax.set_xlabel("shift z")
    ax.set_ylabel("cov(z)")
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    return fig
