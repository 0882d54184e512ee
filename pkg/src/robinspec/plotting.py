"""Static figures for the CLI ``--figure`` option (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_spectrum(spec, path, title=""):
    vals = spec.values()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    idx = np.arange(1, len(vals) + 1)
    ax.plot(idx, vals, "o-", ms=4)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title, fontsize=9)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_sweep(sweep, path, title="", log_x=False):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for j in range(sweep.values.shape[1]):
        ax.plot(sweep.params, sweep.values[:, j], ".-", label=f"lambda_{j + 1}")
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(sweep.param_name)
    ax.set_ylabel("eigenvalue")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_report(report, path):
    """Left- and right-hand sides per case; crossover reports get a log alpha axis."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    lhs = [c.lhs for c in report.cases]
    rhs = [c.rhs for c in report.cases]
    if report.experiment == "crossover":
        alphas = [float(c.param.split("=")[1]) for c in report.cases]
        ax.plot(alphas, np.subtract(lhs, rhs), "o-", ms=3, label="Delta")
        ax.axhline(0.0, color="k", lw=0.8)
        star = report.extra.get("alpha_star")
        if star:
            ax.axvline(star, color="r", ls="--", lw=0.8, label=f"alpha* = {star:g}")
        ax.set_xscale("log")
        ax.set_xlabel("alpha")
        ax.set_ylabel("lambda_k(domain) - lambda_k(D_k)")
    else:
        x = np.arange(len(report.cases))
        ax.bar(x - 0.2, lhs, 0.4, label="lhs")
        ax.bar(x + 0.2, rhs, 0.4, label="rhs")
        ax.set_xticks(x, [c.param for c in report.cases], fontsize=7, rotation=20)
        ax.set_ylabel("eigenvalue")
    ax.set_title(f"{report.experiment}: {report.verdict}", fontsize=9)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_wentzell(points, gamma, path, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    n = [fp.n for fp in points]
    ax.plot(n, [fp.Lambda for fp in points], "o-", label="Lambda_n")
    ax.axhline(gamma, color="r", ls="--", lw=0.8, label="gamma")
    ax.set_xlabel("n")
    ax.set_ylabel("Wentzell eigenvalue")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)
