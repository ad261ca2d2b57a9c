"""
Static figure rendering for experiment records.

Each experiment kind gets one matplotlib figure, written next to the
delimited output by the CLI.  All rendering goes through the Agg backend
so it works headless.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def spectrum_figure(record_obj: dict) -> "plt.Figure":
    """Rank-by-rank comparison of empirical and predicted eigenvalues."""
    row = record_obj["per_n"][-1]
    pos_mean = np.asarray(row["pos_mean"])
    neg_mean = np.asarray(row["neg_mean"])
    pos_sd = np.asarray(row["pos_sd"])
    neg_sd = np.asarray(row["neg_sd"])
    pred_pos = np.asarray(row["predicted_pos"])
    pred_neg = np.asarray(row["predicted_neg"])

    fig, ax = plt.subplots(figsize=(7, 5))
    ranks = np.arange(1, len(pos_mean) + 1)
    ax.errorbar(ranks, pos_mean, yerr=pos_sd, fmt="^", color="tab:blue",
                label="empirical (+ part)", capsize=2)
    ax.errorbar(ranks, neg_mean, yerr=neg_sd, fmt="v", color="tab:red",
                label="empirical (- part)", capsize=2)
    ax.plot(ranks, pred_pos, "o", mfc="none", color="tab:blue", label="predicted (+ part)")
    ax.plot(ranks, pred_neg, "o", mfc="none", color="tab:red", label="predicted (- part)")
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("rank")
    ax.set_ylabel("eigenvalue")
    ax.set_title(f"{record_obj['experiment_id']}  (n={row['n']}, d={row['metric_d']:.2e})")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def decay_figure(record_obj: dict) -> "plt.Figure":
    """Log-log decay of the trace variance and fourth centered moment."""
    ns = np.asarray([row["n"] for row in record_obj["per_n"]], dtype=float)
    var = np.asarray([row["variance"] for row in record_obj["per_n"]])
    fourth = np.asarray([row["fourth_central"] for row in record_obj["per_n"]])
    fits = record_obj.get("fits") or {}

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(ns, var, "o-", label="variance")
    ax.loglog(ns, fourth, "s-", label="fourth centered moment")
    for key, series in (("variance_slope", var), ("fourth_slope", fourth)):
        slope = fits.get(key)
        if slope is not None:
            ref = series[0] * (ns / ns[0]) ** slope
            ax.loglog(ns, ref, "--", lw=0.8, label=f"{key.split('_')[0]} fit {slope:.2f}")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("statistic")
    ax.set_title(record_obj["experiment_id"])
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


def moments_figure(record_obj: dict) -> "plt.Figure":
    """Paired word/factorized means with the absolute gap per word."""
    row = record_obj["per_n"][-1]
    words = [r["word"] for r in row["rows"]]
    emp = [r["empirical_mean"] for r in row["rows"]]
    fac = [r["factorized_mean"] for r in row["rows"]]
    xs = np.arange(len(words))

    fig, ax = plt.subplots(figsize=(7.5, 5))
    ax.plot(xs, emp, "^", label="Tr(word)")
    ax.plot(xs, fac, "o", mfc="none", label="factorized product")
    ax.set_xticks(xs)
    ax.set_xticklabels(words, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("trial mean")
    ax.set_title(f"{record_obj['experiment_id']}  (n={row['n']})")
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


def tau_prime_figure(record_obj: dict) -> "plt.Figure":
    """First-order trace values per dimension against the predicted limit."""
    ns = [row["n"] for row in record_obj["per_n"]]
    means = [row["mean"] for row in record_obj["per_n"]]
    ses = [row["se"] for row in record_obj["per_n"]]
    prediction = (record_obj.get("fits") or {}).get("prediction")

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.errorbar(ns, means, yerr=ses, fmt="o-", capsize=3, label="trial mean of Tr(P)")
    if prediction is not None:
        ax.axhline(prediction[0], color="tab:green", ls="--", label="predicted limit")
    ax.set_xscale("log")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("Tr(P)")
    ax.set_title(record_obj["experiment_id"])
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


FIGURES = {
    "spectrum": spectrum_figure,
    "decay": decay_figure,
    "moments": moments_figure,
    "tau-prime": tau_prime_figure,
}


def render(record_obj: dict, experiment: str, path) -> None:
    fig = FIGURES[experiment](record_obj)
    fig.savefig(path, dpi=150)
    plt.close(fig)
