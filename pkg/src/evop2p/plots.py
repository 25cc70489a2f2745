"""Figure rendering for experiment reports.

Every plot reads the in-memory averaged traces the CLI just wrote as CSV
and drops a PNG next to them, so a report directory is self-contained:
delimited data for further analysis, figures for a quick look.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["plot_gene_traces", "plot_qhr", "plot_measures",
           "plot_qhr_comparison", "plot_settling"]

_MINUTE = 60.0


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_gene_traces(avg, variant, path):
    """Mean gene values over time with +/-1 cross-peer std bands."""
    t = [row["t"] / _MINUTE for row in avg]
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.2), sharey=True)
    for i, ax in enumerate(axes):
        mean = [row[f"m{i}_mean_avg"] for row in avg]
        std = [row[f"m{i}_std_avg"] for row in avg]
        ax.plot(t, mean, lw=1.2)
        ax.fill_between(t, [m - s for m, s in zip(mean, std)],
                        [m + s for m, s in zip(mean, std)], alpha=0.25)
        ax.set_xlabel("time (min)")
        ax.set_title(f"$M_{i}$ ({variant})")
        ax.grid(alpha=0.3)
    axes[0].set_ylabel("gene value")
    _finish(fig, path)


def plot_qhr(avg, variant, path):
    t = [row["t"] / _MINUTE for row in avg]
    mean = [row["qhr_mean_avg"] for row in avg]
    std = [row["qhr_std_avg"] for row in avg]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(t, mean, lw=1.4)
    ax.fill_between(t, [m - s for m, s in zip(mean, std)],
                    [m + s for m, s in zip(mean, std)], alpha=0.25)
    ax.set_xlabel("time (min)")
    ax.set_ylabel("global QHR")
    ax.set_ylim(0.0, 1.0)
    ax.set_title(f"Query hit ratio ({variant})")
    ax.grid(alpha=0.3)
    _finish(fig, path)


def plot_measures(avg, variant, path):
    t = [row["t"] / _MINUTE for row in avg]
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    for column, label in (("e_mean_avg", "E"), ("s_mean_avg", "S"),
                          ("c_mean_avg", "C"), ("h_mean_avg", "H")):
        ax.plot(t, [row[column] for row in avg], lw=1.2, label=label)
    ax.set_xlabel("time (min)")
    ax.set_ylabel("measure")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"Emergence / self-organization / complexity / homeostasis "
                 f"({variant})")
    ax.legend(ncol=4, fontsize=9)
    ax.grid(alpha=0.3)
    _finish(fig, path)


def plot_qhr_comparison(avg_by_variant, path):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for variant, avg in avg_by_variant.items():
        t = [row["t"] / _MINUTE for row in avg]
        ax.plot(t, [row["qhr_mean_avg"] for row in avg], lw=1.4,
                label=variant)
    ax.set_xlabel("time (min)")
    ax.set_ylabel("global QHR")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("Query hit ratio by fitness function")
    ax.legend()
    ax.grid(alpha=0.3)
    _finish(fig, path)


def plot_settling(rows, path):
    """rows: (variant, ta, settling_seconds) tuples."""
    by_variant = {}
    for variant, ta, ts in rows:
        by_variant.setdefault(variant, []).append((ta, ts))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for variant, points in by_variant.items():
        points.sort()
        ax.plot([p[0] for p in points], [p[1] / _MINUTE for p in points],
                marker="o", lw=1.2, label=variant)
    ax.set_xlabel("adaptation period $T_a$ (s)")
    ax.set_ylabel("settling time (min)")
    ax.set_title("Settling time of the global QHR")
    ax.legend()
    ax.grid(alpha=0.3)
    _finish(fig, path)
