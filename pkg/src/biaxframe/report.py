"""CSV time series and matplotlib figures for run artifacts.

Numeric CSV cells carry 17 significant digits so downstream diffs are exact.
Figures are rendered straight to files next to the CSVs.
"""

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

ENERGY_COLUMNS = ["t", "kinetic", "elastic", "d_visc", "d_rot1", "d_rot2",
                  "d_rot3", "d_beta12", "d_s3", "d_s4", "d_s5",
                  "total_dissipation", "residual"]
METRIC_COLUMNS = ["t", "phi", "u", "v", "f"]


def _fmt(x):
    return format(float(x), ".17g")


def write_energy_csv(path, ledgers):
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ENERGY_COLUMNS)
        for led in ledgers:
            row = led.channels()
            row["t"] = led.t
            w.writerow([_fmt(row[c]) for c in ENERGY_COLUMNS])


def write_metrics_csv(path, times, phi, u, v, f):
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRIC_COLUMNS)
        for row in zip(times, phi, u, v, f):
            w.writerow([_fmt(x) for x in row])


def render_energy_figure(path, ledgers):
    t = [l.t for l in ledgers]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(t, [l.kinetic for l in ledgers], label="kinetic")
    ax1.plot(t, [l.elastic for l in ledgers], label="elastic")
    ax1.plot(t, [l.total_energy for l in ledgers], "k--", label="total")
    ax1.set_ylabel("energy")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(t, [l.d_visc for l in ledgers], label="viscous")
    ax2.plot(t, [float(sum(l.d_rot)) for l in ledgers], label="rotational")
    ax2.plot(t, [l.d_beta12 + l.d_s3 + l.d_s4 + l.d_s5 for l in ledgers],
             label="alignment")
    ax2.plot(t, [abs(l.residual) for l in ledgers], ":", label="|residual|")
    ax2.set_yscale("log")
    ax2.set_xlabel("t")
    ax2.set_ylabel("dissipation")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)


def render_metrics_figure(path, times, phi, u, v):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(times, phi, label=r"$\Phi$")
    ax.plot(times, u, label="U")
    ax.plot(times, v, label="V")
    if any(x > 0 for x in phi):
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("weak metric")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)
