"""Figures for experiment results, written next to the CSV output."""

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLES = {"LZRS77": dict(marker="o", color="tab:blue"),
          "LZRSa77": dict(marker="s", color="tab:red")}


def _figure(width=6.0):
    golden = (5 ** 0.5 - 1) / 2
    fig, ax = plt.subplots(figsize=(width, width * golden))
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def plot_success_curves(reports, path, title=None):
    """Successful recoveries vs BER, one series per algorithm."""
    series = defaultdict(list)
    for r in reports:
        series[(r.algorithm, r.e1)].append((r.ber, r.successes, r.trials))
    fig, ax = _figure()
    for (alg, e), pts in sorted(series.items()):
        pts.sort()
        label = f"{alg} (e={e})" if alg == "LZRS77" else f"{alg} (e1={e})"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], linestyle="-", label=label,
                **STYLES.get(alg, {}))
    if any(r.ber > 0 for r in reports):
        ax.set_xscale("log")
    trials = max((r.trials for r in reports), default=0)
    ax.set_ylim(-2, trials + 2)
    ax.set_xlabel("bit error rate")
    ax.set_ylabel(f"successful recoveries / {trials}")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_parity_profile(plan, path, constant_e=None, title=None):
    """Per-block parity budget e_n of an adaptive plan."""
    fig, ax = _figure()
    es = plan.e_sequence
    ax.step(range(1, len(es) + 1), es, where="mid", color="tab:red", label="adaptive $e_n$")
    if constant_e is not None:
        ax.axhline(constant_e, color="tab:blue", linestyle="--", label=f"max constant e = {constant_e}")
    ax.set_xlabel("block")
    ax.set_ylabel("correctable bytes per block")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def figure_paths(csv_path, inputs):
    """``results.csv`` -> ``results-<input>.png`` for each input id."""
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    return {name: stem.parent / f"{stem.name}-{_slug(name)}.png" for name in inputs}


def _slug(name):
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def render_bench(reports, csv_path):
    by_input = defaultdict(list)
    for r in reports:
        by_input[r.input].append(r)
    paths = figure_paths(csv_path, by_input)
    for name, rs in by_input.items():
        plot_success_curves(rs, paths[name], title=name)
    return list(paths.values())
