"""Render beliefnet campaign CSVs into the standard figures.

Three figure kinds: flip-probability curves (error-bar simulation series
plus a solid exact curve), the adoption phase diagram heatmap, and its
cross sections. The renderers consume the CSV columns verbatim (no
smoothing, no recomputation) and reject files whose header does not match
the campaign schema exactly.
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from dataclasses import dataclass, field

FIG2_COLUMNS = ["scenario", "variant", "m", "mean_flip", "std_flip", "analytical"]
PHASE_COLUMNS = ["rho0", "omega", "rho_inf_mean", "rho_inf_stderr", "phase"]
CROSS_COLUMNS = ["rho0", "omega", "rho_inf_mean", "rho_inf_stderr"]

# orange for the stabilizing (simple) scenario, blue for the competing
# stable systems (complex) scenario
SCENARIO_COLORS = {1: "tab:orange", 2: "tab:blue"}


class SchemaError(ValueError):
    """CSV header or contents do not match the campaign schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str                     # "fig2", "fig4-phase", "fig4-cross"
    inputs: tuple
    output: str
    colors: dict = field(default_factory=lambda: dict(SCENARIO_COLORS))

    def __post_init__(self):
        if self.kind not in ("fig2", "fig4-phase", "fig4-cross"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(self.inputs))


def read_table(path, expected_columns):
    """Rows of a campaign CSV, schema-checked; empty tables are rejected."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected_columns:
            missing = [c for c in expected_columns if c not in header]
            unexpected = [c for c in header if c not in expected_columns]
            raise SchemaError(
                f"{path}: header mismatch (missing: {missing or 'none'}, "
                f"unexpected: {unexpected or 'none'}, expected order {expected_columns})"
            )
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _floats(rows, column):
    return np.array([float(r[column]) for r in rows])


def build_fig2_figure(csv_path, colors=None):
    """Figure for the flip-probability curves; returns it for inspection.

    Error bars show the repeat spread of the simulated proportions; when the
    analytical column is filled it is drawn as a solid line underneath.
    """
    colors = colors or SCENARIO_COLORS
    rows = read_table(csv_path, FIG2_COLUMNS)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    by_key = {}
    for r in rows:
        by_key.setdefault((int(r["scenario"]), r["variant"]), []).append(r)
    for (scenario, variant), group in sorted(by_key.items()):
        color = colors.get(scenario, "tab:gray")
        m = _floats(group, "m")
        exact = [r["analytical"] for r in group]
        if all(x != "" for x in exact):
            ax.plot(m, np.array([float(x) for x in exact]), "-", color=color,
                    label=f"scenario {scenario} exact", zorder=1)
        ax.errorbar(m, _floats(group, "mean_flip"), yerr=_floats(group, "std_flip"),
                    fmt=":o", color=color, markersize=3.5, capsize=2,
                    label=f"scenario {scenario} simulated ({variant})", zorder=2)
    ax.set_xlabel("dissimilar neighbors m")
    ax.set_ylabel("flip proportion")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def render_fig2(csv_path, out_path, colors=None):
    fig = build_fig2_figure(csv_path, colors=colors)
    fig.savefig(out_path, dpi=150, metadata={})
    plt.close(fig)
    return out_path


def render_fig4_phase(csv_path, out_path):
    """Adoption heatmap over the (omega, rho0) grid."""
    rows = read_table(csv_path, PHASE_COLUMNS)
    rho0s = sorted({float(r["rho0"]) for r in rows})
    omegas = sorted({float(r["omega"]) for r in rows})
    grid = np.full((len(rho0s), len(omegas)), np.nan)
    for r in rows:
        i = rho0s.index(float(r["rho0"]))
        j = omegas.index(float(r["omega"]))
        grid[i, j] = float(r["rho_inf_mean"])
    fig, ax = plt.subplots(figsize=(6, 4.2))
    mesh = ax.pcolormesh(omegas, rho0s, grid, cmap="viridis", vmin=0.0, vmax=1.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="stationary adoption")
    ax.set_xlabel("mixing parameter")
    ax.set_ylabel("initial zealot fraction")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata={})
    plt.close(fig)
    return out_path


def render_fig4_cross(csv_path, out_path):
    """Adoption vs mixing parameter, one stacked panel per zealot fraction."""
    rows = read_table(csv_path, CROSS_COLUMNS)
    by_rho0 = {}
    for r in rows:
        by_rho0.setdefault(float(r["rho0"]), []).append(r)
    rho0s = sorted(by_rho0, reverse=True)
    fig, axes = plt.subplots(len(rho0s), 1, figsize=(5.5, 2.2 * len(rho0s)),
                             sharex=True, squeeze=False)
    for ax, rho0 in zip(axes[:, 0], rho0s):
        group = by_rho0[rho0]
        ax.errorbar(_floats(group, "omega"), _floats(group, "rho_inf_mean"),
                    yerr=_floats(group, "rho_inf_stderr"),
                    fmt="-o", markersize=3.5, capsize=2, color="tab:purple")
        ax.set_ylabel("adoption")
        ax.set_ylim(-0.05, 1.05)
        ax.annotate(f"zealot fraction {rho0:g}", xy=(0.02, 0.85),
                    xycoords="axes fraction", fontsize=9)
    axes[-1, 0].set_xlabel("mixing parameter")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata={})
    plt.close(fig)
    return out_path


def render(spec):
    """Dispatch a FigureSpec to its renderer; returns the output path."""
    if spec.kind == "fig2":
        (path,) = spec.inputs
        return render_fig2(path, spec.output, colors=spec.colors)
    if spec.kind == "fig4-phase":
        (path,) = spec.inputs
        return render_fig4_phase(path, spec.output)
    (path,) = spec.inputs
    return render_fig4_cross(path, spec.output)


def main_fig2(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: render_fig2 <fig2.csv> <out.png>", file=sys.stderr)
        return 1
    try:
        render_fig2(argv[0], argv[1])
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {argv[1]}")
    return 0


def main_fig4(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 3:
        print("usage: render_fig4 <fig4_phase.csv> <fig4_cross.csv> <out_prefix>",
              file=sys.stderr)
        return 1
    phase_csv, cross_csv, prefix = argv
    try:
        phase_out = render_fig4_phase(phase_csv, f"{prefix}_phase.png")
        cross_out = render_fig4_cross(cross_csv, f"{prefix}_cross.png")
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {phase_out} and {cross_out}")
    return 0
