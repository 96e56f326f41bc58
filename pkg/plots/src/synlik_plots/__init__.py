"""Render figures from synlik CLI output CSVs.

Five figure kinds, one subcommand each:

- scatter-contour: bivariate chain scatter with contour overlays from a
  grid-density CSV (as written by `synlik tv --out`).
- marginals: per-parameter histogram panels overlaying several chains.
- sensitivity: per-parameter posterior-marginal overlays from a
  sensitivity study's marginals.csv.
- std-bias: estimator std and bias curves from appendixA_table.csv.
- boxplot: per-(n, estimator) log-likelihood boxes from
  appendixA_raw.csv; rows with infinite values are dropped.

This package only draws: every number comes from the CSVs. Schema
violations exit with code 2 and a descriptive message.
"""

import argparse
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__version__ = "0.1.0"

KINDS = ("scatter-contour", "marginals", "sensitivity", "std-bias", "boxplot")


class SchemaError(Exception):
    """Input CSV does not match the expected CLI schema."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple
    output: str
    labels: tuple = ()
    title: str = ""
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")


def _read_chain(path):
    """(draws, param_names) from a chain CSV."""
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if header[-2:] != ["loglike", "accepted"] or len(header) < 3:
        raise SchemaError(
            f"{path}: expected header 'param...,loglike,accepted', "
            f"got {','.join(header)!r}")
    try:
        table = np.loadtxt(str(path), delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric chain body ({exc})") from exc
    if table.shape[1] != len(header):
        raise SchemaError(f"{path}: row width does not match the header")
    return table[:, :-2], header[:-2]


def _read_grid(path):
    """(x_grid, y_grid, masses) from a grid-density CSV."""
    try:
        with open(path) as fh:
            rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if len(rows) < 2 or rows[0][0] != "":
        raise SchemaError(f"{path}: expected an axis header row starting "
                          "with an empty cell")
    try:
        y_grid = np.array([float(v) for v in rows[0][1:]])
        x_grid = np.array([float(r[0]) for r in rows[1:]])
        masses = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric grid cell ({exc})") from exc
    if masses.shape != (x_grid.size, y_grid.size):
        raise SchemaError(f"{path}: ragged grid body")
    return x_grid, y_grid, masses


def _read_table(path, expected_columns):
    """List of string-valued row dicts from a headered CSV."""
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            body = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if header != list(expected_columns):
        raise SchemaError(f"{path}: expected columns "
                          f"{','.join(expected_columns)!r}, got "
                          f"{','.join(header)!r}")
    for cells in body:
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row width does not match the header")
    return [dict(zip(header, cells)) for cells in body]


def _save(fig, spec):
    fig.savefig(spec.output, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return spec.output


def _label(spec, i, default):
    return spec.labels[i] if i < len(spec.labels) else default


def _render_scatter_contour(spec):
    draws, names = _read_chain(spec.inputs[0])
    i = int(spec.options.get("x", 0))
    j = int(spec.options.get("y", 1))
    if max(i, j) >= draws.shape[1]:
        raise SchemaError(f"{spec.inputs[0]}: components ({i},{j}) out of "
                          f"range for {draws.shape[1]} parameters")
    fig, ax = plt.subplots(figsize=(5, 4))
    thin = max(1, draws.shape[0] // 4000)
    ax.plot(draws[::thin, i], draws[::thin, j], ".", ms=2, alpha=0.4,
            color="steelblue", label=_label(spec, 0, "chain"))
    for k, grid_path in enumerate(spec.inputs[1:]):
        xg, yg, mass = _read_grid(grid_path)
        color = ["black", "crimson", "darkgreen"][k % 3]
        ax.contour(xg, yg, mass.T, levels=6, colors=color, linewidths=0.9)
        ax.plot([], [], color=color, label=_label(spec, k + 1, grid_path))
    ax.set_xlabel(names[i])
    ax.set_ylabel(names[j])
    ax.set_title(spec.title)
    ax.legend(fontsize=8)
    return _save(fig, spec)


def _render_marginals(spec):
    chains = [_read_chain(path) for path in spec.inputs]
    names = chains[0][1]
    for _, other in chains[1:]:
        if other != names:
            raise SchemaError("chains disagree on parameter names: "
                              f"{names} vs {other}")
    p = len(names)
    fig, axes = plt.subplots(1, p, figsize=(3.2 * p, 2.8), squeeze=False)
    for j, name in enumerate(names):
        ax = axes[0, j]
        for k, (draws, _) in enumerate(chains):
            ax.hist(draws[:, j], bins=60, density=True, histtype="step",
                    label=_label(spec, k, f"chain {k}"))
        ax.set_xlabel(name)
        if j == 0:
            ax.set_ylabel("density")
            ax.legend(fontsize=7)
    fig.suptitle(spec.title)
    return _save(fig, spec)


def _render_sensitivity(spec):
    rows = _read_table(spec.inputs[0], ("param", "n", "grid", "mass"))
    if not rows:
        raise SchemaError(f"{spec.inputs[0]}: empty marginals table")
    params = list(dict.fromkeys(r["param"] for r in rows))
    ns = list(dict.fromkeys(r["n"] for r in rows))
    fig, axes = plt.subplots(1, len(params), figsize=(3.2 * len(params), 2.8),
                             squeeze=False)
    for j, param in enumerate(params):
        ax = axes[0, j]
        for n in ns:
            pts = [(float(r["grid"]), float(r["mass"])) for r in rows
                   if r["param"] == param and r["n"] == n]
            pts.sort()
            grid, mass = zip(*pts)
            ax.plot(grid, mass, label=f"n={n}")
        ax.set_xlabel(param)
        if j == 0:
            ax.set_ylabel("cell mass")
            ax.legend(fontsize=7)
    fig.suptitle(spec.title)
    return _save(fig, spec)


def _render_std_bias(spec):
    rows = _read_table(spec.inputs[0],
                       ("n", "estimator", "bias", "std", "neg_inf_count"))
    if not rows:
        raise SchemaError(f"{spec.inputs[0]}: empty estimator table")
    estimators = list(dict.fromkeys(r["estimator"] for r in rows))
    fig, (ax_std, ax_bias) = plt.subplots(1, 2, figsize=(8, 3.2))
    for est in estimators:
        sub = sorted((int(r["n"]), float(r["std"]), float(r["bias"]))
                     for r in rows if r["estimator"] == est)
        ns = [s[0] for s in sub]
        ax_std.plot(ns, [s[1] for s in sub], "o-", label=est)
        ax_bias.plot(ns, [s[2] for s in sub], "o-", label=est)
    ax_std.set_xlabel("n")
    ax_std.set_ylabel("estimator std")
    ax_bias.set_xlabel("n")
    ax_bias.set_ylabel("estimator bias")
    ax_std.legend(fontsize=7)
    fig.suptitle(spec.title)
    return _save(fig, spec)


def _render_boxplot(spec):
    rows = _read_table(spec.inputs[0],
                       ("n", "estimator", "replicate", "loglike"))
    if not rows:
        raise SchemaError(f"{spec.inputs[0]}: empty log-likelihood table")
    groups = {}
    for r in rows:
        value = float(r["loglike"])
        # infinite estimates are ignored, matching the table convention
        if np.isfinite(value):
            groups.setdefault((int(r["n"]), r["estimator"]), []).append(value)
    keys = sorted(groups)
    fig, ax = plt.subplots(figsize=(max(5, 0.8 * len(keys)), 3.5))
    ax.boxplot([groups[k] for k in keys],
               tick_labels=[f"{est}\nn={n}" for n, est in keys])
    ax.set_ylabel("log-likelihood estimate")
    ax.tick_params(axis="x", labelsize=7)
    fig.suptitle(spec.title)
    return _save(fig, spec)


_RENDERERS = {
    "scatter-contour": _render_scatter_contour,
    "marginals": _render_marginals,
    "sensitivity": _render_sensitivity,
    "std-bias": _render_std_bias,
    "boxplot": _render_boxplot,
}


def render(spec):
    """Render one figure; returns the output path."""
    if not spec.inputs:
        raise SchemaError("at least one input CSV is required")
    return _RENDERERS[spec.kind](spec)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="synlik-plots",
        description="Render figures from synlik CLI output CSVs")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("inputs", nargs="+",
                       help="input CSVs (chain/grid/table per figure kind)")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--label", action="append", default=[],
                       help="series label; repeatable")
        p.add_argument("--title", default="")
        if kind == "scatter-contour":
            p.add_argument("--x", type=int, default=0)
            p.add_argument("--y", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    options = {}
    if args.kind == "scatter-contour":
        options = {"x": args.x, "y": args.y}
    spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs), output=args.out,
                    labels=tuple(args.label), title=args.title,
                    options=options)
    try:
        path = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
