"""Configuration-driven experiment runner.

Subcommands: run, pilot, tv, study. Configs are INI files; the schema is
documented in README.md and validated here with messages pointing at the
offending line. Every output directory gets a manifest of content
hashes so reruns can be compared byte for byte.

Exit codes: 0 success, 2 configuration or input error,
3 chain initialization failure.
"""

import argparse
import configparser
import hashlib
import pathlib
import re
import sys
import time

import numpy as np

from . import __version__
from .datasets import MODEL_IDS, build_model
from .diagnostics import (chain_bandwidth, chain_marginal_mass, chain_to_grid,
                          estimator_bias_std_study, exact_ma2_posterior_grid,
                          smooth_grid_density, total_variation)
from .errors import (EmptyChain, GridMismatch, InitializationFailure,
                     NoFeasibleLambda)
from .estimators import tune_shrinkage
from .mcmc import (EstimatorSpec, ProposalSpec, effective_sample_size,
                   run_mcmc_abc, run_mcmc_sl, simulate_statistics)


class ConfigError(Exception):
    """Invalid configuration; carries a file/line pointer when known."""


def _line_of(path, needle):
    """1-based line number of the option or section `needle`, or None."""
    key = re.compile(rf"^\s*{re.escape(needle)}\s*[=:]")
    section = re.compile(rf"^\s*\[{re.escape(needle)}\]")
    try:
        with open(path) as fh:
            for number, line in enumerate(fh, start=1):
                if key.match(line) or section.match(line):
                    return number
    except OSError:
        return None
    return None


def _fail_config(path, option, message):
    line = _line_of(path, option)
    where = f"{path}:{line}" if line else f"{path}"
    raise ConfigError(f"{where}: {option}: {message}")


class _Section:
    """Typed, validated access to one INI section."""

    def __init__(self, path, parser, name):
        self.path = path
        self.name = name
        self.options = dict(parser[name]) if parser.has_section(name) else {}

    def _get(self, option, default, cast, check=None, describe=""):
        raw = self.options.pop(option, None)
        if raw is None:
            if default is _REQUIRED:
                _fail_config(self.path, self.name,
                             f"missing required option {option!r}")
            return default
        try:
            value = cast(raw)
        except (TypeError, ValueError):
            _fail_config(self.path, option, f"cannot parse {raw!r}")
        if check is not None and not check(value):
            _fail_config(self.path, option, f"{raw!r} violates {describe}")
        return value

    def get_str(self, option, default=None, choices=None):
        check = (lambda v: v in choices) if choices else None
        describe = f"one of {choices}" if choices else ""
        return self._get(option, default, str.strip, check, describe)

    def get_int(self, option, default=None, low=None):
        check = (lambda v: low is None or v >= low)
        return self._get(option, default, int, check, f">= {low}")

    def get_float(self, option, default=None, low=None):
        check = (lambda v: low is None or v >= low)
        return self._get(option, default, float, check, f">= {low}")

    def get_floats(self, option, default=None):
        return self._get(option, default,
                         lambda raw: np.array([float(x) for x in raw.split(",")]))

    def reject_unknown(self):
        for option in self.options:
            _fail_config(self.path, option,
                         f"unknown option in section [{self.name}]")


_REQUIRED = object()


def load_config(path):
    """Parse and validate an experiment config; raises ConfigError."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep option case, T vs t matters
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not read:
        raise ConfigError(f"{path}: cannot read config file")

    exp = _Section(path, parser, "experiment")
    cfg = {
        "model": exp.get_str("model", _REQUIRED, choices=MODEL_IDS),
        "estimator": exp.get_str("estimator", "semiparametric",
                                 choices=("gaussian", "semiparametric")),
        "shrinkage": exp.get_str("shrinkage", None),
        "tune_target": exp.get_float("tune_target", 1.5, low=0.0),
        "sampler": exp.get_str("sampler", "sl", choices=("sl", "abc")),
        "tolerance": exp.get_float("tolerance", None, low=0.0),
        "n": exp.get_int("n", _REQUIRED, low=3),
        "T": exp.get_int("T", _REQUIRED, low=1),
        "seed": exp.get_int("seed", 0, low=0),
        "theta0": exp.get_floats("theta0", None),
        "proposal": exp.get_str("proposal", None),
        "proposal_scale": exp.get_float("proposal_scale", None, low=0.0),
        "workers": exp.get_int("workers", 1, low=1),
        "burn_in": exp.get_int("burn_in", 0, low=0),
        "abc_cov_sims": exp.get_int("abc_cov_sims", 2000, low=3),
    }
    exp.reject_unknown()

    tr = _Section(path, parser, "transform")
    cfg["epsilon"] = tr.get_float("epsilon", 0.0)
    cfg["delta"] = tr.get_float("delta", 1.0, low=0.0)
    cfg["power"] = tr.get_float("power", 1.0, low=0.0)
    tr.reject_unknown()

    known = {"experiment", "transform"}
    for section in parser.sections():
        if section not in known:
            _fail_config(path, section, "unknown section")

    if cfg["shrinkage"] not in (None, "auto"):
        try:
            cfg["shrinkage"] = float(cfg["shrinkage"])
        except ValueError:
            _fail_config(path, "shrinkage", "expected a float or 'auto'")
        if not 0.0 <= cfg["shrinkage"] <= 1.0:
            _fail_config(path, "shrinkage", "must lie in [0, 1]")
    if cfg["sampler"] == "abc" and cfg["tolerance"] is None:
        _fail_config(path, "tolerance", "required when sampler = abc")
    return cfg


def _resolve_proposal(cfg, p, config_dir):
    if cfg["proposal"] is not None:
        path = config_dir / cfg["proposal"]
        if not path.exists():
            raise ConfigError(f"{path}: proposal covariance file not found")
        cov = np.loadtxt(str(path), delimiter=",", ndmin=2)
    elif cfg["proposal_scale"] is not None:
        cov = cfg["proposal_scale"] * np.eye(p)
    else:
        raise ConfigError("config needs either proposal or proposal_scale")
    if cov.shape != (p, p):
        raise ConfigError(
            f"proposal covariance is {cov.shape}, expected ({p}, {p})")
    return ProposalSpec(cov)


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        if path.name == "metadata.ini":
            # wall time is the one intentionally non-reproducible field;
            # strip it so identical configs give identical manifests
            lines = [ln for ln in fh.readlines()
                     if not ln.startswith(b"wall_time_seconds")]
            digest.update(b"".join(lines))
        else:
            for block in iter(lambda: fh.read(1 << 16), b""):
                digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir):
    entries = sorted(p for p in out_dir.iterdir()
                     if p.is_file() and p.name != "manifest.txt")
    with open(out_dir / "manifest.txt", "w") as fh:
        for path in entries:
            fh.write(f"{_sha256(path)}  {path.name}\n")


def write_chain_csv(path, chain, param_names):
    header = ",".join(list(param_names) + ["loglike", "accepted"])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row, loglike, acc in zip(chain.draws, chain.loglikes,
                                     chain.accepted):
            cells = [f"{v:.17g}" for v in row]
            fh.write(",".join(cells + [f"{loglike:.17g}", str(int(acc))]) + "\n")


def read_chain_csv(path):
    """(draws, loglikes, accepted, param_names) from a chain CSV."""
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    table = np.loadtxt(str(path), delimiter=",", skiprows=1, ndmin=2)
    return table[:, :-2], table[:, -2], table[:, -1], names[:-2]


def _write_metadata(path, cfg, chain, wall_time, extra=None):
    meta = configparser.ConfigParser()
    meta.optionxform = str
    meta["config"] = {k: str(v) for k, v in cfg.items() if v is not None}
    run = {
        "version": __version__,
        "wall_time_seconds": f"{wall_time:.3f}",
        "acceptance_rate": f"{chain.acceptance_rate:.6f}",
        "estimator": chain.estimator,
    }
    if chain.length >= 100:
        for j in range(chain.draws.shape[1]):
            run[f"ess_component_{j}"] = (
                f"{effective_sample_size(chain, j):.1f}")
    if extra:
        run.update(extra)
    meta["run"] = run
    with open(path, "w") as fh:
        meta.write(fh)


def _run_chain(cfg, workers, out_dir, pilot=False):
    model, observed = build_model(cfg["model"], epsilon=cfg["epsilon"],
                                  delta=cfg["delta"], power=cfg["power"])
    theta0 = cfg["theta0"]
    if theta0 is None:
        theta0 = model.true_params
    p = theta0.size
    proposal = _resolve_proposal(cfg, p, pathlib.Path(cfg["_dir"]))

    extra = {}
    start = time.perf_counter()
    if cfg["sampler"] == "abc":
        maha_batch = simulate_statistics(model, theta0, cfg["abc_cov_sims"],
                                         cfg["seed"], 0, workers=workers,
                                         phase=0)
        chain = run_mcmc_abc(model, observed, proposal, cfg["tolerance"],
                             np.cov(maha_batch, rowvar=False), cfg["T"],
                             theta0, cfg["seed"])
    else:
        shrink = cfg["shrinkage"]
        if shrink == "auto":
            shrink = tune_shrinkage(model, theta0, cfg["n"], observed,
                                    target_std=cfg["tune_target"],
                                    seed=cfg["seed"])
            extra["tuned_shrinkage"] = f"{shrink:.3f}"
        if cfg["estimator"] == "gaussian":
            estimator = EstimatorSpec("gaussian")
        elif shrink is not None:
            estimator = EstimatorSpec("semiparametric-shrunk", shrink)
        else:
            estimator = EstimatorSpec("semiparametric")
        chain = run_mcmc_sl(model, estimator, observed, proposal, cfg["n"],
                            cfg["T"], theta0, cfg["seed"], workers=workers)
    wall = time.perf_counter() - start

    out_dir.mkdir(parents=True, exist_ok=True)
    write_chain_csv(out_dir / "chain.csv", chain, model.param_names)
    if pilot:
        kept = chain.draws[cfg["burn_in"]:]
        if kept.shape[0] < 2:
            raise ConfigError("burn_in leaves fewer than 2 draws for the "
                              "pilot covariance")
        # proposals live in the unconstrained space, so the pilot
        # covariance is taken there
        unconstrained = np.stack([model.transform.forward(row) for row in kept])
        scaled = np.cov(unconstrained, rowvar=False) * (2.38 ** 2 / p)
        np.savetxt(out_dir / "proposal.csv", np.atleast_2d(scaled),
                   delimiter=",", fmt="%.17g")
    _write_metadata(out_dir / "metadata.ini", cfg, chain, wall, extra)
    write_manifest(out_dir)
    print(f"wrote {out_dir / 'chain.csv'} "
          f"(T={chain.length}, acceptance={chain.acceptance_rate:.3f})")


def cmd_run(args, pilot=False):
    cfg = load_config(args.config)
    cfg["_dir"] = pathlib.Path(args.config).resolve().parent
    if args.seed is not None:
        cfg["seed"] = args.seed
    workers = args.workers if args.workers else cfg["workers"]
    out_dir = pathlib.Path(args.out) if args.out else pathlib.Path(
        f"{cfg['model']}_{cfg['sampler']}_{cfg['estimator']}")
    _run_chain(cfg, workers, out_dir, pilot=pilot)
    return 0


def _shared_grid(samples, bins, lo=None, hi=None):
    samples = np.concatenate(samples)
    if lo is None:
        lo = samples.min()
    if hi is None:
        hi = samples.max()
    pad = 0.05 * (hi - lo)
    return np.linspace(lo - pad, hi + pad, bins)


def cmd_tv(args):
    chain_path = pathlib.Path(args.chain)
    if not chain_path.exists():
        raise ConfigError(f"{chain_path}: chain file not found")
    draws, _, _, _ = read_chain_csv(chain_path)
    i, j = (int(c) for c in args.components.split(","))
    burn = args.burn_in

    pools = [draws[burn:, i]], [draws[burn:, j]]
    ref_draws = None
    if args.ref_chain:
        ref_path = pathlib.Path(args.ref_chain)
        if not ref_path.exists():
            raise ConfigError(f"{ref_path}: reference chain not found")
        ref_draws, _, _, _ = read_chain_csv(ref_path)
        pools[0].append(ref_draws[burn:, i])
        pools[1].append(ref_draws[burn:, j])
    elif not args.exact_ma2:
        raise ConfigError("tv needs --ref-chain or --exact-ma2")

    x_grid = _shared_grid(pools[0], args.bins)
    y_grid = _shared_grid(pools[1], args.bins)
    density = chain_to_grid(draws, (i, j), x_grid, y_grid, burn)

    if ref_draws is not None:
        reference = chain_to_grid(ref_draws, (i, j), x_grid, y_grid, burn)
    else:
        observed = np.loadtxt(args.exact_ma2, delimiter=",", ndmin=1)
        reference = exact_ma2_posterior_grid(observed, x_grid, y_grid)
        # blur the exact grid with the chain's bandwidths so the distance
        # is not dominated by KDE smoothing bias
        hx = chain_bandwidth(draws[burn:, i], x_grid)
        hy = chain_bandwidth(draws[burn:, j], y_grid)
        reference = smooth_grid_density(reference, hx, hy)

    value = total_variation(density, reference)
    print(f"tv {value:.6f}")
    if args.out:
        out_dir = pathlib.Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "tv.txt", "w") as fh:
            fh.write(f"{value:.6f}\n")
        write_grid_csv(out_dir / "grid_chain.csv", density)
        write_grid_csv(out_dir / "grid_ref.csv", reference)
        write_manifest(out_dir)
    return 0


def write_grid_csv(path, grid_density):
    """Grid density as CSV: first row the y axis, first column the x
    axis, body the cell masses."""
    with open(path, "w") as fh:
        fh.write("," + ",".join(f"{v:.17g}" for v in grid_density.y_grid)
                 + "\n")
        for x, row in zip(grid_density.x_grid, grid_density.density):
            fh.write(f"{x:.17g}," + ",".join(f"{m:.17g}" for m in row) + "\n")


def _write_table(path, rows, columns):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in columns) + "\n")


def _study_appendix_a(args, out_dir):
    deltas = [float(x) for x in args.deltas.split(",")]
    n_grid = [int(x) for x in args.n_grid.split(",")]
    table = []
    raw_rows = []
    for delta in deltas:
        rows, raw = estimator_bias_std_study(
            args.d, args.epsilon, delta, n_grid, args.replicates,
            seed=0 if args.seed is None else args.seed)
        for row in rows:
            row = dict(row, estimator=f"{row['estimator']}[delta={delta:g}]")
            table.append(row)
        for row in raw:
            raw_rows.append(dict(row,
                                 estimator=f"{row['estimator']}[delta={delta:g}]"))
    _write_table(out_dir / "appendixA_table.csv", table,
                 ("n", "estimator", "bias", "std", "neg_inf_count"))
    _write_table(out_dir / "appendixA_raw.csv", raw_rows,
                 ("n", "estimator", "replicate", "loglike"))


def _study_sensitivity_n(args, out_dir):
    cfg = load_config(args.config) if args.config else None
    if cfg is None:
        raise ConfigError("sensitivity_n needs --config for the base chain")
    cfg["_dir"] = pathlib.Path(args.config).resolve().parent
    if args.seed is not None:
        cfg["seed"] = args.seed
    n_grid = [int(x) for x in args.n_grid.split(",")]
    chains = {}
    for n in n_grid:
        run_cfg = dict(cfg, n=n)
        sub = out_dir / f"n{n}"
        _run_chain(run_cfg, args.workers or cfg["workers"], sub)
        draws, _, _, names = read_chain_csv(sub / "chain.csv")
        chains[n] = (draws, names)

    burn = cfg["burn_in"]
    names = chains[n_grid[0]][1]
    rows = []
    grid_size = 200
    for j, name in enumerate(names):
        pool = [chains[n][0][burn:, j] for n in n_grid]
        grid = _shared_grid(pool, grid_size)
        for n in n_grid:
            mass = chain_marginal_mass(chains[n][0], j, grid, burn)
            for g, m in zip(grid, mass):
                rows.append({"param": name, "n": n, "grid": f"{g:.17g}",
                             "mass": f"{m:.17g}"})
    _write_table(out_dir / "marginals.csv", rows,
                 ("param", "n", "grid", "mass"))


def _study_shrinkage_tune(args, out_dir):
    model, observed = build_model(args.model)
    theta0 = model.true_params
    try:
        lam = tune_shrinkage(model, theta0, args.n, observed,
                             target_std=args.target, seed=args.seed or 0)
    except NoFeasibleLambda as exc:
        raise ConfigError(str(exc)) from exc
    print(f"shrinkage {lam:.3f}")
    with open(out_dir / "shrinkage.txt", "w") as fh:
        fh.write(f"{lam:.6f}\n")


def cmd_study(args):
    out_dir = pathlib.Path(args.out or f"study_{args.study}")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.study == "appendixA":
        _study_appendix_a(args, out_dir)
    elif args.study == "sensitivity_n":
        _study_sensitivity_n(args, out_dir)
    elif args.study == "shrinkage_tune":
        _study_shrinkage_tune(args, out_dir)
    else:
        raise ConfigError(f"unknown study id {args.study!r}")
    write_manifest(out_dir)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="synlik",
        description="Synthetic-likelihood experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None)

    run = sub.add_parser("run", help="run one MCMC experiment")
    run.add_argument("--config", required=True)
    common(run)

    pilot = sub.add_parser(
        "pilot", help="run and emit a scaled proposal covariance")
    pilot.add_argument("--config", required=True)
    common(pilot)

    tv = sub.add_parser("tv", help="total variation between posteriors")
    tv.add_argument("--chain", required=True)
    tv.add_argument("--ref-chain", default=None)
    tv.add_argument("--exact-ma2", default=None,
                    help="observed series CSV; compare against the exact grid")
    tv.add_argument("--components", default="0,1")
    tv.add_argument("--bins", type=int, default=50)
    tv.add_argument("--burn-in", type=int, default=0)
    tv.add_argument("--out", default=None)

    study = sub.add_parser("study", help="run a predefined study")
    study.add_argument("--study", required=True)
    study.add_argument("--config", default=None)
    study.add_argument("--model", default="mg1")
    study.add_argument("--d", type=int, default=20)
    study.add_argument("--epsilon", type=float, default=0.0)
    study.add_argument("--deltas", default="0.5,1,2")
    study.add_argument("--n-grid", default="75,150,300")
    study.add_argument("--replicates", type=int, default=100)
    study.add_argument("--n", type=int, default=300)
    study.add_argument("--target", type=float, default=1.5)
    common(study)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "pilot":
            return cmd_run(args, pilot=True)
        if args.command == "tv":
            return cmd_tv(args)
        if args.command == "study":
            return cmd_study(args)
    except (ConfigError, GridMismatch, EmptyChain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InitializationFailure as exc:
        print(f"initialization failure: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
