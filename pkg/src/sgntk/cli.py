"""Command-line entry point.

Subcommands: kernel-table, train-ensemble, gp-predict, fig1, fig2, fig3,
validate.  Global flags pick the root seed, the output directory, and whether
the figure pipelines run at full scale instead of desk scale.  An optional
TOML or JSON settings file supplies defaults for any subcommand option (a
flag given on the command line wins) and is echoed into every report.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from .activations import parse_activation, parse_surrogate
from .analytic_kernels import (
    KIND_NNGP,
    KIND_NTK,
    KIND_SG_NTK,
    MODE_CLOSED,
    MODE_QUAD,
    MODE_SIGN,
    KernelSpec,
    erf_spec,
    sign_spec,
)
from .errors import SchemaMismatch, SgntkError
from .experiments import (
    EXPERIMENT_DEPTH,
    GRID_ENSEMBLE_FIG,
    GRID_KERNEL_FIGS,
    kernel_table,
    run_fig1,
    run_fig2,
    run_fig3,
    run_train_ensemble,
    validate,
    write_report,
)
from .gp_regression import gp_posterior, posterior_mean, posterior_std
from .tableio import read_csv, require_columns, write_csv

_KERNEL_NAMES = {"ntk": KIND_NTK, "sgntk": KIND_SG_NTK, "nngp": KIND_NNGP}

DESK = {
    "fig1": {"widths": "10,100", "m_values": "2,5", "seeds": "0,1", "steps": 200},
    "fig2": {"widths": "10,100", "m_values": "2,5", "seeds": "0,1", "steps": 200},
    "fig3": {"width": 256, "count": 100, "steps": 10_000},
}
PAPER = {
    "fig1": {"widths": "10,100,500,1000", "m_values": "2,5,20",
             "seeds": ",".join(str(s) for s in range(10)), "steps": 10_000},
    "fig2": {"widths": "10,100,500,1000", "m_values": "2,5,20",
             "seeds": ",".join(str(s) for s in range(10)), "steps": 10_000},
    "fig3": {"width": 500, "count": 500, "steps": 30_000},
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".toml":
        return tomllib.loads(text)
    if p.suffix.lower() == ".json":
        return json.loads(text)
    raise SchemaMismatch(f"settings file must be .toml or .json, got {p.name}")


class Resolver:
    """Option lookup with precedence: CLI flag, config file, scale defaults."""

    def __init__(self, args: argparse.Namespace, config: dict, command: str,
                 paper_scale: bool):
        self.args = args
        self.config = config
        scale = PAPER if paper_scale else DESK
        self.scale_defaults = scale.get(command, {})

    def get(self, key: str, default=None):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        if key in self.scale_defaults:
            return self.scale_defaults[key]
        return default


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(part) for part in str(text).split(",") if part.strip()]


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(part) for part in str(text).split(",") if part.strip()]


def _normalize_activation(text: str) -> str:
    """Accept the shorthand erf:<m> next to erf:m=<m> and plain sign."""
    if text.startswith("erf:") and not text.startswith("erf:m="):
        return "erf:m=" + text[len("erf:"):]
    return text


def _echo_config(report, config: dict) -> None:
    if config:
        report.metadata["config_file"] = config


def _print_paths(paths: dict) -> None:
    for name in sorted(paths):
        print(f"wrote {paths[name]}")


# ---------------------------------------------------------------------------
# subcommand runners


def _cmd_kernel_table(res: Resolver, out_dir: Path, config: dict) -> int:
    activation = parse_activation(_normalize_activation(res.get("activation", "erf:m=2")))
    activation2 = res.get("activation2")
    surrogate = res.get("surrogate")
    mode = res.get("mode")
    if mode is None:
        mode = MODE_SIGN if activation.name == "sign" else MODE_CLOSED
    spec = KernelSpec(
        kind=res.get("kind", "ntk"),
        depth=int(res.get("depth", EXPERIMENT_DEPTH)),
        sigma_w=float(res.get("sigma_w", 1.0)),
        sigma_b=float(res.get("sigma_b", 0.1)),
        activation1=activation,
        activation2=parse_activation(_normalize_activation(activation2)) if activation2 else None,
        surrogate2=parse_surrogate(surrogate) if surrogate else None,
        mode=mode,
        quad_order=int(res.get("quad_order", 64)),
    )
    header, rows = kernel_table(
        spec, int(res.get("grid", GRID_KERNEL_FIGS)), float(res.get("ref_angle", 0.0))
    )
    out = Path(res.get("out") or out_dir / "kernel_table.csv")
    write_csv(out, header, rows)
    print(f"wrote {out}")
    return 0


def _cmd_train_ensemble(res: Resolver, out_dir: Path, config: dict, seed: int) -> int:
    report = run_train_ensemble(
        width=int(res.get("width", 256)),
        count=int(res.get("count", 10)),
        steps=int(res.get("steps", 1000)),
        activation=_normalize_activation(res.get("activation", "sign")),
        surrogate=res.get("surrogate", "derf"),
        eta=float(res.get("eta", 0.1)),
        depth=int(res.get("depth", EXPERIMENT_DEPTH)),
        kappa=float(res.get("kappa", 1.0)),
        seed=seed,
        grid_size=int(res.get("grid", 64)),
    )
    _echo_config(report, config)
    out = res.get("out")
    if out:
        out_path = Path(out)
        report.name = out_path.stem
        if str(out_path.parent) != ".":
            out_dir = out_path.parent
    _print_paths(write_report(report, out_dir))
    return 0


def _cmd_gp_predict(res: Resolver, out_dir: Path) -> int:
    kind = _KERNEL_NAMES[res.get("kernel")]
    activation = parse_activation(_normalize_activation(res.get("mode")))
    surrogate = res.get("surrogate")
    depth = int(res.get("depth", EXPERIMENT_DEPTH))
    sigma_w = float(res.get("sigma_w", 1.0))
    sigma_b = float(res.get("sigma_b", 0.1))
    if activation.name == "sign":
        spec = sign_spec(kind, depth, sigma_w, sigma_b, surrogate2=surrogate)
    else:
        spec = erf_spec(kind, depth, activation.slope, sigma_w, sigma_b,
                        surrogate2=surrogate)

    train_x, train_y = _read_xy(res.get("train_csv"), need_targets=True)
    test_x, _ = _read_xy(res.get("test_csv"), need_targets=False)
    t_text = str(res.get("t", "inf"))
    t = math.inf if t_text == "inf" else float(t_text)
    gp = gp_posterior(spec, (train_x, train_y), t=t, eta=float(res.get("eta", 0.1)))
    mean = posterior_mean(gp, test_x)
    std = posterior_std(gp, test_x)

    x_cols = [f"x{i}" for i in range(test_x.shape[1])]
    if mean.shape[1] == 1:
        header = x_cols + ["mean", "std"]
        rows = [
            [*map(float, x), float(m), float(s)]
            for x, m, s in zip(test_x, mean[:, 0], std)
        ]
    else:
        header = x_cols + [f"mean{j}" for j in range(mean.shape[1])] + ["std"]
        rows = [
            [*map(float, x), *map(float, m), float(s)]
            for x, m, s in zip(test_x, mean, std)
        ]
    out = Path(res.get("out") or out_dir / "gp_predictions.csv")
    write_csv(out, header, rows)
    print(f"wrote {out}")
    return 0


def _read_xy(path, need_targets: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Read inputs (x0, x1, ...) and optional targets (y or y0, y1, ...)."""
    header, raw = read_csv(path)
    x_cols = sorted(
        (c for c in header if c.startswith("x") and c[1:].isdigit()),
        key=lambda c: int(c[1:]),
    )
    y_cols = sorted(c for c in header if c == "y" or (c.startswith("y") and c[1:].isdigit()))
    require_columns(path, header, x_cols if not need_targets else x_cols + y_cols)
    if not x_cols:
        raise SchemaMismatch(f"{path} has no x0, x1, ... input columns; has {header}")
    if need_targets and not y_cols:
        raise SchemaMismatch(f"{path} has no y target columns; has {header}")
    index = {c: header.index(c) for c in header}
    xs = np.array([[float(row[index[c]]) for c in x_cols] for row in raw])
    ys = None
    if y_cols:
        ys = np.array([[float(row[index[c]]) for c in y_cols] for row in raw])
    return xs, ys


def _cmd_fig(command: str, res: Resolver, out_dir: Path, config: dict, seed: int) -> int:
    if command in ("fig1", "fig2"):
        kwargs = dict(
            widths=_int_list(res.get("widths")),
            m_values=_float_list(res.get("m_values")),
            seeds=_int_list(res.get("seeds")),
            steps=int(res.get("steps")),
            eta=float(res.get("eta", 0.1)),
            depth=int(res.get("depth", EXPERIMENT_DEPTH)),
            grid_size=int(res.get("grid", GRID_KERNEL_FIGS)),
            train_count=int(res.get("train_count", 15)),
            data_seed=int(res.get("data_seed", 3)),
        )
        if command == "fig1":
            report = run_fig1(**kwargs)
        else:
            report = run_fig2(surrogate=res.get("surrogate", "derf"), **kwargs)
    else:
        report = run_fig3(
            width=int(res.get("width")),
            count=int(res.get("count")),
            steps=int(res.get("steps")),
            kappa=float(res.get("kappa", 1.0)),
            surrogate=res.get("surrogate", "derf"),
            eta=float(res.get("eta", 0.1)),
            depth=int(res.get("depth", EXPERIMENT_DEPTH)),
            grid_size=int(res.get("grid", GRID_ENSEMBLE_FIG)),
            train_count=int(res.get("train_count", 15)),
            data_seed=int(res.get("data_seed", 3)),
            seed=seed,
        )
    _echo_config(report, config)
    _print_paths(write_report(report, out_dir))
    return 0


def _cmd_validate(res: Resolver, config: dict, seed: int) -> int:
    if config:
        print(f"config: {json.dumps(config, sort_keys=True)}")
    report = validate(
        seed=seed,
        mc_samples=int(res.get("mc_samples", 200_000)),
        ensemble_count=int(res.get("ensemble_count", 400)),
    )
    for line in report.lines():
        print(line)
    print("all checks passed" if report.passed else "validation FAILED")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# parser


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Global options, accepted both before and after the subcommand name."""
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="root seed (default 0)")
    parser.add_argument("--out-dir", default=default, help="output directory (default .)")
    parser.add_argument("--paper-scale", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="full-scale figure settings instead of desk scale")
    parser.add_argument("--config", default=default,
                        help="TOML/JSON settings file; echoed into reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgntk",
        description="Tangent-kernel library tools: kernel tables, ensemble "
                    "training, GP prediction, figure pipelines, self-validation.",
    )
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-table", parents=[common], help="one analytic kernel curve as CSV")
    p.add_argument("--kind", choices=["nngp", "nngp-dot", "ntk", "cross-nngp",
                                      "surrogate-sigma", "sg-ntk"])
    p.add_argument("--activation", help="erf:m=<m> or sign (default erf:m=2)")
    p.add_argument("--activation2", help="second activation for cross kernels")
    p.add_argument("--surrogate", help="slot-2 surrogate, e.g. derf")
    p.add_argument("--depth", type=int)
    p.add_argument("--sigma-w", type=float, dest="sigma_w")
    p.add_argument("--sigma-b", type=float, dest="sigma_b")
    p.add_argument("--mode", choices=[MODE_CLOSED, MODE_QUAD, MODE_SIGN])
    p.add_argument("--quad-order", type=int, dest="quad_order")
    p.add_argument("--grid", type=int, help="number of grid angles (default 128)")
    p.add_argument("--ref-angle", type=float, dest="ref_angle")
    p.add_argument("--out")

    p = sub.add_parser("train-ensemble", parents=[common], help="train an ensemble; write outputs + traces")
    p.add_argument("--width", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--activation")
    p.add_argument("--surrogate")
    p.add_argument("--eta", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--out", help="output path stem for the CSV/JSON pair")

    p = sub.add_parser("gp-predict", parents=[common], help="posterior mean/std on test points")
    p.add_argument("--kernel", choices=sorted(_KERNEL_NAMES), required=True)
    p.add_argument("--mode", required=True, help="erf:m=<m> or sign")
    p.add_argument("--surrogate")
    p.add_argument("--depth", type=int)
    p.add_argument("--sigma-w", type=float, dest="sigma_w")
    p.add_argument("--sigma-b", type=float, dest="sigma_b")
    p.add_argument("--train-csv", dest="train_csv", required=True)
    p.add_argument("--test-csv", dest="test_csv", required=True)
    p.add_argument("--t", help="training time: inf or a float (default inf)")
    p.add_argument("--eta", type=float)
    p.add_argument("--out")

    for name, text in [("fig1", "kernel convergence under gradient descent"),
                       ("fig2", "kernel convergence under surrogate gradients")]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--widths", help="comma list, e.g. 10,100")
        p.add_argument("--m-values", dest="m_values", help="comma list, e.g. 2,5")
        p.add_argument("--seeds", help="comma list, e.g. 0,1")
        p.add_argument("--steps", type=int)
        p.add_argument("--eta", type=float)
        p.add_argument("--depth", type=int)
        p.add_argument("--grid", type=int)
        p.add_argument("--train-count", type=int, dest="train_count")
        p.add_argument("--data-seed", type=int, dest="data_seed")
        if name == "fig2":
            p.add_argument("--surrogate")

    p = sub.add_parser("fig3", parents=[common], help="trained sign ensembles vs the GP prediction")
    p.add_argument("--width", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--surrogate")
    p.add_argument("--eta", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--train-count", type=int, dest="train_count")
    p.add_argument("--data-seed", type=int, dest="data_seed")

    p = sub.add_parser("validate", parents=[common], help="run the numerical cross-check suite")
    p.add_argument("--mc-samples", type=int, dest="mc_samples")
    p.add_argument("--ensemble-count", type=int, dest="ensemble_count")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        res = Resolver(args, config, args.command, args.paper_scale)
        seed = args.seed if args.seed is not None else int(config.get("seed", 0))
        out_dir = Path(args.out_dir if args.out_dir is not None
                       else config.get("out_dir", "."))
        if args.command == "kernel-table":
            return _cmd_kernel_table(res, out_dir, config)
        if args.command == "train-ensemble":
            return _cmd_train_ensemble(res, out_dir, config, seed)
        if args.command == "gp-predict":
            return _cmd_gp_predict(res, out_dir)
        if args.command in ("fig1", "fig2", "fig3"):
            return _cmd_fig(args.command, res, out_dir, config, seed)
        return _cmd_validate(res, config, seed)
    except (SgntkError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
