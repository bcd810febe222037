"""Command-line front end.

Subcommands ``fit``, ``adapt``, ``table``, ``rate`` and ``kernels``.  Any
flag can also come from a ``key = value`` file given with ``--config``;
explicit flags win.  Exit codes: 0 success, 2 input error, 3 invalid data,
4 invalid parameters.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import adaptive, sim
from .errors import DuplicateDesignPoints, InvalidData, InvalidParameter
from .kernels import check_square_integrable, kernel_names, make_builtin, singularity_bound
from .lpe import Dataset, LpeModel, TruncatedLpe
from .numerics import RandomSource

EXIT_OK, EXIT_INPUT, EXIT_DATA, EXIT_PARAM = 0, 2, 3, 4


class InputError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def read_dataset(path) -> Dataset:
    """Rows ``x_1 ... x_d y``, comma or whitespace separated; a header line is optional."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows, width = [], None
    for num, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        fields = [f for f in text.replace(",", " ").split()]
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            if not rows and width is None:
                width = len(fields)   # header line
                continue
            raise InputError(f"row {num}: non-numeric field") from None
        if width is None:
            width = len(vals)
        if len(vals) != width or len(vals) < 2:
            raise InputError(f"row {num}: expected {width} fields, got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no observations")
    arr = np.array(rows)
    return Dataset(arr[:, :-1], arr[:, -1])


def read_config(path) -> dict:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise InputError(f"config line {num}: expected key = value")
        key, value = (p.strip() for p in text.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in str(text).split(",") if t.strip())


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in str(text).split(",") if t.strip())


def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="dataset file; simulated data when omitted")
    p.add_argument("--n", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", choices=sorted(sim.TARGETS), default="f")
    p.add_argument("--noise-variance", type=float, default=0.5)
    p.add_argument("--x-min", type=float, default=-2.0)
    p.add_argument("--x-max", type=float, default=2.0)
    p.add_argument("--grid-size", type=int, default=1001)
    p.add_argument("--kernel", choices=kernel_names(), default="k2")
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--l0", type=float, default=1.0)
    p.add_argument("--out", default="-")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="interplpe", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("fit", help="fit one LPE and write predictions")
    _data_args(p)
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--bandwidth", type=float, default=1.0)
    p.add_argument("--eval", choices=["grid", "data"], default="grid",
                   help="evaluate on the x grid or at the design points")
    p.add_argument("--no-truncate", action="store_true")
    subs["fit"] = p

    p = sub.add_parser("adapt", help="fit the adaptive aggregated estimator")
    _data_args(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta-max", type=float, default=8.0)
    p.add_argument("--eval", choices=["grid", "data"], default="grid")
    p.add_argument("--summary", help="JSON file for the selection summary")
    subs["adapt"] = p

    p = sub.add_parser("table", help="MSE table for the singular and rectangular kernels")
    p.add_argument("--n", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", choices=sorted(sim.TARGETS), help="restrict to one target")
    p.add_argument("--noise-variance", type=float, default=0.5)
    p.add_argument("--x-min", type=float, default=-2.0)
    p.add_argument("--x-max", type=float, default=2.0)
    p.add_argument("--grid-size", type=int, default=1001)
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--replications", type=int, default=100)
    p.add_argument("--window", type=int, default=7)
    p.add_argument("--bandwidths", help="comma-separated bandwidth grid")
    p.add_argument("--json", help="also write the full report as JSON")
    p.add_argument("--out", default="-")
    subs["table"] = p

    p = sub.add_parser("rate", help="log-log MSE slope against sample size")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--n-list", default="100,200,400,800,1600,3200")
    p.add_argument("--replications", type=int, default=50)
    p.add_argument("--kernel", choices=kernel_names(), default="k2")
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--target", choices=sorted(sim.TARGETS), default="f")
    p.add_argument("--noise-variance", type=float, default=0.5)
    p.add_argument("--x-min", type=float, default=-2.0)
    p.add_argument("--x-max", type=float, default=2.0)
    p.add_argument("--grid-size", type=int, default=1001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l0", type=float, default=1.0)
    p.add_argument("--summary", help="JSON file for the slope summary")
    p.add_argument("--out", default="-")
    subs["rate"] = p

    p = sub.add_parser("kernels", help="kernel metadata and property checks")
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--out", default="-")
    subs["kernels"] = p
    return parser, subs


def _dataset(args) -> Dataset:
    if args.input:
        return read_dataset(args.input)
    cfg = sim.SimulationConfig(n=args.n, x_range=(args.x_min, args.x_max),
                               noise_variance=args.noise_variance, target=args.target,
                               seed=args.seed)
    return sim.generate(cfg, RandomSource(args.seed))


def _eval_points(args, data: Dataset) -> np.ndarray:
    if args.eval == "data" or data.d > 1:
        return data.x
    if args.grid_size < 2 or not args.x_min < args.x_max:
        raise InvalidParameter("need grid_size >= 2 and x_min < x_max")
    return sim.eval_grid((args.x_min, args.x_max), args.grid_size)[:, None]


def _prediction_rows(args, data, pts, values):
    header = [f"x{k + 1}" for k in range(data.d)] if data.d > 1 else ["x"]
    header.append("fit")
    cols = [pts, values[:, None]]
    if pts is data.x:
        header.append("y")
        cols.append(data.y[:, None])
    if not args.input and data.d == 1:
        header.append("truth")
        cols.append(sim.TARGETS[args.target](pts[:, 0])[:, None])
    return header, np.hstack(cols)


def cmd_fit(args) -> int:
    kernel = make_builtin(args.kernel, args.a)
    data = _dataset(args)
    model = LpeModel(data, args.order, args.bandwidth, kernel)
    pts = _eval_points(args, data)
    est = model.predict if args.no_truncate else TruncatedLpe(model, args.l0).predict
    header, rows = _prediction_rows(args, data, pts, np.atleast_1d(est(pts)))
    write_csv(args.out, header, rows)
    return EXIT_OK


def cmd_adapt(args) -> int:
    kernel = make_builtin(args.kernel, args.a)
    data = _dataset(args)
    est = adaptive.fit_adaptive(data, kernel, alpha=args.alpha, L0=args.l0,
                                beta_max=args.beta_max)
    pts = _eval_points(args, data)
    header, rows = _prediction_rows(args, data, pts, np.atleast_1d(est.predict(pts)))
    write_csv(args.out, header, rows)
    summary = {
        "beta_f": est.beta_f, "beta_g": est.beta_g,
        "order_f": est.f_tilde.model.order, "order_g": est.g_tilde.model.order,
        "bandwidth_f": est.f_tilde.model.bandwidth, "bandwidth_g": est.g_tilde.model.bandwidth,
        "grid_size": len(est.grid), "M": est.grid.M, "M_max": est.grid.M_max,
        "dropped_last": est.dropped_last,
    }
    if args.summary:
        write_json(args.summary, summary)
    elif args.out not in (None, "-"):
        write_json("-", summary)
    return EXIT_OK


def _table_config(args) -> sim.SimulationConfig:
    kw = dict(n=args.n, x_range=(args.x_min, args.x_max), noise_variance=args.noise_variance,
              a=args.a, order=args.order, seed=args.seed, replications=args.replications,
              grid_size=args.grid_size, window=args.window)
    if args.target:
        kw["target"] = args.target
    if args.bandwidths:
        kw["bandwidths"] = _csv_floats(args.bandwidths)
    return sim.SimulationConfig(**kw)


def cmd_table(args) -> int:
    cfg = _table_config(args)
    targets = (args.target,) if args.target else ("f", "g")
    report = sim.run_table_experiment(cfg, targets=targets)
    header = ["kernel", "target", "h", "mse_raw", "se_raw", "mse_smooth", "se_smooth",
              "h_rect", "mse_rect", "se_rect", "smooth_below_raw", "seed", "replications"]
    rows = [[r.kernel, r.target, r.h, r.mse_raw, r.se_raw, r.mse_smooth, r.se_smooth,
             r.h_rect, r.mse_rect, r.se_rect, r.smooth_below_raw, str(cfg.seed),
             str(cfg.replications)] for r in report.records]
    write_csv(args.out, header, rows)
    if args.json:
        write_json(args.json, report.to_dict())
    return EXIT_OK


def cmd_rate(args) -> int:
    n_list = _csv_ints(args.n_list)
    kernel = make_builtin(args.kernel, args.a)
    res = sim.rate_study(sim.TARGETS[args.target], args.beta, n_list, args.replications,
                         kernel, args.alpha, x_range=(args.x_min, args.x_max),
                         noise_variance=args.noise_variance, grid_size=args.grid_size,
                         seed=args.seed, L0=args.l0)
    rows = [[str(n), m, s] for n, m, s in zip(res.n_list, res.mean_mse, res.se_mse)]
    write_csv(args.out, ["n", "mean_mse", "se_mse"], rows)
    summary = {"slope": res.slope, "expected_slope": res.expected_slope, "order": res.order,
               "beta": res.beta, "alpha": res.alpha, "kernel": res.kernel}
    if args.summary:
        write_json(args.summary, summary)
    elif args.out not in (None, "-"):
        write_json("-", summary)
    return EXIT_OK


def cmd_kernels(args) -> int:
    rows = []
    for name in kernel_names():
        k = make_builtin(name, args.a, d=args.d)
        sq = check_square_integrable(k, args.d)
        bound = singularity_bound(k)
        rows.append([name, str(k.singular), k.a, k.support_radius, str(k.continuous_off_origin),
                     str(sq.finite), sq.value if sq.finite else "inf", bound.c0, bound.delta])
    write_csv(args.out, ["kernel", "singular", "a", "support_radius", "continuous_off_origin",
                         "square_integrable", "int_K2", "c0", "delta"], rows)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "adapt": cmd_adapt, "table": cmd_table, "rate": cmd_rate,
            "kernels": cmd_kernels}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            cfg = read_config(known.config)
            for p in subs.values():
                dests = {a.dest for a in p._actions}
                p.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DuplicateDesignPoints, InvalidData) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InvalidParameter, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
