"""Command-line experiment harness.

Subcommands: ``synth``, ``fit``, ``grid``, ``compare``, ``cost``. Relative
output paths resolve against ``$TENSORSIC_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import experiment as ex
from .complexity import csid_cost, linear_cost, poly_cost
from .csid import TrainConfig, cancel_full, train_csid
from .linear import fit_linear, predict_linear
from .poly import fit_poly, predict_poly
from .signal import cancellation_db, format_db, load_dataset, save_dataset
from .synth import SynthConfig, apply_nonlinear_channel, generate_ofdm, make_dataset

OUTPUT_ENV = "TENSORSIC_OUTPUT_DIR"

log = logging.getLogger("tensorsic")


def _out(path):
    if path is None:
        return None
    path = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not path.is_absolute():
        Path(base).mkdir(parents=True, exist_ok=True)
        path = Path(base) / path
    return path


def _load_config(path) -> dict:
    text = Path(path).read_text()
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _synth_config(args) -> SynthConfig:
    return SynthConfig(n_carriers=args.n_carriers, oversampling=args.oversampling, n_symbols=args.n_symbols,
                       noise_power_db=args.noise_db, seed=args.seed)


def _add_synth_flags(p, defaults=True):
    p.add_argument("--n-carriers", type=int, default=2048 if defaults else None)
    p.add_argument("--oversampling", type=int, default=4 if defaults else None)
    p.add_argument("--n-symbols", type=int, default=10 if defaults else None)
    p.add_argument("--noise-db", type=float, default=-40.0 if defaults else None)


def _dataset(args):
    if args.data:
        return load_dataset(args.data)
    return make_dataset(_synth_config(args))


def cmd_synth(args):
    cfg = _synth_config(args)
    tx = generate_ofdm(cfg)
    rx = apply_nonlinear_channel(tx, cfg)
    out = _out(args.out)
    save_dataset(out, tx, rx, args.format)
    print(f"wrote {tx.size} samples to {out}")


def cmd_fit(args):
    ds = _dataset(args)
    lin = fit_linear(ds.tx, ds.rx, ds.train, args.L)
    report = {"canceller": args.canceller, "L": args.L}
    scores = {}
    if args.canceller == "linear":
        model = lin
        for split in ("train", "val", "test"):
            rg = ds.split(split)
            scores[split] = {"total_db": cancellation_db(ds.rx[rg.start:rg.stop], predict_linear(lin, ds.tx, rg))}
    elif args.canceller == "poly":
        model = fit_poly(ds.tx, ds.rx, ds.train, args.P, args.L)
        report["P"] = args.P
        for split in ("train", "val", "test"):
            rg = ds.split(split)
            y = ds.rx[rg.start:rg.stop]
            yl, yp = predict_linear(lin, ds.tx, rg), predict_poly(model, ds.tx, rg)
            scores[split] = {"nl_db": cancellation_db(y - yl, yp - yl), "total_db": cancellation_db(y, yp)}
    else:
        cfg = TrainConfig(F=args.F, I=args.I, mu=args.mu, rho=args.rho, max_sweeps=args.max_sweeps,
                          tol=args.tol, seed=args.seed)
        model = train_csid(ds.tx, ds.rx, ds.train, cfg, lin)
        report.update(F=args.F, I=args.I, mu=args.mu, rho=args.rho, sweeps=len(model.history) - 1)
        for split in ("train", "val", "test"):
            _, nl, total = cancel_full(model, ds.tx, ds.rx, ds.split(split))
            scores[split] = {"nl_db": nl, "total_db": total}
    report["scores"] = {s: {k: format_db(v) for k, v in d.items()} for s, d in scores.items()}
    if args.model_out:
        _out(args.model_out).write_text(model.to_json())
    print(json.dumps(report, indent=2))


def _spec_from_args(args) -> ex.ExperimentSpec:
    cfg = _load_config(args.config) if args.config else {}
    for key in ("canceller", "data", "F", "I", "mu", "rho", "P", "L", "select", "seed",
                "max_sweeps", "tol", "workers", "output"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    synth = cfg.pop("synth", None)
    if cfg.get("data") is None:
        synth = dict(synth or {})
        for key, attr in (("n_carriers", "n_carriers"), ("oversampling", "oversampling"),
                          ("n_symbols", "n_symbols"), ("noise_power_db", "noise_db")):
            if getattr(args, attr, None) is not None:
                synth[key] = getattr(args, attr)
        synth.setdefault("seed", cfg.get("seed", 0))
        cfg["synth"] = SynthConfig(**synth)
    if cfg.get("output"):
        cfg["output"] = str(_out(cfg["output"]))
    return ex.ExperimentSpec(**cfg)


def cmd_grid(args):
    spec = _spec_from_args(args)
    rows = ex.run_grid(spec)
    text = ex.rows_to_csv(rows)
    if not spec.output:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} rows to {spec.output}")
    failed = sum(1 for r in rows if r["error"])
    if failed:
        log.warning("%d of %d report cells failed", failed, len(rows))


def cmd_compare(args):
    rows = []
    for path in args.results:
        rows.extend(ex.read_rows(path))
    poly_row = ex.find_row(rows, "poly", P=args.P, L=args.poly_L)
    csid_row = ex.find_row(rows, "csid", F=args.F, I=args.I)
    text = ex.table_to_csv(ex.report_comparison(poly_row, csid_row))
    if args.out:
        _out(args.out).write_text(text)
    sys.stdout.write(text)


def cmd_cost(args):
    if args.canceller == "linear":
        report = linear_cost(args.L)
    elif args.canceller == "poly":
        report = poly_cost(args.P, args.L)
    else:
        report = csid_cost(args.F, args.L, args.I)
    sys.stdout.write(report.to_csv())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorsic", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    _add_synth_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "bin"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="train one canceller and report cancellation per split")
    p.add_argument("canceller", choices=["linear", "poly", "csid"])
    p.add_argument("--data")
    _add_synth_flags(p)
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--P", type=int, default=7)
    p.add_argument("--F", type=int, default=4)
    p.add_argument("--I", type=int, default=32)
    p.add_argument("--mu", type=float, default=1e-4)
    p.add_argument("--rho", type=float, default=1e-3)
    p.add_argument("--max-sweeps", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("grid", help="grid search with validation selection")
    p.add_argument("--config", help="JSON (or TOML) file with ExperimentSpec fields")
    p.add_argument("--canceller", choices=["linear", "poly", "csid"])
    p.add_argument("--data")
    _add_synth_flags(p, defaults=False)
    for name, typ in (("F", int), ("I", int), ("P", int), ("L", int), ("mu", float), ("rho", float)):
        p.add_argument(f"--{name}", type=typ, nargs="+")
    p.add_argument("--select", nargs="*", help="axes selected away on validation")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-sweeps", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("compare", help="comparison table from grid results")
    p.add_argument("results", nargs="+", help="grid CSV files")
    p.add_argument("--P", type=int, default=7)
    p.add_argument("--poly-L", type=int, default=3)
    p.add_argument("--F", type=int, default=4)
    p.add_argument("--I", type=int, default=32)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cost", help="closed-form per-sample cost")
    p.add_argument("canceller", choices=["linear", "poly", "csid"])
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--P", type=int, default=7)
    p.add_argument("--F", type=int, default=4)
    p.add_argument("--I", type=int, default=32)
    p.set_defaults(func=cmd_cost)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        log.error("%s", exc)
        if args.verbose:
            raise
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
