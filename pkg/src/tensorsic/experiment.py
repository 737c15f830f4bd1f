"""Hyperparameter grids with validation-based selection and CSV reports.

Every grid point is trained on the train split and scored on the
validation split. Within each report cell (all points sharing the report
axes, e.g. ``(F, I)``) the point with the best validation score is kept,
and only that point is then scored on the test split.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .complexity import NN_REFERENCE, csid_cost, linear_cost, poly_cost
from .csid import TrainConfig, cancel_full, train_csid
from .linear import fit_linear, predict_linear
from .poly import fit_poly, predict_poly
from .signal import SiDataset, cancellation_db, format_db, load_dataset
from .synth import SynthConfig, make_dataset

log = logging.getLogger(__name__)

COLUMNS = ["canceller", "F", "I", "P", "L", "mu", "rho", "val_nl_db", "test_nl_db",
           "test_total_db", "adds", "mults", "memory", "seed", "error"]

AXES = {"linear": ("L",), "poly": ("P", "L"), "csid": ("F", "I", "L", "mu", "rho")}

DEFAULT_MU = (1e-6, 1e-5, 1e-4, 1e-3)
DEFAULT_RHO = (1e-4, 1e-3, 1e-2, 1e-1)


@dataclass
class ExperimentSpec:
    canceller: str = "csid"
    data: str | None = None
    synth: SynthConfig | None = None
    F: tuple = (4,)
    I: tuple = (32,)
    mu: tuple = DEFAULT_MU
    rho: tuple = DEFAULT_RHO
    P: tuple = (7,)
    L: tuple = (2,)
    select: tuple | None = None  # nuisance axes; defaults to (mu, rho) for csid
    seed: int = 0
    max_sweeps: int = 50
    tol: float = 1e-6
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.canceller not in AXES:
            raise ValueError(f"unknown canceller {self.canceller!r}")
        for name in AXES[self.canceller]:
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"grid axis {name} is empty")
            setattr(self, name, values)
        if self.select is None:
            self.select = ("mu", "rho") if self.canceller == "csid" else ()
        self.select = tuple(self.select)
        bad = set(self.select) - set(AXES[self.canceller])
        if bad:
            raise ValueError(f"cannot select over {sorted(bad)} for {self.canceller}")
        if self.data is not None and not Path(self.data).exists():
            raise FileNotFoundError(self.data)

    def dataset(self) -> SiDataset:
        if self.data is not None:
            return load_dataset(self.data)
        return make_dataset(self.synth or SynthConfig(seed=self.seed))

    def points(self) -> list[dict]:
        axes = AXES[self.canceller]
        return [dict(zip(axes, combo)) for combo in itertools.product(*(getattr(self, a) for a in axes))]

    def report_key(self, point: dict) -> tuple:
        return tuple(point[a] for a in AXES[self.canceller] if a not in self.select)


def point_seed(seed: int, index: int) -> int:
    """Independent RNG seed for grid point ``index``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _segment(ds, name):
    rg = ds.split(name)
    return rg, ds.rx[rg.start:rg.stop]


class _Evaluator:
    """Trains one grid point and scores it on named splits, logging each access."""

    def __init__(self, ds: SiDataset, spec: ExperimentSpec, point: dict, index: int):
        self.ds, self.spec, self.point, self.index = ds, spec, point, index
        self.events: list[tuple] = []
        self.model = None
        self.linear = None

    def fit(self):
        ds, p, spec = self.ds, self.point, self.spec
        self.events.append(("fit", "train", self.index))
        self.linear = fit_linear(ds.tx, ds.rx, ds.train, p["L"])
        if spec.canceller == "poly":
            self.model = fit_poly(ds.tx, ds.rx, ds.train, p["P"], p["L"])
        elif spec.canceller == "csid":
            cfg = TrainConfig(F=p["F"], I=p["I"], mu=p["mu"], rho=p["rho"], max_sweeps=spec.max_sweeps,
                              tol=spec.tol, seed=point_seed(spec.seed, self.index))
            self.model = train_csid(ds.tx, ds.rx, ds.train, cfg, self.linear)
        else:
            self.model = self.linear

    def score(self, split: str) -> tuple[float, float]:
        """``(nl_db, total_db)`` on ``split``; ``nl_db`` is NaN for the linear canceller."""
        self.events.append(("score", split, self.index))
        ds = self.ds
        rg, y = _segment(ds, split)
        lin = predict_linear(self.linear, ds.tx, rg)
        if self.spec.canceller == "csid":
            _, nl, total = cancel_full(self.model, ds.tx, ds.rx, rg)
            return nl, total
        if self.spec.canceller == "poly":
            est = predict_poly(self.model, ds.tx, rg)
            return cancellation_db(y - lin, est - lin), cancellation_db(y, est)
        return math.nan, cancellation_db(y, lin)


def _cost(canceller, p):
    if canceller == "csid":
        return csid_cost(p["F"], p["L"], p["I"])
    if canceller == "poly":
        return poly_cost(p["P"], p["L"])
    return linear_cost(p["L"])


def _train_and_validate(args):
    ds, spec, point, index = args
    ev = _Evaluator(ds, spec, point, index)
    try:
        ev.fit()
        nl, total = ev.score("val")
        result = ev, (total if spec.canceller == "linear" else nl), None
    except Exception as exc:  # recorded per row, the grid continues
        log.warning("grid point %s failed: %s", point, exc)
        result = ev, -math.inf, f"{type(exc).__name__}: {exc}"
    ev.ds = None  # not shipped back from worker processes
    return result


def run_grid(spec: ExperimentSpec, dataset: SiDataset | None = None, access_log: list | None = None) -> list[dict]:
    """Train every grid point, select per report cell on validation, score the winners on test.

    Returns one row per report cell, sorted by grid coordinates; rows carry
    the :data:`COLUMNS` keys. When ``access_log`` is given, every split access
    is appended to it as ``(action, split, point_index)``.
    """
    ds = dataset if dataset is not None else spec.dataset()
    points = spec.points()
    jobs = [(ds, spec, p, i) for i, p in enumerate(points)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            done = list(pool.map(_train_and_validate, jobs))
    else:
        done = [_train_and_validate(j) for j in jobs]

    events = []
    for ev, _, _ in done:
        events.extend(ev.events)

    cells: dict[tuple, list] = {}
    for entry, p in zip(done, points):
        cells.setdefault(spec.report_key(p), []).append(entry)

    rows = []
    for key in sorted(cells, key=lambda k: tuple(float(v) for v in k)):
        entries = cells[key]
        # first grid point wins ties, so the choice is order-stable
        ev, val, err = max(entries, key=lambda e: (e[1], -e[0].index))
        row = {c: "" for c in COLUMNS}
        row.update({k: v for k, v in ev.point.items()})
        row["canceller"] = spec.canceller
        row["seed"] = spec.seed
        cost = _cost(spec.canceller, ev.point)
        row.update(adds=cost.additions, mults=cost.multiplications, memory=cost.memory)
        if err is None:
            ev.ds = ds
            nl, total = ev.score("test")
            events.extend(ev.events[-1:])
            row["val_nl_db"] = "" if spec.canceller == "linear" else val
            row["test_nl_db"] = "" if spec.canceller == "linear" else nl
            row["test_total_db"] = total
        else:
            row["error"] = err
        rows.append(row)

    if access_log is not None:
        access_log.extend(events)
    if spec.output:
        write_rows(spec.output, rows)
    return rows


def _fmt(v):
    if isinstance(v, float):
        return format_db(v)
    return str(v)


def rows_to_csv(rows: list[dict], columns=COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def write_rows(path, rows, columns=COLUMNS) -> None:
    Path(path).write_text(rows_to_csv(rows, columns))


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _num(v):
    if v in ("", None):
        return None
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def find_row(rows, canceller, **coords) -> dict:
    for r in rows:
        if r.get("canceller") != canceller:
            continue
        if all(_num(r.get(k)) == v for k, v in coords.items()):
            return r
    raise KeyError(f"no {canceller} row with {coords}")


def report_comparison(poly_row: dict, csid_row: dict) -> list[list]:
    """Comparison table of the polynomial, reference NN and tensor cancellers.

    Returns CSV-ready rows ``[metric, poly, nn, csid]``; the last two rows
    give the tensor canceller's percentage savings against the other two.
    """
    if poly_row is None or csid_row is None:
        raise ValueError("both a poly and a csid result row are required")
    if poly_row.get("error") or csid_row.get("error"):
        raise ValueError("cannot compare failed result rows")
    nn = NN_REFERENCE
    p = {k: _num(poly_row[k]) for k in ("P", "L", "adds", "mults", "memory")}
    c = {k: _num(csid_row[k]) for k in ("F", "I", "L", "adds", "mults", "memory")}
    na = "n/a"
    table = [
        ["metric", "poly", "nn", "csid"],
        ["canc_db", _fmt(float(poly_row["test_nl_db"])), _fmt(nn["canc_db"]), _fmt(float(csid_row["test_nl_db"]))],
        ["L", p["L"], nn["L"], c["L"]],
        ["P", p["P"], na, na],
        ["N_h", na, nn["hidden"], na],
        ["F", na, na, c["F"]],
        ["I", na, na, c["I"]],
        ["additions", p["adds"], nn["additions"], c["adds"]],
        ["multiplications", p["mults"], nn["multiplications"], c["mults"]],
        ["memory", p["memory"], nn["memory"], c["memory"]],
    ]
    for metric, key, nn_key in (("additions", "adds", "additions"), ("multiplications", "mults", "multiplications")):
        table.append([f"csid_{metric}_saving_pct",
                      round(100 * (1 - c[key] / p[key])), round(100 * (1 - c[key] / nn[nn_key])), ""])
    return table


def table_to_csv(table) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table)
    return buf.getvalue()
