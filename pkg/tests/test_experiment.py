import math

import numpy as np
import pytest

from tensorsic import experiment as ex
from tensorsic.csid import TrainConfig, cancel_full, train_csid
from tensorsic.linear import fit_linear
from tensorsic.synth import SynthConfig, make_dataset

SMALL = SynthConfig(n_carriers=256, n_symbols=6, seed=2)


@pytest.fixture(scope="module")
def ds():
    return make_dataset(SMALL)


def test_single_point_matches_direct_call(ds):
    spec = ex.ExperimentSpec(canceller="csid", synth=SMALL, F=(2,), I=(8,), mu=(1e-3,), rho=(1e-3,),
                             L=(2,), seed=5, max_sweeps=10)
    rows = ex.run_grid(spec, ds)
    assert len(rows) == 1
    lin = fit_linear(ds.tx, ds.rx, ds.train, 2)
    cfg = TrainConfig(F=2, I=8, mu=1e-3, rho=1e-3, max_sweeps=10, seed=ex.point_seed(5, 0))
    m = train_csid(ds.tx, ds.rx, ds.train, cfg, lin)
    _, val_nl, _ = cancel_full(m, ds.tx, ds.rx, ds.val)
    _, nl, total = cancel_full(m, ds.tx, ds.rx, ds.test)
    r = rows[0]
    assert (r["val_nl_db"], r["test_nl_db"], r["test_total_db"]) == (val_nl, nl, total)
    assert (r["adds"], r["mults"], r["memory"]) == (44, 23, 2 * (2 * 32 + 2))


def test_selection_protocol_and_access_log(ds):
    spec = ex.ExperimentSpec(canceller="csid", synth=SMALL, F=(1, 2), I=(8,), mu=(1e-4, 1e-2),
                             rho=(1e-3, 1e-1), max_sweeps=5)
    log = []
    rows = ex.run_grid(spec, ds, access_log=log)
    assert [(r["F"], r["I"]) for r in rows] == [(1, 8), (2, 8)]
    test_events = [e for e in log if e[1] == "test"]
    assert len(test_events) == 2
    first_test = log.index(test_events[0])
    # every train/validation access precedes the first test access
    assert all(e[1] != "test" for e in log[:first_test])
    assert {e[1] for e in log[first_test:]} == {"test"}

    # the tested point has the best validation score in its cell
    points = spec.points()
    for (_, _, idx), row in zip(test_events, rows):
        assert points[idx]["F"] == row["F"]
        assert (points[idx]["mu"], points[idx]["rho"]) == (row["mu"], row["rho"])


def test_determinism_and_workers(ds, tmp_path):
    kw = dict(canceller="csid", synth=SMALL, F=(1, 2), I=(8,), mu=(1e-3,), rho=(1e-3, 1e-2), max_sweeps=5)
    a = ex.rows_to_csv(ex.run_grid(ex.ExperimentSpec(**kw), ds))
    b = ex.rows_to_csv(ex.run_grid(ex.ExperimentSpec(**kw), ds))
    c = ex.rows_to_csv(ex.run_grid(ex.ExperimentSpec(workers=2, **kw), ds))
    assert a == b == c
    assert a.splitlines()[0] == ",".join(ex.COLUMNS)


def test_row_level_error_does_not_stop_grid(ds):
    spec = ex.ExperimentSpec(canceller="poly", synth=SMALL, P=(1, 7), L=(2, 40))
    rows = ex.run_grid(spec, ds)
    assert len(rows) == 4
    errors = {(r["P"], r["L"]): r["error"] for r in rows}
    assert errors[(1, 2)] == "" and errors[(7, 2)] == ""
    assert "ValueError" in errors[(7, 40)]
    failed = next(r for r in rows if r["error"])
    assert failed["test_total_db"] == ""


def test_linear_truth_all_cancellers_reach_floor():
    cfg = SynthConfig(n_carriers=512, n_symbols=8, noise_power_db=-30,
                      pa_coefficients={(1, 1, 0): 1.0, (1, 1, 1): 0.2 - 0.1j}, seed=4)
    data = make_dataset(cfg)
    totals = []
    for spec in (ex.ExperimentSpec(canceller="linear", synth=cfg, L=(2,)),
                 ex.ExperimentSpec(canceller="poly", synth=cfg, P=(3,), L=(2,)),
                 ex.ExperimentSpec(canceller="csid", synth=cfg, F=(2,), I=(16,), mu=(1e-2,), rho=(1e-2,),
                                   max_sweeps=20)):
        totals.extend(r["test_total_db"] for r in ex.run_grid(spec, data))
    assert all(abs(t - 30) <= 1.0 for t in totals), totals


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        ex.ExperimentSpec(canceller="csid", F=())
    with pytest.raises(ValueError):
        ex.ExperimentSpec(canceller="nn")
    with pytest.raises(FileNotFoundError):
        ex.ExperimentSpec(canceller="linear", data=str(tmp_path / "missing.csv"))
    with pytest.raises(ValueError):
        ex.ExperimentSpec(canceller="poly", select=("mu",))


def _row(canceller, **kw):
    row = {c: "" for c in ex.COLUMNS}
    row.update(canceller=canceller, **{k: str(v) for k, v in kw.items()})
    return row


def test_report_comparison_table():
    poly = _row("poly", P=7, L=3, adds=418, mults=180, memory=120, test_nl_db=11.5)
    csid = _row("csid", F=4, I=32, L=2, adds=78, mults=47, memory=1028, test_nl_db=13.6)
    table = ex.report_comparison(poly, csid)
    by = {r[0]: r[1:] for r in table}
    assert by["metric"] == ["poly", "nn", "csid"]
    assert by["additions"] == [418, 82, 78]
    assert by["multiplications"] == [180, 60, 47]
    assert by["memory"] == [120, 58, 1028]
    assert by["canc_db"] == ["11.5", "13.3", "13.6"]
    assert by["csid_additions_saving_pct"][:2] == [81, 5]
    assert by["csid_multiplications_saving_pct"][:2] == [74, 22]


def test_report_comparison_requires_rows():
    with pytest.raises(ValueError):
        ex.report_comparison(None, _row("csid"))
    with pytest.raises(KeyError):
        ex.find_row([_row("poly", P=5, L=3)], "poly", P=7, L=3)


def test_rows_round_trip_through_csv(tmp_path, ds):
    spec = ex.ExperimentSpec(canceller="poly", synth=SMALL, P=(3,), L=(2,), output=str(tmp_path / "r.csv"))
    rows = ex.run_grid(spec, ds)
    back = ex.read_rows(tmp_path / "r.csv")
    assert float(back[0]["test_total_db"]) == rows[0]["test_total_db"]
    assert ex.find_row(back, "poly", P=3, L=2) == back[0]
    assert math.isfinite(float(back[0]["val_nl_db"]))
