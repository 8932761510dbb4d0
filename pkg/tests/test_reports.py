"""Report entries, bounded execution, and gap-table reproduction."""

import json
import time
from fractions import Fraction as F
from types import SimpleNamespace

import pytest

from steiner_gaps.instances import gen_simplex_instance
from steiner_gaps.lp import TIME_LIMIT_ENV
from steiner_gaps.oracles import exact_steiner_tree
from steiner_gaps.reports import (FLOAT_TABLE_TOL, GapEntry, GapReport,
                                  PRINTED_LEVEL2, PRINTED_MAIN, SolveEntry,
                                  TableRow, _simplex_perms, env_time_limit,
                                  oracle_entry, rational_str, run_limited,
                                  solve_entry, table_gap, table_rows,
                                  truncate5)


def test_truncate5_truncates_not_rounds():
    assert truncate5(F(16, 15)) == "1.06666"
    assert truncate5(F(81, 74)) == "1.09459"
    assert truncate5(F(2, 3)) == "0.66666"
    assert truncate5(2) == "2.00000"


def test_rational_str():
    assert rational_str(None) == ""
    assert rational_str(F(3, 2)) == "3/2"
    assert rational_str(0.5) == "0.5"
    assert rational_str(7) == "7"


def test_env_time_limit(monkeypatch):
    monkeypatch.delenv(TIME_LIMIT_ENV, raising=False)
    assert env_time_limit() is None
    monkeypatch.setenv(TIME_LIMIT_ENV, "2.5")
    assert env_time_limit() == 2.5
    monkeypatch.setenv(TIME_LIMIT_ENV, "")
    assert env_time_limit() is None
    monkeypatch.setenv(TIME_LIMIT_ENV, "banana")
    assert env_time_limit() is None
    monkeypatch.setenv(TIME_LIMIT_ENV, "0")
    assert env_time_limit() is None
    monkeypatch.setenv(TIME_LIMIT_ENV, "-3")
    assert env_time_limit() is None


def test_solve_entry_dict_schema():
    entry = SolveEntry("mcfr", True, "optimal", F(15, 2), 0.1234567)
    doc = entry.to_dict()
    assert doc == {"formulation": "mcfr", "plus": True, "status": "optimal",
                   "objective": "15/2", "decimal5": "7.50000",
                   "seconds": 0.123457}
    entry.certificate = "verified"
    assert entry.to_dict()["certificate"] == "verified"
    timed = SolveEntry("bcr", False, "timed-out", None, 1.0)
    assert timed.decimal5 == "" and timed.to_dict()["objective"] == ""


def test_gap_entry_and_report_json():
    gap = GapEntry(num=F(8), den=F(15, 2))
    assert gap.ratio == F(16, 15)
    assert gap.to_dict() == {"num": "8", "den": "15/2", "ratio": "16/15",
                             "decimal5": "1.06666"}
    report = GapReport("simplex-d2-s2", {"d": 2, "s": 2},
                       [SolveEntry("mcfr", False, "optimal", F(15, 2), 0.0)],
                       [gap])
    doc = json.loads(report.to_json())
    assert set(doc) == {"instance", "params", "results", "gaps"}
    assert doc["params"] == {"d": 2, "s": 2}
    assert doc["results"][0]["formulation"] == "mcfr"
    assert doc["gaps"][0]["ratio"] == "16/15"


def test_run_limited_inline_and_subprocess(monkeypatch):
    monkeypatch.delenv(TIME_LIMIT_ENV, raising=False)
    value, seconds, timed_out = run_limited(lambda a, b: a + b, 2, 3)
    assert (value, timed_out) == (5, False) and seconds >= 0
    value, _, timed_out = run_limited(lambda: 42, time_limit=30)
    assert (value, timed_out) == (42, False)


def test_run_limited_cuts_off_sleepers():
    value, seconds, timed_out = run_limited(time.sleep, 30, time_limit=0.3)
    assert value is None and timed_out
    assert seconds < 10


def test_run_limited_relays_subprocess_errors():
    def boom():
        raise ValueError("nope")

    with pytest.raises(RuntimeError, match="ValueError: nope"):
        run_limited(boom, time_limit=30)


def test_solve_entry_exact_and_float():
    inst = gen_simplex_instance(2, 2)
    entry, res = solve_entry(inst, "mcfr")
    assert entry.status == "optimal" and entry.objective == F(15, 2)
    assert entry.formulation == "mcfr" and entry.plus is False
    assert res is not None and res.objective == F(15, 2)
    plus_entry, _ = solve_entry(inst, "mcfr", plus=True)
    assert plus_entry.objective == 8 and plus_entry.plus is True
    fentry, fres = solve_entry(inst, "mbfr", exact=False)
    assert fentry.status == "optimal"
    assert abs(fentry.objective - 7.5) < 1e-6
    assert fres is not None


def test_solve_entry_timeout():
    inst = gen_simplex_instance(2, 2)
    entry, res = solve_entry(inst, "mcfr", time_limit=1e-12)
    assert entry.status == "timed-out"
    assert entry.objective is None and res is None
    assert entry.decimal5 == ""


def _slow_oracle(secs):
    time.sleep(secs)
    return SimpleNamespace(optimum=F(1))


def test_oracle_entry_paths():
    inst = gen_simplex_instance(2, 2)
    entry, res = oracle_entry(exact_steiner_tree, inst, name="steiner-tree")
    assert entry.status == "optimal" and entry.objective == 8
    assert entry.formulation == "steiner-tree"
    assert res.optimum == 8
    timed, res = oracle_entry(_slow_oracle, 30, name="slow", time_limit=0.3)
    assert timed.status == "timed-out" and res is None


def test_printed_tables_content():
    assert PRINTED_MAIN[2] == "1.06666" and PRINTED_MAIN[4] == "1.12116"
    assert PRINTED_LEVEL2[3] == "1.09090"
    assert set(PRINTED_MAIN) == set(PRINTED_LEVEL2) == set(range(1, 10))


def test_table_row_matching():
    step = F(1, 10 ** 5)
    exact_hit = TableRow(2, F(16, 15), True, "1.06666")
    assert exact_hit.matches_printed is True
    assert exact_hit.display == "1.06666"
    exact_miss = TableRow(2, F(15, 14), True, "1.06666")
    assert exact_miss.matches_printed is False
    assert TableRow(2, F(16, 15), True, None).matches_printed is None
    timed = TableRow(2, None, True, "1.06666")
    assert timed.matches_printed is None and timed.display == "timed-out"
    ref = F("1.06666")
    inside = float(ref) + FLOAT_TABLE_TOL / 2
    outside = float(ref + step) + 2 * FLOAT_TABLE_TOL
    assert TableRow(2, inside, False, "1.06666").matches_printed is True
    assert TableRow(2, outside, False, "1.06666").matches_printed is False
    below = float(ref) - FLOAT_TABLE_TOL / 2
    assert TableRow(2, below, False, "1.06666").matches_printed is True
    assert TableRow(2, float(ref) - 2 * FLOAT_TABLE_TOL, False,
                    "1.06666").matches_printed is False


def test_simplex_perms_fix_the_root():
    inst = gen_simplex_instance(2, 2)
    perms = _simplex_perms(inst, 2)
    assert len(perms) == 1
    root = inst.required[0]
    assert all(p[root] == root for p in perms)
    assert _simplex_perms(gen_simplex_instance(1, 1), 1) == []


def test_table_gap_values():
    assert table_gap("main", 1, exact=True) == 1
    assert table_gap("main", 2, exact=True) == F(16, 15)
    assert table_gap("level2", 2, exact=True) == F(16, 15)
    approx = table_gap("main", 2, exact=False)
    assert abs(approx - 16 / 15) < 1e-6
    with pytest.raises(ValueError, match="unknown table"):
        table_gap("diagonal", 2)


def test_table_gap_timeout_returns_none():
    assert table_gap("main", 2, exact=True, time_limit=1e-12) is None


def test_table_rows():
    rows = table_rows("main", 2, exact_dmax=2)
    assert [r.d for r in rows] == [1, 2]
    assert all(r.exact for r in rows)
    assert all(r.matches_printed for r in rows)
    assert rows[1].gap == F(16, 15)
    with pytest.raises(ValueError):
        table_rows("main", 10, exact_dmax=1)
