"""Gap reports: timed solves, decimal truncation, table rows, JSON output.

Every solve entry records its formulation, status, exact or float objective,
and wall-clock seconds.  Rationals are displayed both as ``p/q`` and as a
decimal truncated (not rounded) after the fifth place, the convention used
by the reference tables this package reproduces.  The environment variable
``STEINER_GAP_TIME_LIMIT_SECS`` bounds every single solve: the exact
simplex checks it internally, and oracle calls are run in a disposable
subprocess so they can be cut off too.  A solve that exceeds the limit
yields a ``timed-out`` entry, never a partial number.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .formulations import (compile_formulation, lp_key_permutation,
                           solve_symmetrized)
from .graphs import SteinerInstance
from .instances import (coordinate_swap_permutation, gen_level_restricted,
                        gen_simplex_instance)
from .lp import (TIME_LIMIT_ENV, TimeLimitExceeded, quotient_lp, solve_exact,
                 solve_float, verify_certificate)
from .rationals import trunc_decimal

ONE_E5 = 10 ** 5


# ---------------------------------------------------------------------------
# display helpers
# ---------------------------------------------------------------------------

def truncate5(x: Fraction | float | int) -> str:
    """Decimal truncated (toward zero) after the fifth place: 16/15 -> 1.06666."""
    return trunc_decimal(Fraction(x), 5)


def rational_str(x: Fraction | float | None) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def env_time_limit() -> float | None:
    raw = os.environ.get(TIME_LIMIT_ENV, "")
    try:
        limit = float(raw) if raw else None
    except ValueError:
        return None
    return limit if limit and limit > 0 else None


# ---------------------------------------------------------------------------
# report containers
# ---------------------------------------------------------------------------

@dataclass
class SolveEntry:
    formulation: str
    plus: bool
    status: str
    objective: Fraction | float | None
    seconds: float
    certificate: str | None = None

    @property
    def decimal5(self) -> str:
        return "" if self.objective is None else truncate5(self.objective)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "formulation": self.formulation,
            "plus": self.plus,
            "status": self.status,
            "objective": rational_str(self.objective),
            "decimal5": self.decimal5,
            "seconds": round(self.seconds, 6),
        }
        if self.certificate is not None:
            doc["certificate"] = self.certificate
        return doc


@dataclass
class GapEntry:
    """A ratio of two recorded exact values (numerator over denominator)."""

    num: Fraction
    den: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.num / self.den

    def to_dict(self) -> dict[str, Any]:
        return {"num": str(self.num), "den": str(self.den),
                "ratio": str(self.ratio), "decimal5": truncate5(self.ratio)}


@dataclass
class GapReport:
    instance: str
    params: Mapping[str, Any]
    results: list[SolveEntry] = field(default_factory=list)
    gaps: list[GapEntry] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "instance": self.instance,
            "params": dict(self.params),
            "results": [r.to_dict() for r in self.results],
            "gaps": [g.to_dict() for g in self.gaps],
        }, indent=1)


# ---------------------------------------------------------------------------
# bounded execution
# ---------------------------------------------------------------------------

def _subprocess_call(queue, fn, args, kwargs) -> None:  # pragma: no cover
    try:
        queue.put(("ok", fn(*args, **kwargs)))
    except Exception as exc:  # noqa: BLE001 - relayed to the parent
        queue.put(("error", f"{type(exc).__name__}: {exc}"))


def run_limited(fn: Callable, *args: Any, time_limit: float | None = None,
                **kwargs: Any) -> tuple[Any, float, bool]:
    """Run ``fn`` under the solve time limit; returns (result, seconds, timed_out).

    With no limit configured the call happens inline.  With a limit, the
    call runs in a forked subprocess that is terminated at the deadline, so
    even non-cooperative computations are bounded.
    """
    limit = env_time_limit() if time_limit is None else time_limit
    start = time.perf_counter()
    if not limit:
        return fn(*args, **kwargs), time.perf_counter() - start, False
    ctx = multiprocessing.get_context("fork")
    queue = ctx.Queue()
    proc = ctx.Process(target=_subprocess_call, args=(queue, fn, args, kwargs))
    proc.start()
    proc.join(limit)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return None, time.perf_counter() - start, True
    status, payload = queue.get(timeout=10)
    seconds = time.perf_counter() - start
    if status == "error":
        raise RuntimeError(f"subprocess solve failed: {payload}")
    return payload, seconds, False


# ---------------------------------------------------------------------------
# solving into entries
# ---------------------------------------------------------------------------

def solve_entry(inst: SteinerInstance, formulation: str, plus: bool = False,
                exact: bool = True, root: int | None = None,
                vertex_perms: Sequence[Sequence[int]] | None = None,
                time_limit: float | None = None) -> tuple[SolveEntry, Any]:
    """Solve one formulation on one instance; returns (entry, raw result).

    Exact solves carry a verified strong-duality certificate; the raw
    result is the :class:`~steiner_gaps.lp.SolveResult` (or ``FloatResult``)
    for callers that want values or certificates, ``None`` on timeout.
    """
    compiled = compile_formulation(inst, formulation, root=root, plus=plus)
    start = time.perf_counter()
    try:
        if exact and vertex_perms:
            res = solve_symmetrized(compiled, vertex_perms, time_limit=time_limit)
        elif exact:
            res = solve_exact(compiled.lp, time_limit=time_limit)
            if res.status == "optimal" and not verify_certificate(compiled.lp, res):
                raise AssertionError("optimal result failed certificate check")
        else:
            res = solve_float(compiled.lp, time_limit=time_limit)
    except TimeLimitExceeded:
        seconds = time.perf_counter() - start
        return SolveEntry(formulation, plus, "timed-out", None, seconds), None
    seconds = time.perf_counter() - start
    status = res.status
    objective = res.objective if status == "optimal" else None
    if status == "time_limit":
        status, objective = "timed-out", None
    return SolveEntry(formulation, plus, status, objective, seconds), res


def oracle_entry(fn: Callable, *args: Any, name: str,
                 time_limit: float | None = None) -> tuple[SolveEntry, Any]:
    """Run an exact oracle as a report entry (bounded by the time limit)."""
    result, seconds, timed_out = run_limited(fn, *args, time_limit=time_limit)
    if timed_out:
        return SolveEntry(name, False, "timed-out", None, seconds), None
    return SolveEntry(name, False, "optimal", result.optimum, seconds), result


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------

# Published gap values (decimals truncated after the fifth place).
PRINTED_MAIN = {1: "1", 2: "1.06666", 3: "1.09459", 4: "1.12116",
                5: "1.13939", 6: "1.15042", 7: "1.16094", 8: "1.16883",
                9: "1.17340"}
PRINTED_LEVEL2 = {1: "1", 2: "1.06666", 3: "1.09090", 4: "1.10344",
                  5: "1.12612", 6: "1.13513", 7: "1.13953", 8: "1.14927",
                  9: "1.15384"}
FLOAT_TABLE_TOL = 2e-5


@dataclass
class TableRow:
    d: int
    gap: Fraction | float | None
    exact: bool
    printed: str | None

    @property
    def display(self) -> str:
        if self.gap is None:
            return "timed-out"
        return truncate5(self.gap)

    @property
    def matches_printed(self) -> bool | None:
        """None when there is no reference or no value to compare."""
        if self.printed is None or self.gap is None:
            return None
        ref = Fraction(self.printed)
        step = Fraction(1, ONE_E5)
        if self.exact:
            return ref <= self.gap < ref + step
        lo = float(ref) - FLOAT_TABLE_TOL
        hi = float(ref + step) + FLOAT_TABLE_TOL
        return lo <= float(self.gap) <= hi


def _table_instance(which: str, d: int) -> SteinerInstance:
    if which == "main":
        return gen_simplex_instance(d, d)
    if which == "level2":
        return gen_level_restricted(d, d, 2)
    raise ValueError(f"unknown table {which!r} (expected 'main' or 'level2')")


def _simplex_perms(inst: SteinerInstance, d: int) -> list[list[int]]:
    # Adjacent-coordinate swaps on 0..d-1 generate the stabilizer of the
    # root corner (whose hot coordinate is d).
    return [coordinate_swap_permutation(inst.graph, i, i + 1)
            for i in range(d - 1)]


def table_gap(which: str, d: int, exact: bool = True,
              time_limit: float | None = None) -> Fraction | float | None:
    """gap of the d-dimensional table instance: opt(plus) / opt(base).

    Exact mode solves both multicommodity LPs through the symmetry
    quotient and returns a Fraction; float mode solves the quotient with
    a floating-point solver.  ``None`` means a solve hit the time limit.
    """
    inst = _table_instance(which, d)
    perms = _simplex_perms(inst, d)
    values: list[Fraction | float] = []
    for plus in (False, True):
        compiled = compile_formulation(inst, "mcfr", plus=plus)
        try:
            if exact:
                if perms:
                    res = solve_symmetrized(compiled, perms, time_limit=time_limit)
                else:
                    res = solve_exact(compiled.lp, time_limit=time_limit)
                values.append(res.objective)
            else:
                key_perms = [lp_key_permutation(compiled, p) for p in perms]
                reduced, _, _ = quotient_lp(compiled.lp, key_perms)
                fres = solve_float(reduced, time_limit=time_limit)
                if fres.status != "optimal":
                    return None
                values.append(fres.objective)
        except TimeLimitExceeded:
            return None
    return values[1] / values[0]


def table_rows(which: str, dmax: int, exact_dmax: int,
               time_limit: float | None = None) -> list[TableRow]:
    if dmax > 9:
        raise ValueError("dmax is capped at 9")
    printed = PRINTED_MAIN if which == "main" else PRINTED_LEVEL2
    rows = []
    for d in range(1, dmax + 1):
        exact = d <= exact_dmax
        gap = table_gap(which, d, exact=exact, time_limit=time_limit)
        rows.append(TableRow(d, gap, exact, printed.get(d)))
    return rows
