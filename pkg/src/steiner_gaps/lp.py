"""Exact rational linear programming with verifiable certificates.

:class:`RationalLp` models a minimization LP with hashable variable and row
keys, rational data, per-variable lower bounds (or free variables), and rows
with senses ``<=``, ``>=``, ``==``.  :func:`solve_exact` runs a dense
two-phase primal simplex over exact rationals and returns, depending on the
outcome, an optimal primal/dual pair, a Farkas infeasibility witness, or a
feasible point plus an improving ray.  :func:`verify_certificate` re-checks
any of these in exact arithmetic against the original data, so correctness
never rests on the solver internals.

Pivoting uses Dantzig's rule and switches permanently to Bland's rule after
a long degenerate stall, which guarantees termination.  Internally the
tableau holds ``gmpy2.mpq`` numbers for speed; all public data is
:class:`fractions.Fraction`.

:func:`solve_float` wraps ``scipy.optimize.linprog`` (HiGHS) for quick
approximate solves, and :func:`symmetrize_lp` shrinks an LP by a group of
variable-key symmetries, solves the quotient exactly, and lifts primal and
dual back with full exact verification.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

ZERO = Fraction(0)

SENSES = ("<=", ">=", "==")

#: Environment variable holding a global time limit (seconds) for exact solves.
TIME_LIMIT_ENV = "STEINER_GAP_TIME_LIMIT_SECS"

#: Consecutive non-improving pivots tolerated before switching to Bland's rule.
STALL_LIMIT = 60


class TimeLimitExceeded(Exception):
    """Raised when an exact solve exceeds the configured wall-clock budget."""


def _to_frac(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass
class Variable:
    key: Any
    lower: Fraction | None  # None means free
    cost: Fraction


@dataclass
class LinearRow:
    key: Any
    coeffs: dict[Any, Fraction]
    sense: str
    rhs: Fraction


class RationalLp:
    """A minimization LP over exact rationals with keyed variables and rows."""

    def __init__(self, name: str = "") -> None:
        self.name = name
        self.variables: dict[Any, Variable] = {}
        self.rows: dict[Any, LinearRow] = {}

    def add_var(self, key: Any, cost: Any = 0, lower: Any = 0, free: bool = False) -> None:
        if key in self.variables:
            raise ValueError(f"duplicate variable {key!r}")
        lb = None if free else _to_frac(lower)
        self.variables[key] = Variable(key, lb, _to_frac(cost))

    def set_cost(self, key: Any, cost: Any) -> None:
        self.variables[key].cost = _to_frac(cost)

    def add_row(self, key: Any, coeffs: Mapping[Any, Any], sense: str, rhs: Any) -> None:
        if key in self.rows:
            raise ValueError(f"duplicate row {key!r}")
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        clean = {}
        for var, c in coeffs.items():
            if var not in self.variables:
                raise KeyError(f"row {key!r} references unknown variable {var!r}")
            c = _to_frac(c)
            if c != 0:
                clean[var] = c
        self.rows[key] = LinearRow(key, clean, sense, _to_frac(rhs))

    def remove_row(self, key: Any) -> None:
        del self.rows[key]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def objective_value(self, values: Mapping[Any, Fraction]) -> Fraction:
        return sum((v.cost * values[k] for k, v in self.variables.items() if v.cost), ZERO)

    def row_activity(self, row: LinearRow, values: Mapping[Any, Fraction]) -> Fraction:
        return sum((c * values[k] for k, c in row.coeffs.items()), ZERO)

    def copy(self, name: str | None = None) -> "RationalLp":
        out = RationalLp(self.name if name is None else name)
        for k, v in self.variables.items():
            out.variables[k] = Variable(k, v.lower, v.cost)
        for k, r in self.rows.items():
            out.rows[k] = LinearRow(k, dict(r.coeffs), r.sense, r.rhs)
        return out


@dataclass
class SolveResult:
    """Outcome of an exact solve, carrying an exactly checkable certificate.

    status ``optimal``: ``values``/``duals``/``reduced_costs`` form a strong
    duality certificate.  status ``infeasible``: ``farkas`` is a Farkas
    witness.  status ``unbounded``: ``values`` is feasible and ``ray`` is an
    improving recession direction.
    """

    status: str
    objective: Fraction | None = None
    values: dict[Any, Fraction] = field(default_factory=dict)
    duals: dict[Any, Fraction] = field(default_factory=dict)
    reduced_costs: dict[Any, Fraction] = field(default_factory=dict)
    farkas: dict[Any, Fraction] = field(default_factory=dict)
    ray: dict[Any, Fraction] = field(default_factory=dict)
    iterations: int = 0
    seconds: float = 0.0


# ---------------------------------------------------------------------------
# exact two-phase simplex
# ---------------------------------------------------------------------------

def _deadline(time_limit: float | None) -> float | None:
    if time_limit is None:
        env = os.environ.get(TIME_LIMIT_ENV, "")
        try:
            time_limit = float(env) if env else None
        except ValueError:
            time_limit = None
    if time_limit is None or time_limit <= 0:
        return None
    return time.monotonic() + time_limit


class _Tableau:
    """Dense simplex tableau in standard equality form over mpq."""

    def __init__(self, lp: RationalLp) -> None:
        self.lp = lp
        self.var_keys = list(lp.variables)
        self.row_keys = list(lp.rows)
        # column layout: structural (split negatives for free vars), slacks, artificials
        self.col_of: dict[Any, int] = {}
        self.neg_col_of: dict[Any, int] = {}
        self.shift: dict[Any, Fraction] = {}
        cols = 0
        for k in self.var_keys:
            v = lp.variables[k]
            self.col_of[k] = cols
            cols += 1
            if v.lower is None:
                self.neg_col_of[k] = cols
                cols += 1
            else:
                self.shift[k] = v.lower
        self.n_struct = cols
        self.sigma: list[int] = []
        rows_data: list[tuple[dict[int, Fraction], Fraction, str]] = []
        for rk in self.row_keys:
            row = lp.rows[rk]
            rhs = row.rhs - sum(
                (row.coeffs[k] * self.shift[k] for k in row.coeffs if k in self.shift), ZERO
            )
            sense = row.sense
            sig = 1
            if rhs < 0:
                sig, rhs = -1, -rhs
                sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
            coeffs: dict[int, Fraction] = {}
            for k, c in row.coeffs.items():
                c = c if sig == 1 else -c
                coeffs[self.col_of[k]] = c
                if k in self.neg_col_of:
                    coeffs[self.neg_col_of[k]] = -c
            self.sigma.append(sig)
            rows_data.append((coeffs, rhs, sense))
        m = len(rows_data)
        self.slack_col: list[int | None] = [None] * m
        for i, (_, _, sense) in enumerate(rows_data):
            if sense in ("<=", ">="):
                self.slack_col[i] = cols
                cols += 1
        self.art_col = list(range(cols, cols + m))
        cols += m
        self.width = cols + 1  # + rhs
        self.rhs_col = cols
        zero = mpq(0)
        self.T: list[list[mpq]] = []
        self.basis: list[int] = []
        self.active_orig: list[int] = list(range(m))
        for i, (coeffs, rhs, sense) in enumerate(rows_data):
            line = [zero] * self.width
            for c, val in coeffs.items():
                line[c] = mpq(val)
            if self.slack_col[i] is not None:
                line[self.slack_col[i]] = mpq(1) if sense == "<=" else mpq(-1)
            line[self.art_col[i]] = mpq(1)
            line[self.rhs_col] = mpq(rhs)
            self.T.append(line)
            if sense == "<=":
                self.basis.append(self.slack_col[i])
            else:
                self.basis.append(self.art_col[i])
        self.first_art = self.art_col[0] if m else self.n_struct
        self.c_std = [zero] * self.width
        for k in self.var_keys:
            cost = mpq(lp.variables[k].cost)
            self.c_std[self.col_of[k]] = cost
            if k in self.neg_col_of:
                self.c_std[self.neg_col_of[k]] = -cost

    # -- core pivoting ---------------------------------------------------

    def _pivot(self, z: list[mpq], row: int, col: int) -> None:
        T = self.T
        prow = T[row]
        piv = prow[col]
        if piv != 1:
            inv = 1 / piv
            T[row] = prow = [a * inv for a in prow]
        for i, line in enumerate(T):
            if i == row:
                continue
            f = line[col]
            if f:
                T[i] = [a - f * b for a, b in zip(line, prow)]
        f = z[col]
        if f:
            z[:] = [a - f * b for a, b in zip(z, prow)]
        self.basis[row] = col

    def _run(self, z: list[mpq], allowed: int, deadline: float | None,
             counter: list[int]) -> tuple[str, int | None]:
        """Minimize z over allowed columns; returns ("optimal", None) or ("unbounded", col)."""
        T = self.T
        rhs = self.rhs_col
        bland = False
        stall = 0
        last_obj = z[rhs]
        while True:
            if deadline is not None and time.monotonic() > deadline:
                raise TimeLimitExceeded(self.lp.name or "lp")
            enter = -1
            if bland:
                for j in range(allowed):
                    if z[j] < 0:
                        enter = j
                        break
            else:
                best = 0
                for j in range(allowed):
                    rj = z[j]
                    if rj < best:
                        best, enter = rj, j
            if enter < 0:
                return "optimal", None
            leave = -1
            best_ratio = None
            for i, line in enumerate(T):
                a = line[enter]
                if a > 0:
                    ratio = line[rhs] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[leave])):
                        best_ratio, leave = ratio, i
            if leave < 0:
                return "unbounded", enter
            self._pivot(z, leave, enter)
            counter[0] += 1
            if z[rhs] == last_obj:
                stall += 1
                if stall >= STALL_LIMIT:
                    bland = True
            else:
                stall = 0
                last_obj = z[rhs]

    def _fresh_z(self, costs: list[mpq]) -> list[mpq]:
        z = list(costs)
        for i, line in enumerate(self.T):
            f = z[self.basis[i]]
            if f:
                z[:] = [a - f * b for a, b in zip(z, line)]
        return z

    def _cleanup_artificials(self) -> None:
        """Pivot basic artificials out; drop rows that prove redundant."""
        drop: list[int] = []
        for i in range(len(self.T)):
            if self.basis[i] < self.first_art:
                continue
            line = self.T[i]
            col = next((j for j in range(self.first_art) if line[j]), None)
            if col is None:
                drop.append(i)
            else:
                dummy = [mpq(0)] * self.width
                self._pivot(dummy, i, col)
        for i in reversed(drop):
            del self.T[i]
            del self.basis[i]
            del self.active_orig[i]

    # -- extraction ------------------------------------------------------

    def _std_values(self) -> list[mpq]:
        x = [mpq(0)] * self.width
        for i, line in enumerate(self.T):
            x[self.basis[i]] = line[self.rhs_col]
        return x

    def values_from_std(self, x: Sequence[mpq]) -> dict[Any, Fraction]:
        out = {}
        for k in self.var_keys:
            val = x[self.col_of[k]]
            if k in self.neg_col_of:
                val = val - x[self.neg_col_of[k]]
            val = Fraction(val.numerator, val.denominator)
            out[k] = val + self.shift.get(k, ZERO)
        return out

    def duals_from_basis(self, costs: list[mpq]) -> dict[Any, Fraction]:
        cb = [costs[b] for b in self.basis]
        out = {}
        for orig, rk in enumerate(self.row_keys):
            col = self.art_col[orig]
            y = sum((cb[i] * line[col] for i, line in enumerate(self.T) if cb[i]), mpq(0))
            y = y if self.sigma[orig] == 1 else -y
            out[rk] = Fraction(y.numerator, y.denominator)
        return out


def solve_exact(lp: RationalLp, time_limit: float | None = None) -> SolveResult:
    """Solve exactly; returns a result whose certificate verifies against ``lp``."""
    t0 = time.monotonic()
    deadline = _deadline(time_limit)
    tab = _Tableau(lp)
    counter = [0]

    def finish(res: SolveResult) -> SolveResult:
        res.iterations = counter[0]
        res.seconds = time.monotonic() - t0
        return res

    # phase 1: minimize the artificial sum
    phase1_costs = [mpq(0)] * tab.width
    for c in tab.art_col:
        phase1_costs[c] = mpq(1)
    z1 = tab._fresh_z(phase1_costs)
    status, _ = tab._run(z1, tab.first_art, deadline, counter)
    assert status == "optimal", "phase 1 cannot be unbounded"
    infeas = -z1[tab.rhs_col]
    if infeas > 0:
        farkas = tab.duals_from_basis(phase1_costs)
        return finish(SolveResult(status="infeasible", farkas=farkas))
    tab._cleanup_artificials()

    # phase 2: minimize the true objective
    z2 = tab._fresh_z(list(tab.c_std))
    status, enter = tab._run(z2, tab.first_art, deadline, counter)
    if status == "unbounded":
        x = tab._std_values()
        values = tab.values_from_std(x)
        ray_std = [mpq(0)] * tab.width
        ray_std[enter] = mpq(1)
        for i, line in enumerate(tab.T):
            ray_std[tab.basis[i]] = -line[enter]
        ray = {}
        for k in tab.var_keys:
            val = ray_std[tab.col_of[k]]
            if k in tab.neg_col_of:
                val = val - ray_std[tab.neg_col_of[k]]
            if val:
                ray[k] = Fraction(val.numerator, val.denominator)
        return finish(SolveResult(status="unbounded", values=values, ray=ray))

    x = tab._std_values()
    values = tab.values_from_std(x)
    duals = tab.duals_from_basis(tab.c_std)
    reduced = {}
    for k, var in lp.variables.items():
        r = var.cost
        for rk, row in lp.rows.items():
            c = row.coeffs.get(k)
            if c is not None and duals[rk]:
                r -= duals[rk] * c
        reduced[k] = r
    return finish(SolveResult(status="optimal", objective=lp.objective_value(values),
                              values=values, duals=duals, reduced_costs=reduced))


# ---------------------------------------------------------------------------
# certificate verification
# ---------------------------------------------------------------------------

def certificate_errors(lp: RationalLp, res: SolveResult) -> list[str]:
    """Exact-arithmetic certificate check; empty list means the proof is valid."""
    errs: list[str] = []

    def check_primal(values: Mapping[Any, Fraction]) -> None:
        for k, var in lp.variables.items():
            if var.lower is not None and values[k] < var.lower:
                errs.append(f"variable {k!r} below lower bound")
        for rk, row in lp.rows.items():
            lhs = lp.row_activity(row, values)
            ok = (lhs <= row.rhs if row.sense == "<=" else
                  lhs >= row.rhs if row.sense == ">=" else lhs == row.rhs)
            if not ok:
                errs.append(f"row {rk!r} violated ({row.sense}, lhs={lhs}, rhs={row.rhs})")

    def check_dual_signs(y: Mapping[Any, Fraction]) -> None:
        for rk, row in lp.rows.items():
            yv = y.get(rk, ZERO)
            if row.sense == ">=" and yv < 0:
                errs.append(f"dual of >= row {rk!r} negative")
            if row.sense == "<=" and yv > 0:
                errs.append(f"dual of <= row {rk!r} positive")

    def combo(y: Mapping[Any, Fraction]) -> dict[Any, Fraction]:
        out = {k: ZERO for k in lp.variables}
        for rk, row in lp.rows.items():
            yv = y.get(rk, ZERO)
            if yv:
                for k, c in row.coeffs.items():
                    out[k] += yv * c
        return out

    if res.status == "optimal":
        check_primal(res.values)
        check_dual_signs(res.duals)
        ya = combo(res.duals)
        dual_obj = sum((res.duals.get(rk, ZERO) * row.rhs for rk, row in lp.rows.items()), ZERO)
        for k, var in lp.variables.items():
            r = var.cost - ya[k]
            if res.reduced_costs.get(k, ZERO) != r:
                errs.append(f"stored reduced cost of {k!r} inconsistent")
            if var.lower is None:
                if r != 0:
                    errs.append(f"free variable {k!r} has nonzero reduced cost {r}")
            else:
                if r < 0:
                    errs.append(f"variable {k!r} has negative reduced cost {r}")
                dual_obj += r * var.lower
        primal_obj = lp.objective_value(res.values)
        if primal_obj != dual_obj:
            errs.append(f"duality gap: primal {primal_obj} vs dual {dual_obj}")
        if res.objective != primal_obj:
            errs.append("stored objective differs from recomputed value")
    elif res.status == "infeasible":
        check_dual_signs(res.farkas)
        ya = combo(res.farkas)
        bound = sum((res.farkas.get(rk, ZERO) * row.rhs for rk, row in lp.rows.items()), ZERO)
        for k, var in lp.variables.items():
            if var.lower is None:
                if ya[k] != 0:
                    errs.append(f"Farkas combination touches free variable {k!r}")
            else:
                if ya[k] > 0:
                    errs.append(f"Farkas combination positive on bounded variable {k!r}")
                bound -= ya[k] * var.lower
        if not bound > 0:
            errs.append(f"Farkas witness not separating (value {bound})")
    elif res.status == "unbounded":
        check_primal(res.values)
        ray = res.ray
        drop = sum((lp.variables[k].cost * v for k, v in ray.items()), ZERO)
        if not drop < 0:
            errs.append(f"ray does not improve the objective (c.z = {drop})")
        for k, v in ray.items():
            if lp.variables[k].lower is not None and v < 0:
                errs.append(f"ray decreases bounded variable {k!r}")
        for rk, row in lp.rows.items():
            act = sum((c * ray.get(k, ZERO) for k, c in row.coeffs.items()), ZERO)
            ok = (act <= 0 if row.sense == "<=" else act >= 0 if row.sense == ">=" else act == 0)
            if not ok:
                errs.append(f"ray leaves feasible cone at row {rk!r}")
    else:
        errs.append(f"unknown status {res.status!r}")
    return errs


def verify_certificate(lp: RationalLp, res: SolveResult) -> bool:
    """True iff the result's certificate proves its claim for ``lp`` exactly."""
    return not certificate_errors(lp, res)


# ---------------------------------------------------------------------------
# floating-point solve (HiGHS)
# ---------------------------------------------------------------------------

@dataclass
class FloatResult:
    status: str
    objective: float | None
    values: dict[Any, float]
    seconds: float


def solve_float(lp: RationalLp, time_limit: float | None = None) -> FloatResult:
    """Approximate solve via scipy's HiGHS backend (sparse matrices)."""
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    t0 = time.monotonic()
    keys = list(lp.variables)
    col = {k: j for j, k in enumerate(keys)}
    c = np.zeros(len(keys))
    bounds = []
    for j, k in enumerate(keys):
        v = lp.variables[k]
        c[j] = float(v.cost)
        bounds.append((None if v.lower is None else float(v.lower), None))
    ub_rows, ub_cols, ub_vals, b_ub = [], [], [], []
    eq_rows, eq_cols, eq_vals, b_eq = [], [], [], []
    for row in lp.rows.values():
        if row.sense == "==":
            idx = len(b_eq)
            b_eq.append(float(row.rhs))
            for k, a in row.coeffs.items():
                eq_rows.append(idx)
                eq_cols.append(col[k])
                eq_vals.append(float(a))
        else:
            sig = 1.0 if row.sense == "<=" else -1.0
            idx = len(b_ub)
            b_ub.append(sig * float(row.rhs))
            for k, a in row.coeffs.items():
                ub_rows.append(idx)
                ub_cols.append(col[k])
                ub_vals.append(sig * float(a))
    kwargs: dict[str, Any] = {}
    if b_ub:
        kwargs["A_ub"] = csr_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(b_ub), len(keys)))
        kwargs["b_ub"] = np.array(b_ub)
    if b_eq:
        kwargs["A_eq"] = csr_matrix((eq_vals, (eq_rows, eq_cols)), shape=(len(b_eq), len(keys)))
        kwargs["b_eq"] = np.array(b_eq)
    options: dict[str, Any] = {}
    if time_limit is not None:
        options["time_limit"] = time_limit
    out = linprog(c, bounds=bounds, method="highs", options=options, **kwargs)
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(out.status, f"error:{out.status}")
    values = {k: float(out.x[col[k]]) for k in keys} if out.x is not None else {}
    objective = float(out.fun) if out.fun is not None else None
    return FloatResult(status, objective, values, time.monotonic() - t0)


# ---------------------------------------------------------------------------
# symmetry reduction
# ---------------------------------------------------------------------------

def _canonical_row(row: LinearRow) -> tuple:
    return (row.sense, row.rhs, tuple(sorted(row.coeffs.items(), key=repr)))


def _mapped_row(row: LinearRow, perm: Mapping[Any, Any]) -> LinearRow:
    return LinearRow(row.key, {perm.get(k, k): c for k, c in row.coeffs.items()},
                     row.sense, row.rhs)


class _UnionFind:
    def __init__(self, items: Iterable[Any]) -> None:
        self.parent = {x: x for x in items}

    def find(self, x: Any) -> Any:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: Any, b: Any) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> dict[Any, list[Any]]:
        out: dict[Any, list[Any]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def quotient_lp(lp: RationalLp, perms: Sequence[Mapping[Any, Any]],
                ) -> tuple[RationalLp, dict[Any, Any], dict[Any, list[Any]]]:
    """Merge variable and row orbits under the given symmetries.

    Each permutation in ``perms`` must map variable keys to variable keys and
    leave the LP invariant (checked: costs, bounds, and the multiset of
    rows).  Variables in one orbit are replaced by a single variable whose
    cost is the orbit's total, and orbit rows are merged, so the quotient
    has the same optimum value as ``lp``.  Returns the reduced LP, the
    variable-to-representative map, and the row orbit classes.
    """
    var_uf = _UnionFind(lp.variables)
    by_canon: dict[tuple, list[Any]] = {}
    for rk, row in lp.rows.items():
        by_canon.setdefault(_canonical_row(row), []).append(rk)
    row_uf = _UnionFind(lp.rows)
    for keys in by_canon.values():
        for other in keys[1:]:
            row_uf.union(keys[0], other)
    for perm in perms:
        for k in perm:
            if k not in lp.variables:
                raise KeyError(f"permutation maps unknown variable {k!r}")
        for k, k2 in perm.items():
            a, b = lp.variables[k], lp.variables[k2]
            if a.cost != b.cost or a.lower != b.lower:
                raise ValueError(f"objective/bounds not invariant at {k!r} -> {k2!r}")
            var_uf.union(k, k2)
        for rk, row in lp.rows.items():
            image = _canonical_row(_mapped_row(row, perm))
            targets = by_canon.get(image)
            if not targets:
                raise ValueError(f"row {rk!r} has no image under a symmetry")
            row_uf.union(rk, targets[0])

    var_classes = var_uf.classes()
    rep_of_var = {k: rep for rep, members in var_classes.items() for k in members}
    row_classes = row_uf.classes()

    reduced = RationalLp(name=f"{lp.name}/sym")
    for rep, members in sorted(var_classes.items(), key=lambda kv: repr(kv[0])):
        v = lp.variables[rep]
        total_cost = sum((lp.variables[k].cost for k in members), ZERO)
        reduced.add_var(rep, cost=total_cost, lower=v.lower if v.lower is not None else 0,
                        free=v.lower is None)
    for rep, members in sorted(row_classes.items(), key=lambda kv: repr(kv[0])):
        row = lp.rows[rep]
        merged: dict[Any, Fraction] = {}
        for k, c in row.coeffs.items():
            r = rep_of_var[k]
            merged[r] = merged.get(r, ZERO) + c
        reduced.add_row(rep, merged, row.sense, row.rhs)
    return reduced, rep_of_var, row_classes


def symmetrize_lp(lp: RationalLp, perms: Sequence[Mapping[Any, Any]],
                  time_limit: float | None = None) -> SolveResult:
    """Solve ``lp`` through its symmetry quotient and lift an exact certificate.

    The quotient from :func:`quotient_lp` is solved exactly and the solution
    is lifted (duals split evenly across each merged row class).  The lifted
    certificate is verified exactly against the original LP, so the
    reduction cannot silently give a wrong answer.  Only the ``optimal``
    status is lifted; other statuses raise ``ValueError``.
    """
    reduced, rep_of_var, row_classes = quotient_lp(lp, perms)
    res = solve_exact(reduced, time_limit=time_limit)
    if res.status != "optimal":
        raise ValueError(f"symmetry-reduced LP is {res.status}; solve the full LP instead")
    values = {k: res.values[rep_of_var[k]] for k in lp.variables}
    duals: dict[Any, Fraction] = {}
    for rep, members in row_classes.items():
        share = res.duals[rep] / len(members)
        for rk in members:
            duals[rk] = share
    reduced_costs = {}
    for k, var in lp.variables.items():
        r = var.cost
        for rk, row in lp.rows.items():
            c = row.coeffs.get(k)
            if c is not None and duals[rk]:
                r -= duals[rk] * c
        reduced_costs[k] = r
    lifted = SolveResult(status="optimal", objective=lp.objective_value(values),
                         values=values, duals=duals, reduced_costs=reduced_costs,
                         iterations=res.iterations, seconds=res.seconds)
    errs = certificate_errors(lp, lifted)
    if errs:
        raise ValueError("symmetry lift failed verification: " + "; ".join(errs[:5]))
    return lifted


# ---------------------------------------------------------------------------
# cutting-plane driver
# ---------------------------------------------------------------------------

def solve_with_row_generation(
    lp: RationalLp,
    separate: Callable[[Mapping[Any, Fraction]], list[tuple[Any, Mapping[Any, Fraction], str, Fraction]]],
    float_separate: Callable[[Mapping[Any, float]], list[tuple[Any, Mapping[Any, Fraction], str, Fraction]]] | None = None,
    time_limit: float | None = None,
    max_rounds: int = 10_000,
    prunable: Iterable[Any] = (),
) -> SolveResult:
    """Exact cutting-plane loop: solve, ask ``separate`` for violated rows, repeat.

    ``separate`` receives exact variable values and returns violated rows as
    ``(key, coeffs, sense, rhs)`` tuples (empty when none exist, at which
    point the current certificate is optimal for the fully constrained LP).
    When ``float_separate`` is given, cheap floating-point rounds run first
    to collect most rows before any exact solve; rows those rounds generated
    (plus any caller-seeded keys listed in ``prunable``) that end up clearly
    slack at the floating-point optimum are dropped again before the exact
    phase, which keeps the exactly solved LP small.  Dropping is safe: any
    row the exact optimum still violates is re-separated.  ``lp`` is
    mutated: the rows generated by the exact phase stay attached.
    """
    deadline = _deadline(time_limit)
    remaining = (lambda: None if deadline is None else max(deadline - time.monotonic(), 0.01))
    if float_separate is not None:
        droppable = set(prunable)
        fres = None
        for _ in range(max_rounds):
            fres = solve_float(lp, time_limit=remaining())
            if fres.status != "optimal":
                break
            new = float_separate(fres.values)
            if not new:
                break
            for key, coeffs, sense, rhs in new:
                lp.add_row(key, coeffs, sense, rhs)
                droppable.add(key)
        if fres is not None and fres.status == "optimal":
            for key in droppable:
                row = lp.rows.get(key)
                if row is None or row.sense == "==":
                    continue
                activity = sum(float(c) * fres.values.get(k, 0.0)
                               for k, c in row.coeffs.items())
                slack = (activity - float(row.rhs) if row.sense == ">="
                         else float(row.rhs) - activity)
                if slack > 1e-6:
                    lp.remove_row(key)
    total_iters = 0
    t0 = time.monotonic()
    for _ in range(max_rounds):
        res = solve_exact(lp, time_limit=remaining())
        total_iters += res.iterations
        if res.status != "optimal":
            res.iterations = total_iters
            return res
        new = separate(res.values)
        if not new:
            res.iterations = total_iters
            res.seconds = time.monotonic() - t0
            return res
        for key, coeffs, sense, rhs in new:
            lp.add_row(key, coeffs, sense, rhs)
    raise RuntimeError("row generation did not converge")


# ---------------------------------------------------------------------------
# LP-format export
# ---------------------------------------------------------------------------

def _safe_names(keys: Sequence[Any]) -> dict[Any, str]:
    names: dict[Any, str] = {}
    seen: set[str] = set()
    for k in keys:
        base = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in str(k)).strip("_")
        if not base or base[0].isdigit():
            base = "v_" + base
        name = base
        i = 1
        while name in seen:
            i += 1
            name = f"{base}_{i}"
        seen.add(name)
        names[k] = name
    return names


def to_cplex_lp(lp: RationalLp) -> str:
    """Serialize in CPLEX LP text format with 30-digit decimal coefficients."""
    from .rationals import decimal30

    vnames = _safe_names(list(lp.variables))
    rnames = _safe_names([("row", k) for k in lp.rows])
    out = [f"\\ {lp.name}" if lp.name else "\\ exported LP", "Minimize", " obj:"]

    def terms(coeffs: Iterable[tuple[Any, Fraction]]) -> str:
        parts = []
        for k, c in coeffs:
            if c == 0:
                continue
            sign = "+" if c > 0 else "-"
            parts.append(f" {sign} {decimal30(abs(c))} {vnames[k]}")
        return "".join(parts) if parts else " 0 " + next(iter(vnames.values()))

    out[-1] += terms((k, v.cost) for k, v in lp.variables.items())
    out.append("Subject To")
    sense_txt = {"<=": "<=", ">=": ">=", "==": "="}
    for rk, row in lp.rows.items():
        out.append(f" {rnames[('row', rk)]}:{terms(row.coeffs.items())} "
                   f"{sense_txt[row.sense]} {decimal30(row.rhs)}")
    out.append("Bounds")
    for k, v in lp.variables.items():
        if v.lower is None:
            out.append(f" {vnames[k]} free")
        elif v.lower != 0:
            out.append(f" {vnames[k]} >= {decimal30(v.lower)}")
    out.append("End")
    return "\n".join(out) + "\n"
