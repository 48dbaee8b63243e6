"""Linear programs in maximisation form, with certified solves.

A :class:`LinearProgram` is ``max c.x  s.t.  A x (<= | =) b,  x >= 0`` with
sparse rows.  Three solve paths exist:

* a dense two-phase primal simplex (Dantzig pricing, switching to Bland's
  rule after a run of degenerate pivots),
* scipy's HiGHS dual simplex for problems too large for a dense tableau,
* an exact rational two-phase simplex (Bland's rule throughout) used as the
  reference oracle.

Every optimal result carries a certificate: primal residual, dual residual,
duality gap and complementary slackness, all recomputed from the original
data.  Dual values follow the Lagrange-multiplier sign convention of a
maximisation problem: ``<=`` rows have multipliers ``<= 0``; the dual
objective is therefore ``-b.duals``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

LE = "<="
EQ = "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

# dense tableau is used while rows * columns stays below this
DENSE_LIMIT = 400_000
EXACT_VAR_LIMIT = 2000


class LpError(Exception):
    pass


class LpSizeError(LpError):
    pass


@dataclass(frozen=True)
class Row:
    coeffs: Mapping[int, object]
    relation: str
    rhs: object
    key: Hashable = None


class LinearProgram:
    """Sparse maximisation LP with nonnegative variables.

    Variables and rows may carry hashable keys so that problem builders can
    map solution vectors back onto their own indexing.
    """

    def __init__(self) -> None:
        self.objective: list = []
        self.rows: list[Row] = []
        self.var_keys: list[Hashable] = []
        self._var_index: dict[Hashable, int] = {}

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_variable(self, cost, key: Hashable = None) -> int:
        j = len(self.objective)
        if key is not None:
            if key in self._var_index:
                raise LpError(f"duplicate variable key {key!r}")
            self._var_index[key] = j
        self.objective.append(cost)
        self.var_keys.append(key)
        return j

    def index(self, key: Hashable) -> int:
        return self._var_index[key]

    def add_row(self, coeffs: Mapping[int, object], relation: str, rhs, key: Hashable = None) -> int:
        if relation not in (LE, EQ):
            raise LpError(f"unsupported relation {relation!r}")
        for j, v in coeffs.items():
            if not 0 <= j < self.n_vars:
                raise LpError(f"row references unknown variable {j}")
            if isinstance(v, float) and not math.isfinite(v):
                raise LpError("non-finite coefficient")
        clean = {j: v for j, v in coeffs.items() if v != 0}
        self.rows.append(Row(clean, relation, rhs, key))
        return len(self.rows) - 1

    def dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
        A = np.zeros((self.n_rows, self.n_vars))
        for i, row in enumerate(self.rows):
            for j, v in row.coeffs.items():
                A[i, j] = float(v)
        b = np.array([float(r.rhs) for r in self.rows], dtype=float)
        c = np.array([float(v) for v in self.objective], dtype=float)
        return A, b, c, [r.relation for r in self.rows]


@dataclass(frozen=True)
class Tolerances:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    pivot_tol: float = 1e-11
    max_iter: int = 100_000
    bland_after: int = 50


@dataclass
class Certificate:
    primal_residual: float
    dual_residual: float
    duality_gap: float
    complementarity: float
    scale: float

    def ok(self, tol: Tolerances) -> bool:
        return (
            self.primal_residual <= tol.feas_tol * self.scale
            and self.dual_residual <= tol.feas_tol * self.scale
            and self.duality_gap <= tol.gap_tol * self.scale
            and self.complementarity <= tol.gap_tol * self.scale
        )


@dataclass
class LpSolution:
    status: str
    x: Sequence = field(default_factory=list)
    objective: object = None
    duals: Sequence = field(default_factory=list)
    iterations: int = 0
    method: str = ""
    certificate: Certificate | None = None
    certified: bool = False

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def value(self, lp: LinearProgram, key: Hashable):
        return self.x[lp.index(key)]


# ---------------------------------------------------------------------------
# certification


def certify(lp: LinearProgram, x: Sequence, duals: Sequence) -> Certificate:
    """Recompute residuals of a primal/dual pair on the original data.

    Works in exact arithmetic when handed Fractions.
    """
    exact = any(isinstance(v, Fraction) for v in x)
    zero = Fraction(0) if exact else 0.0
    y = [-d for d in duals]  # standard dual variables, >= 0 on <= rows
    primal_res = zero
    compl = zero
    bty = zero
    aty = [zero] * lp.n_vars
    dual_res = zero
    for i, row in enumerate(lp.rows):
        ax = sum((v * x[j] for j, v in row.coeffs.items()), zero)
        slack = row.rhs - ax
        if row.relation == LE:
            primal_res = max(primal_res, -slack)
            dual_res = max(dual_res, -y[i])
            compl = max(compl, abs(y[i] * slack))
        else:
            primal_res = max(primal_res, abs(slack))
        bty += row.rhs * y[i]
        for j, v in row.coeffs.items():
            aty[j] += v * y[i]
    cx = zero
    for j in range(lp.n_vars):
        primal_res = max(primal_res, -x[j])
        reduced = aty[j] - lp.objective[j]
        dual_res = max(dual_res, -reduced)
        compl = max(compl, abs(x[j] * reduced))
        cx += lp.objective[j] * x[j]
    return Certificate(
        primal_residual=float(primal_res),
        dual_residual=float(dual_res),
        duality_gap=float(abs(cx - bty)),
        complementarity=float(compl),
        scale=1.0 + abs(float(cx)),
    )


# ---------------------------------------------------------------------------
# dense floating simplex


def _normalise(A, b, rel):
    """Flip rows so that every right-hand side is nonnegative."""
    sign = np.where(b < 0, -1.0, 1.0)
    kinds = []
    for s, r in zip(sign, rel):
        if r == EQ:
            kinds.append("eq")
        else:
            kinds.append("le" if s > 0 else "ge")
    return A * sign[:, None], b * sign, sign, kinds


class _Tableau:
    def __init__(self, A, b, kinds, tol: Tolerances):
        m, n = A.shape
        self.m, self.n = m, n
        self.tol = tol
        n_slack = sum(k != "eq" for k in kinds)
        n_art = sum(k != "le" for k in kinds)
        self.n_struct = n + n_slack  # columns allowed to enter in phase 2
        ncol = n + n_slack + n_art
        self.tab = np.zeros((m, ncol + 1))
        self.tab[:, :n] = A
        self.tab[:, -1] = b
        self.basis = np.zeros(m, dtype=int)
        self.identity = np.zeros(m, dtype=int)
        s = n
        a = n + n_slack
        self.art_cols = []
        for i, k in enumerate(kinds):
            if k == "le":
                self.tab[i, s] = 1.0
                self.basis[i] = s
                self.identity[i] = s
                s += 1
            elif k == "ge":
                self.tab[i, s] = -1.0
                s += 1
                self.tab[i, a] = 1.0
                self.basis[i] = a
                self.identity[i] = a
                self.art_cols.append(a)
                a += 1
            else:
                self.tab[i, a] = 1.0
                self.basis[i] = a
                self.identity[i] = a
                self.art_cols.append(a)
                a += 1
        self.ncol = ncol
        self.obj = np.zeros(ncol + 1)
        self.iterations = 0

    def set_objective(self, cost: np.ndarray) -> None:
        """Load ``z_j - c_j`` for the current basis."""
        cb = cost[self.basis]
        self.obj = cb @ self.tab
        self.obj[:-1] -= cost

    def pivot(self, r: int, k: int) -> None:
        tab = self.tab
        tab[r] /= tab[r, k]
        col = tab[:, k].copy()
        col[r] = 0.0
        tab -= np.outer(col, tab[r])
        self.obj -= self.obj[k] * tab[r]
        self.basis[r] = k
        self.iterations += 1

    def run(self, eligible: int, bland_from_start: bool = False) -> str:
        tol = self.tol
        bland = bland_from_start
        streak = 0
        while True:
            if self.iterations >= tol.max_iter:
                return ITERATION_LIMIT
            red = self.obj[:eligible]
            if red.size == 0:
                return OPTIMAL
            if bland:
                cand = np.nonzero(red < -tol.pivot_tol)[0]
                if cand.size == 0:
                    return OPTIMAL
                k = int(cand[0])
            else:
                k = int(np.argmin(red))
                if red[k] >= -tol.pivot_tol:
                    return OPTIMAL
            col = self.tab[:, k]
            pos = np.nonzero(col > tol.pivot_tol)[0]
            if pos.size == 0:
                return UNBOUNDED
            ratios = self.tab[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + tol.pivot_tol * (1.0 + abs(best))]
            r = int(ties[np.argmin(self.basis[ties])])
            if best <= tol.pivot_tol:
                streak += 1
                if not bland and streak >= tol.bland_after:
                    log.debug("switching to Bland's rule after %d degenerate pivots", streak)
                    bland = True
            else:
                streak = 0
            self.pivot(r, k)


def _solve_dense(lp: LinearProgram, tol: Tolerances, bland: bool = False) -> LpSolution:
    A, b, c, rel = lp.dense()
    A, b, sign, kinds = _normalise(A, b, rel)
    t = _Tableau(A, b, kinds, tol)
    if t.art_cols:
        cost1 = np.zeros(t.ncol)
        cost1[t.art_cols] = -1.0
        t.set_objective(cost1)
        status = t.run(t.ncol, bland)
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, iterations=t.iterations, method="simplex")
        if t.obj[-1] < -tol.feas_tol * (1.0 + float(np.abs(b).max(initial=0.0))):
            return LpSolution(INFEASIBLE, iterations=t.iterations, method="simplex")
        art = set(t.art_cols)
        for i in range(t.m):
            if int(t.basis[i]) in art:
                row = t.tab[i, : t.n_struct]
                nz = np.nonzero(np.abs(row) > 1e-9)[0]
                if nz.size:
                    t.pivot(i, int(nz[0]))
    cost2 = np.zeros(t.ncol)
    cost2[: lp.n_vars] = c
    t.set_objective(cost2)
    status = t.run(t.n_struct, bland)
    if status != OPTIMAL:
        return LpSolution(status, iterations=t.iterations, method="simplex")
    x = np.zeros(lp.n_vars)
    for i, j in enumerate(t.basis):
        if j < lp.n_vars:
            x[j] = t.tab[i, -1]
    y_norm = t.obj[t.identity]
    duals = -(sign * y_norm)
    return LpSolution(OPTIMAL, x=x, objective=float(c @ x), duals=duals,
                      iterations=t.iterations, method="simplex")


# ---------------------------------------------------------------------------
# HiGHS


def _solve_highs(lp: LinearProgram, tol: Tolerances) -> LpSolution:
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    ub_rows = [i for i, r in enumerate(lp.rows) if r.relation == LE]
    eq_rows = [i for i, r in enumerate(lp.rows) if r.relation == EQ]

    def block(idx):
        data, ri, ci = [], [], []
        for k, i in enumerate(idx):
            for j, v in lp.rows[i].coeffs.items():
                data.append(float(v))
                ri.append(k)
                ci.append(j)
        mat = csr_matrix((data, (ri, ci)), shape=(len(idx), lp.n_vars))
        rhs = np.array([float(lp.rows[i].rhs) for i in idx])
        return mat, rhs

    c = np.array([float(v) for v in lp.objective])
    kw = {}
    if ub_rows:
        kw["A_ub"], kw["b_ub"] = block(ub_rows)
    if eq_rows:
        kw["A_eq"], kw["b_eq"] = block(eq_rows)
    if lp.n_vars == 0:
        return LpSolution(OPTIMAL, x=np.zeros(0), objective=0.0,
                          duals=np.zeros(lp.n_rows), method="highs")
    res = linprog(
        -c, bounds=(0, None), method="highs-ds",
        options={
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
            "maxiter": tol.max_iter,
        },
        **kw,
    )
    status = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status)
    if status is None:
        raise LpError(f"HiGHS failed: {res.message}")
    if status != OPTIMAL:
        return LpSolution(status, iterations=int(res.nit), method="highs")
    duals = np.zeros(lp.n_rows)
    # for min(-c) the marginals are d(min)/db, i.e. minus the max-problem duals
    if ub_rows:
        duals[ub_rows] = res.ineqlin.marginals
    if eq_rows:
        duals[eq_rows] = res.eqlin.marginals
    x = np.maximum(res.x, 0.0)
    return LpSolution(OPTIMAL, x=x, objective=float(c @ x), duals=duals,
                      iterations=int(res.nit), method="highs")


def _solve_empty(lp: LinearProgram, tol: Tolerances) -> LpSolution:
    for row in lp.rows:
        rhs = float(row.rhs)
        if rhs < -tol.feas_tol or (row.relation == EQ and abs(rhs) > tol.feas_tol):
            return LpSolution(INFEASIBLE, method="trivial")
    return LpSolution(OPTIMAL, x=np.zeros(0), objective=0.0, duals=np.zeros(lp.n_rows), method="trivial")


def solve(lp: LinearProgram, tol: Tolerances | None = None, method: str = "auto") -> LpSolution:
    """Solve ``lp`` in floating point and attach a certificate.

    ``method`` is ``"simplex"`` (dense two-phase), ``"highs"`` or ``"auto"``
    (dense while the tableau is small).
    """
    tol = tol or Tolerances()
    if method == "auto":
        dense_size = lp.n_rows * (lp.n_vars + 2 * lp.n_rows)
        method = "simplex" if dense_size <= DENSE_LIMIT else "highs"
    if method not in ("simplex", "bland", "highs"):
        raise ValueError(f"unknown method {method!r}")
    if lp.n_vars == 0:
        sol = _solve_empty(lp, tol)
    elif method == "highs":
        sol = _solve_highs(lp, tol)
    else:
        sol = _solve_dense(lp, tol, bland=method == "bland")
    if sol.is_optimal:
        sol.certificate = certify(lp, sol.x, sol.duals)
        sol.certified = sol.certificate.ok(tol)
        if not sol.certified:
            log.warning("solution failed certification: %s", sol.certificate)
    return sol


# ---------------------------------------------------------------------------
# exact rational simplex


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def solve_exact(lp: LinearProgram, max_vars: int = EXACT_VAR_LIMIT, max_iter: int = 200_000) -> LpSolution:
    """Two-phase simplex in rational arithmetic with Bland's rule.

    Rows are kept as sparse dicts; the result is exact, so the certificate
    residuals are identically zero for a correct implementation.
    """
    if lp.n_vars > max_vars:
        raise LpSizeError(f"{lp.n_vars} variables exceed exact-solve limit {max_vars}")
    n = lp.n_vars
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    signs: list[int] = []
    kinds: list[str] = []
    for r in lp.rows:
        b = _frac(r.rhs)
        s = -1 if b < 0 else 1
        rows.append({j: s * _frac(v) for j, v in r.coeffs.items()})
        rhs.append(s * b)
        signs.append(s)
        kinds.append("eq" if r.relation == EQ else ("le" if s > 0 else "ge"))
    m = len(rows)
    n_slack = sum(k != "eq" for k in kinds)
    n_struct = n + n_slack
    basis = [0] * m
    identity = [0] * m
    art_cols = []
    s_col, a_col = n, n_struct
    for i, k in enumerate(kinds):
        if k == "le":
            rows[i][s_col] = Fraction(1)
            basis[i] = identity[i] = s_col
            s_col += 1
        else:
            if k == "ge":
                rows[i][s_col] = Fraction(-1)
                s_col += 1
            rows[i][a_col] = Fraction(1)
            basis[i] = identity[i] = a_col
            art_cols.append(a_col)
            a_col += 1
    iterations = 0

    def objective_row(cost: dict[int, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
        obj: dict[int, Fraction] = {j: -v for j, v in cost.items() if v}
        val = Fraction(0)
        for i, bj in enumerate(basis):
            cb = cost.get(bj, 0)
            if cb:
                for j, v in rows[i].items():
                    obj[j] = obj.get(j, 0) + cb * v
                val += cb * rhs[i]
        return {j: v for j, v in obj.items() if v}, val

    def pivot(r: int, k: int, obj: dict, val: Fraction) -> Fraction:
        nonlocal iterations
        prow = rows[r]
        p = prow[k]
        if p != 1:
            for j in prow:
                prow[j] /= p
            rhs[r] /= p
        for i in range(m):
            if i == r:
                continue
            f = rows[i].get(k)
            if f:
                row = rows[i]
                for j, v in prow.items():
                    nv = row.get(j, 0) - f * v
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
                rhs[i] -= f * rhs[r]
        f = obj.get(k)
        if f:
            for j, v in prow.items():
                nv = obj.get(j, 0) - f * v
                if nv:
                    obj[j] = nv
                else:
                    obj.pop(j, None)
            val -= f * rhs[r]
        basis[r] = k
        iterations += 1
        return val

    def run(obj: dict, val: Fraction, eligible: int) -> tuple[str, Fraction]:
        while True:
            if iterations >= max_iter:
                return ITERATION_LIMIT, val
            cand = [j for j, v in obj.items() if j < eligible and v < 0]
            if not cand:
                return OPTIMAL, val
            k = min(cand)
            best = None
            r = -1
            for i in range(m):
                a = rows[i].get(k)
                if a is not None and a > 0:
                    ratio = rhs[i] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                        best, r = ratio, i
            if r < 0:
                return UNBOUNDED, val
            val = pivot(r, k, obj, val)

    if art_cols:
        obj, val = objective_row({a: Fraction(-1) for a in art_cols})
        status, val = run(obj, val, a_col)
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, iterations=iterations, method="exact")
        if val < 0:
            return LpSolution(INFEASIBLE, iterations=iterations, method="exact")
        art = set(art_cols)
        for i in range(m):
            if basis[i] in art:
                nz = sorted(j for j in rows[i] if j < n_struct)
                if nz:
                    pivot(i, nz[0], {}, Fraction(0))
    cost = {j: _frac(v) for j, v in enumerate(lp.objective) if v}
    obj, val = objective_row(cost)
    status, val = run(obj, val, n_struct)
    if status != OPTIMAL:
        return LpSolution(status, iterations=iterations, method="exact")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rhs[i]
    duals = [-(signs[i] * obj.get(identity[i], Fraction(0))) for i in range(m)]
    sol = LpSolution(OPTIMAL, x=x, objective=val, duals=duals, iterations=iterations, method="exact")
    sol.certificate = certify(lp, x, duals)
    sol.certified = (
        sol.certificate.primal_residual == 0
        and sol.certificate.dual_residual == 0
        and sol.certificate.duality_gap == 0
        and sol.certificate.complementarity == 0
    )
    return sol


# ---------------------------------------------------------------------------
# CPLEX-LP text format (the subset this module writes)

_NAME_RE = re.compile(r"[^A-Za-z0-9_.]")


def _lp_name(key: Hashable, prefix: str, idx: int) -> str:
    if key is None:
        return f"{prefix}{idx}"
    parts = key if isinstance(key, tuple) else (key,)
    return _NAME_RE.sub("_", "_".join(str(p) for p in parts)) + f"__{idx}"


def _fmt(v) -> str:
    return repr(float(v)) if not isinstance(v, int) else str(v)


def _expr(terms: Iterable[tuple[object, str]]) -> str:
    out = []
    for v, name in terms:
        fv = float(v)
        out.append(f"{'-' if fv < 0 else '+'} {_fmt(abs(fv))} {name}")
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else text


def write_lp(lp: LinearProgram) -> str:
    names = [_lp_name(k, "x", j) for j, k in enumerate(lp.var_keys)]
    lines = ["\\ feeder LP export", "Maximize"]
    lines.append(" obj: " + (_expr((v, names[j]) for j, v in enumerate(lp.objective)) or "0 x_dummy"))
    lines.append("Subject To")
    for i, row in enumerate(lp.rows):
        expr = _expr((v, names[j]) for j, v in sorted(row.coeffs.items())) or f"0 {names[0] if names else 'x_dummy'}"
        rel = "<=" if row.relation == LE else "="
        lines.append(f" {_lp_name(row.key, 'r', i)}: {expr} {rel} {_fmt(row.rhs)}")
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-])?\s*([0-9.eE+-]+(?:\s+|\s*\*\s*))?([A-Za-z_][A-Za-z0-9_.]*)")


def _parse_expr(text: str, index: dict[str, int], lp: LinearProgram) -> dict[int, float]:
    coeffs: dict[int, float] = {}
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    # re-join exponents split by the replace above (e.g. 1e - 05)
    sign, coef = 1.0, None
    k = 0
    while k < len(tokens):
        tok = tokens[k]
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
        elif re.fullmatch(r"[0-9.]+[eE]", tok) and k + 2 < len(tokens):
            coef = float(tok + tokens[k + 1] + tokens[k + 2])
            k += 2
        elif re.fullmatch(r"[0-9.]+([eE][0-9]+)?", tok):
            coef = float(tok)
        else:
            if tok not in index:
                index[tok] = lp.add_variable(0.0, key=tok)
            j = index[tok]
            coeffs[j] = coeffs.get(j, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
        k += 1
    return coeffs


def read_lp(text: str) -> LinearProgram:
    """Parse the LP-format subset produced by :func:`write_lp`."""
    lp = LinearProgram()
    index: dict[str, int] = {}
    section = None
    maximise = True
    objective_text = []
    pending = ""
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("maximize", "maximise", "max"):
            section, maximise = "obj", True
            continue
        if low in ("minimize", "minimise", "min"):
            section, maximise = "obj", False
            continue
        if low in ("subject to", "such that", "st", "s.t."):
            section = "st"
            continue
        if low in ("bounds",):
            section = "bounds"
            continue
        if low == "end":
            break
        if section == "obj":
            objective_text.append(line.split(":", 1)[-1])
        elif section == "st":
            pending = f"{pending} {line}".strip()
            m = re.search(r"(<=|>=|=<|=>|=)\s*([-+]?[0-9.eE+-]+)\s*$", pending)
            if not m:
                continue
            head, rel_tok, rhs = pending[: m.start()], m.group(1), float(m.group(2))
            name = None
            if ":" in head:
                name, head = head.split(":", 1)
                name = name.strip()
            coeffs = _parse_expr(head, index, lp)
            if rel_tok in (">=", "=>"):
                coeffs = {j: -v for j, v in coeffs.items()}
                rhs, rel = -rhs, LE
            else:
                rel = EQ if rel_tok == "=" else LE
            lp.rows.append(Row({j: v for j, v in coeffs.items() if v}, rel, rhs, name))
            pending = ""
        elif section == "bounds":
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*\s*>=\s*0(\.0*)?", line):
                raise LpError(f"unsupported bound line: {line!r}")
    if pending:
        raise LpError(f"unterminated constraint: {pending!r}")
    obj = _parse_expr(" ".join(objective_text), index, lp)
    for j, v in obj.items():
        lp.objective[j] = v if maximise else -v
    lp.objective = [float(v) for v in lp.objective]
    return lp
