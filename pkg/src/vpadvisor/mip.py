"""Exact optimization: linearized integer program, file export, a
built-in branch-and-bound solver, and an exhaustive-enumeration oracle.

The quadratic placement score is linearized with one auxiliary variable
``u[t,a,s]`` per transaction/attribute/site triple, constrained by
``u <= x``, ``u <= y`` and ``u >= x + y - 1``.  The auxiliaries stay
continuous: with ``x`` and ``y`` binary those three rows pin ``u`` to
the product ``x*y``.  The built-in solver runs best-first
branch-and-bound on the LP relaxation (solved by HiGHS via scipy),
branching the most fractional transaction variable first and never
branching the auxiliaries.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from . import kernels
from .anneal import SaConfig, solve_sa, solve_subproblem_fix_transactions
from .errors import BudgetExceededError, FormatError
from .grouping import order_transactions_by_load
from .partitioning import CostBreakdown, Partitioning, check_feasible, evaluate
from .report import (
    STATUS_FEASIBLE_TIME_LIMIT,
    STATUS_NO_SOLUTION_TIME_LIMIT,
    STATUS_OPTIMAL,
    SolveReport,
)
from .workload import CostModel, Instance, derive, subset_transactions

BINARY = "binary"
CONTINUOUS = "continuous-nonnegative"

#: Nominal layout count enumerated by :func:`brute_force` at most.
DEFAULT_ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class MipVariable:
    """One column of the integer program."""

    name: str
    kind: str  # BINARY or CONTINUOUS
    objective: float
    upper: Optional[float] = None  # None = unbounded above


@dataclass(frozen=True)
class MipConstraint:
    """One row: sum(coef * var) <relation> rhs."""

    name: str
    terms: Tuple[Tuple[int, float], ...]
    relation: str  # "<=", ">=" or "="
    rhs: float


@dataclass(frozen=True)
class MipModel:
    """A minimization program over binary placement variables.

    Variable order: ``x[t,s]`` (site fastest), ``y[a,s]``, ``u[t,a,s]``,
    ``m``, then one indicator per write query when the latency term is
    modeled.  Base constraint order: assignment, coverage, read
    co-location, per-site load, linearization triples; optional
    symmetry-breaking, pinned-replica, and latency rows follow.
    """

    variables: Tuple[MipVariable, ...]
    constraints: Tuple[MipConstraint, ...]
    n_txns: int
    n_attrs: int
    n_sites: int
    has_latency: bool
    write_query_ids: Tuple[int, ...] = ()

    @property
    def variable_count(self) -> int:
        return len(self.variables)

    @property
    def constraint_count(self) -> int:
        return len(self.constraints)

    def x_index(self, t: int, s: int) -> int:
        return t * self.n_sites + s

    def y_index(self, a: int, s: int) -> int:
        return self.n_txns * self.n_sites + a * self.n_sites + s

    def u_index(self, t: int, a: int, s: int) -> int:
        base = (self.n_txns + self.n_attrs) * self.n_sites
        return base + (t * self.n_attrs + a) * self.n_sites + s

    @property
    def m_index(self) -> int:
        return (self.n_txns + self.n_attrs + self.n_txns * self.n_attrs) * self.n_sites

    def psi_index(self, write_pos: int) -> int:
        if not self.has_latency:
            raise ValueError("model has no latency indicators")
        return self.m_index + 1 + write_pos


def build_mip(
    instance: Instance,
    model: Optional[CostModel] = None,
    *,
    use_symmetry: bool = False,
    forbid_replication: bool = False,
    fixed_replicas: Sequence[Tuple[int, int]] = (),
    with_latency: Optional[bool] = None,
) -> MipModel:
    """Construct the linearized program for ``instance``.

    The base model minimizes the weighted score.  ``use_symmetry`` adds
    site-ordering rows (site ``s`` may host a transaction only after
    some earlier transaction uses site ``s-1``) — valid only while
    sites are interchangeable, so callers must leave it off when
    pinning replicas.  ``forbid_replication`` turns the coverage rows
    into equalities (each attribute on exactly one site).
    ``fixed_replicas`` pins ``y[a,s] = 1`` for the given pairs.
    ``with_latency`` defaults to whether the instance prices latency.
    """
    if model is None:
        model = derive(instance)
    n_txns = instance.transaction_count
    n_attrs = instance.attribute_count
    n_sites = instance.site_count
    lam = float(instance.cost_weight)
    if with_latency is None:
        with_latency = instance.latency_penalty is not None
    if with_latency and instance.latency_penalty is None:
        raise ValueError("latency indicators need the instance's latency penalty")

    pins = sorted({(int(a), int(s)) for a, s in fixed_replicas})
    for a, s in pins:
        if not 0 <= a < n_attrs:
            raise ValueError(f"pinned replica names unknown attribute {a}")
        if not 0 <= s < n_sites:
            raise ValueError(f"pinned replica names unknown site {s}")

    variables: List[MipVariable] = []
    for t in range(n_txns):
        for s in range(n_sites):
            variables.append(MipVariable(f"x_{t}_{s}", BINARY, 0.0, upper=1.0))
    for a in range(n_attrs):
        for s in range(n_sites):
            variables.append(
                MipVariable(f"y_{a}_{s}", BINARY, lam * float(model.replica_cost[a]), upper=1.0)
            )
    for t in range(n_txns):
        for a in range(n_attrs):
            coef = lam * float(model.coloc_cost[a, t])
            for s in range(n_sites):
                variables.append(MipVariable(f"u_{t}_{a}_{s}", CONTINUOUS, coef, upper=None))
    variables.append(MipVariable("m", CONTINUOUS, 1.0 - lam, upper=None))

    write_query_ids: Tuple[int, ...] = ()
    if with_latency:
        write_query_ids = tuple(q.id for q in instance.queries if q.is_write)
        for q in write_query_ids:
            coef = lam * float(instance.latency_penalty) * float(model.frequencies[q])
            variables.append(MipVariable(f"psi_q{q}", BINARY, coef, upper=1.0))

    shell = MipModel(
        variables=tuple(variables),
        constraints=(),
        n_txns=n_txns,
        n_attrs=n_attrs,
        n_sites=n_sites,
        has_latency=with_latency,
        write_query_ids=write_query_ids,
    )

    constraints: List[MipConstraint] = []
    # Each transaction runs on exactly one site.
    for t in range(n_txns):
        terms = tuple((shell.x_index(t, s), 1.0) for s in range(n_sites))
        constraints.append(MipConstraint(f"assign_t{t}", terms, "=", 1.0))
    # Each attribute is stored somewhere (exactly one site when disjoint).
    cover_rel = "=" if forbid_replication else ">="
    for a in range(n_attrs):
        terms = tuple((shell.y_index(a, s), 1.0) for s in range(n_sites))
        constraints.append(MipConstraint(f"cover_a{a}", terms, cover_rel, 1.0))
    # Reads are served locally: a transaction's site holds what it reads.
    for a in range(n_attrs):
        for t in range(n_txns):
            reads = bool(model.txn_reads[a, t])
            for s in range(n_sites):
                if reads:
                    terms = ((shell.y_index(a, s), 1.0), (shell.x_index(t, s), -1.0))
                else:
                    terms = ((shell.y_index(a, s), 1.0),)
                constraints.append(MipConstraint(f"coloc_a{a}_t{t}_s{s}", terms, ">=", 0.0))
    # m dominates each site's local work.
    for s in range(n_sites):
        terms: List[Tuple[int, float]] = []
        for t in range(n_txns):
            for a in range(n_attrs):
                coef = float(model.coloc_load[a, t])
                if coef != 0.0:
                    terms.append((shell.u_index(t, a, s), coef))
        for a in range(n_attrs):
            coef = float(model.replica_load[a])
            if coef != 0.0:
                terms.append((shell.y_index(a, s), coef))
        terms.append((shell.m_index, -1.0))
        constraints.append(MipConstraint(f"load_s{s}", tuple(terms), "<=", 0.0))
    # u = x * y once x and y are binary.
    for t in range(n_txns):
        for a in range(n_attrs):
            for s in range(n_sites):
                u = shell.u_index(t, a, s)
                x = shell.x_index(t, s)
                y = shell.y_index(a, s)
                constraints.append(
                    MipConstraint(f"lin_x_t{t}_a{a}_s{s}", ((u, 1.0), (x, -1.0)), "<=", 0.0)
                )
                constraints.append(
                    MipConstraint(f"lin_y_t{t}_a{a}_s{s}", ((u, 1.0), (y, -1.0)), "<=", 0.0)
                )
                constraints.append(
                    MipConstraint(
                        f"lin_xy_t{t}_a{a}_s{s}",
                        ((u, 1.0), (x, -1.0), (y, -1.0)),
                        ">=",
                        -1.0,
                    )
                )
    # Optional: interchangeable sites are opened in order of the first
    # transaction assigned to them.
    if use_symmetry and n_sites > 1:
        for t in range(n_txns):
            for s in range(1, n_sites):
                terms = ((shell.x_index(t, s), 1.0),) + tuple(
                    (shell.x_index(tp, s - 1), -1.0) for tp in range(t)
                )
                constraints.append(MipConstraint(f"sym_t{t}_s{s}", terms, "<=", 0.0))
    # Optional: pinned replicas.
    for a, s in pins:
        constraints.append(
            MipConstraint(f"pin_a{a}_s{s}", ((shell.y_index(a, s), 1.0),), "=", 1.0)
        )
    # Optional: a write query's indicator turns on when any updated
    # attribute keeps a replica away from the transaction's site.
    if with_latency:
        big_m = float(n_attrs * n_sites)
        for pos, q in enumerate(write_query_ids):
            t = int(model.txn_of_query[q])
            touched = np.flatnonzero(model.attr_access[:, q])
            terms = [(shell.psi_index(pos), big_m)]
            for a in touched:
                a = int(a)
                for s in range(n_sites):
                    terms.append((shell.y_index(a, s), -1.0))
                    terms.append((shell.u_index(t, a, s), 1.0))
            constraints.append(MipConstraint(f"remote_q{q}", tuple(terms), ">=", 0.0))

    return replace(shell, constraints=tuple(constraints))


# ---------------------------------------------------------------------------
# Export


def _num(value: float) -> str:
    """Deterministic shortest-roundtrip literal for export files."""
    v = float(value)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    text = repr(v)
    return text


def export_model(model: MipModel, fmt: str) -> str:
    """Serialize ``model`` to free-MPS or LP text, byte-deterministically."""
    key = fmt.strip().lower()
    if key in {"mps", "free-mps", "free_mps"}:
        return _export_mps(model)
    if key in {"lp", "lp-text", "lp_text"}:
        return _export_lp(model)
    raise FormatError(f"unsupported export format: {fmt!r} (use 'free-mps' or 'lp-text')")


# Short-form alias.
export = export_model


def _export_mps(model: MipModel) -> str:
    rel_tag = {"<=": "L", ">=": "G", "=": "E"}
    lines = ["NAME vpadvisor", "OBJSENSE", "    MIN", "ROWS", " N obj"]
    for con in model.constraints:
        lines.append(f" {rel_tag[con.relation]} {con.name}")
    # Column-major entries; integer columns inside INTORG/INTEND markers.
    entries: List[List[Tuple[str, float]]] = [[] for _ in model.variables]
    for i, var in enumerate(model.variables):
        if var.objective != 0.0:
            entries[i].append(("obj", var.objective))
    for con in model.constraints:
        for idx, coef in con.terms:
            if coef != 0.0:
                entries[idx].append((con.name, coef))
    lines.append("COLUMNS")
    in_integer = False
    marker = 0
    for i, var in enumerate(model.variables):
        want_integer = var.kind == BINARY
        if want_integer and not in_integer:
            lines.append(f"    MARKER{marker} 'MARKER' 'INTORG'")
            marker += 1
            in_integer = True
        elif not want_integer and in_integer:
            lines.append(f"    MARKER{marker} 'MARKER' 'INTEND'")
            marker += 1
            in_integer = False
        for row, coef in entries[i]:
            lines.append(f"    {var.name} {row} {_num(coef)}")
    if in_integer:
        lines.append(f"    MARKER{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    for con in model.constraints:
        if con.rhs != 0.0:
            lines.append(f"    RHS {con.name} {_num(con.rhs)}")
    lines.append("BOUNDS")
    for var in model.variables:
        if var.upper is not None:
            lines.append(f" UP BND {var.name} {_num(var.upper)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _lp_terms(terms: Sequence[Tuple[str, float]]) -> List[str]:
    """Render ``coef * name`` pairs as LP-format token groups."""
    rendered: List[str] = []
    for pos, (name, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1.0 else f"{_num(mag)} {name}"
        if pos == 0:
            rendered.append(body if sign == "+" else f"- {body}")
        else:
            rendered.append(f"{sign} {body}")
    return rendered


def _wrap_expr(label: str, tokens: List[str], tail: str) -> List[str]:
    """Lay out one LP row, wrapping long expressions deterministically."""
    lines: List[str] = []
    current = f" {label}:"
    for tok in tokens:
        if len(current) + 1 + len(tok) > 200 and current.strip() != f"{label}:":
            lines.append(current)
            current = "   " + tok
        else:
            current = f"{current} {tok}"
    current = f"{current} {tail}" if tail else current
    lines.append(current)
    return lines


def _export_lp(model: MipModel) -> str:
    lines: List[str] = ["\\ vpadvisor linearized placement model", "Minimize"]
    obj_terms = [
        (var.name, var.objective) for var in model.variables if var.objective != 0.0
    ]
    if not obj_terms:
        obj_terms = [(model.variables[-1].name, 0.0)]
        tokens = [f"0 {obj_terms[0][0]}"]
    else:
        tokens = _lp_terms(obj_terms)
    lines.extend(_wrap_expr("obj", tokens, ""))
    lines.append("Subject To")
    rel_txt = {"<=": "<=", ">=": ">=", "=": "="}
    for con in model.constraints:
        named = [(model.variables[idx].name, coef) for idx, coef in con.terms if coef != 0.0]
        tokens = _lp_terms(named) if named else ["0 " + model.variables[0].name]
        tail = f"{rel_txt[con.relation]} {_num(con.rhs)}"
        lines.extend(_wrap_expr(con.name, tokens, tail))
    binaries = [var.name for var in model.variables if var.kind == BINARY]
    bounded = [
        var for var in model.variables if var.kind != BINARY and var.upper is not None
    ]
    if bounded:
        lines.append("Bounds")
        for var in bounded:
            lines.append(f" {var.name} <= {_num(var.upper)}")
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Built-in solver


@dataclass(frozen=True)
class ExactConfig:
    """Knobs for :func:`solve_exact`.

    Defaults: a 30-minute wall limit and a 0.1% relative gap.  The
    symmetry rows are used internally whenever no replicas are pinned
    (pins make sites distinguishable).  ``warm_start`` seeds the
    incumbent with a quick annealing run when the model is
    unconstrained.
    """

    time_limit: float = 1800.0
    gap: float = 1e-3
    use_symmetry: bool = True
    warm_start: bool = True
    forbid_replication: bool = False
    fixed_replicas: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")
        if self.gap < 0:
            raise ValueError("gap must be nonnegative")


def _model_arrays(mip: MipModel):
    """Split a MipModel into the arrays scipy's LP solver consumes."""
    n = mip.variable_count
    cost = np.zeros(n, dtype=np.float64)
    bounds: List[Tuple[float, Optional[float]]] = []
    for i, var in enumerate(mip.variables):
        cost[i] = var.objective
        bounds.append((0.0, var.upper))
    ub_rows: List[Tuple[Tuple[Tuple[int, float], ...], float]] = []
    eq_rows: List[Tuple[Tuple[Tuple[int, float], ...], float]] = []
    for con in mip.constraints:
        if con.relation == "<=":
            ub_rows.append((con.terms, con.rhs))
        elif con.relation == ">=":
            ub_rows.append((tuple((i, -c) for i, c in con.terms), -con.rhs))
        else:
            eq_rows.append((con.terms, con.rhs))

    def to_csr(rows):
        if not rows:
            return None, None
        data, ri, ci, rhs = [], [], [], []
        for r, (terms, b) in enumerate(rows):
            rhs.append(b)
            for idx, coef in terms:
                ri.append(r)
                ci.append(idx)
                data.append(coef)
        mat = sp.coo_matrix((data, (ri, ci)), shape=(len(rows), n)).tocsr()
        return mat, np.asarray(rhs, dtype=np.float64)

    a_ub, b_ub = to_csr(ub_rows)
    a_eq, b_eq = to_csr(eq_rows)
    return cost, bounds, a_ub, b_ub, a_eq, b_eq


def _pick_fractional(values: np.ndarray, start: int, length: int, tol: float) -> Optional[int]:
    """Most fractional variable in a block, ties to the lowest index."""
    block = values[start : start + length]
    frac = np.minimum(block - np.floor(block), np.ceil(block) - block)
    frac = np.minimum(frac, np.minimum(block, 1.0 - block))
    best = -1
    best_frac = tol
    for j in range(length):
        if frac[j] > best_frac:
            best_frac = frac[j]
            best = j
    return start + best if best >= 0 else None


def solve_exact(
    instance: Instance,
    config: Optional[ExactConfig] = None,
    model: Optional[CostModel] = None,
) -> SolveReport:
    """Branch-and-bound to a proven optimum of the weighted score.

    Transaction variables are branched before replica variables; the
    auxiliaries and the load bound are never branched (integrality of
    ``x`` and ``y`` pins them).  Every incumbent is re-priced by the
    definitional evaluator, so reported objectives and scores never
    drift from ``evaluate``.
    """
    started = time.perf_counter()
    if config is None:
        config = ExactConfig()
    if model is None:
        model = derive(instance)
    n_txns = instance.transaction_count
    n_attrs = instance.attribute_count
    n_sites = instance.site_count
    pins = tuple(sorted({(int(a), int(s)) for a, s in config.fixed_replicas}))
    symmetry = config.use_symmetry and not pins and n_sites > 1
    mip = build_mip(
        instance,
        model,
        use_symmetry=symmetry,
        forbid_replication=config.forbid_replication,
        fixed_replicas=pins,
    )
    cost, bounds0, a_ub, b_ub, a_eq, b_eq = _model_arrays(mip)
    nx = n_txns * n_sites
    ny = n_attrs * n_sites

    incumbent: Optional[Tuple[Partitioning, CostBreakdown]] = None

    def consider(txn_site: np.ndarray, replica: np.ndarray) -> None:
        nonlocal incumbent
        part = Partitioning(
            txn_site=np.ascontiguousarray(txn_site, dtype=np.int64),
            replica=np.ascontiguousarray(replica, dtype=np.bool_),
        )
        if config.forbid_replication and int(part.replica.sum(axis=1).max(initial=0)) > 1:
            return
        if any(not part.replica[a, s] for a, s in pins):
            return
        if check_feasible(instance, model, part):
            return
        breakdown = evaluate(instance, model, part)
        if incumbent is None or breakdown.score < incumbent[1].score:
            incumbent = (part, breakdown)

    # Cheap starting incumbents: one site carries everything (plus pins).
    for k in range(n_sites):
        replica = np.zeros((n_attrs, n_sites), dtype=np.bool_)
        replica[:, k] = True
        for a, s in pins:
            replica[a, s] = True
        consider(np.full(n_txns, k, dtype=np.int64), replica)
        if not pins:
            break  # all single-site layouts price identically without pins
    if config.warm_start and not pins and not config.forbid_replication:
        warm_cfg = SaConfig(inner_loops=30, freeze_stall_loops=6, seed=0)
        warm_report, _ = solve_sa(instance, warm_cfg, model=model)
        consider(warm_report.partitioning.txn_site, warm_report.partitioning.replica)

    integer_tol = 1e-6
    node_count = 0
    timed_out = False
    # Heap entries: (parent LP bound, insertion sequence, bound patches).
    heap: List[Tuple[float, int, Dict[int, Tuple[float, float]]]] = [(-math.inf, 0, {})]
    seq = 1

    def prune_margin(inc_score: float) -> float:
        return max(config.gap * abs(inc_score), 1e-6 * (1.0 + abs(inc_score)))

    while heap:
        if time.perf_counter() - started > config.time_limit:
            timed_out = True
            break
        parent_bound, _, patch = heapq.heappop(heap)
        inc_score = incumbent[1].score if incumbent is not None else math.inf
        if incumbent is not None and parent_bound >= inc_score - prune_margin(inc_score):
            # Best-first order: every remaining node is at least as bad.
            heap.clear()
            break
        node_bounds = list(bounds0)
        for idx, pair in patch.items():
            node_bounds[idx] = pair
        res = linprog(
            cost,
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=node_bounds,
            method="highs",
        )
        node_count += 1
        if res.status != 0:
            continue  # infeasible subtree
        bound = max(parent_bound, float(res.fun))
        if incumbent is not None and bound >= inc_score - prune_margin(inc_score):
            continue
        values = np.asarray(res.x, dtype=np.float64)
        branch = _pick_fractional(values, 0, nx, integer_tol)
        if branch is None:
            branch = _pick_fractional(values, nx, ny, integer_tol)
        if branch is None:
            # Integral leaf: read the layout off the LP point.
            xs = values[:nx].reshape(n_txns, n_sites)
            txn_site = np.argmax(xs, axis=1).astype(np.int64)
            replica = values[nx : nx + ny].reshape(n_attrs, n_sites) > 0.5
            consider(txn_site, replica)
            continue
        # Rounding heuristic: snap transactions, rebuild replicas greedily.
        if not config.forbid_replication:
            xs = values[:nx].reshape(n_txns, n_sites)
            txn_site = np.argmax(xs, axis=1).astype(np.int64)
            replica = solve_subproblem_fix_transactions(
                model, txn_site, n_sites, instance.cost_weight
            ).copy()
            for a, s in pins:
                replica[a, s] = True
            consider(txn_site, replica)
        value = values[branch]
        first, second = (1.0, 0.0) if value >= 0.5 else (0.0, 1.0)
        for choice in (first, second):
            child = dict(patch)
            child[branch] = (choice, choice)
            heapq.heappush(heap, (bound, seq, child))
            seq += 1

    wall = time.perf_counter() - started
    if incumbent is None:
        return SolveReport(
            partitioning=None,
            objective=math.nan,
            score=math.nan,
            bound_gap=math.inf,
            wall_time=wall,
            node_count=node_count,
            status=STATUS_NO_SOLUTION_TIME_LIMIT,
        )
    part, breakdown = incumbent
    if heap:
        best_bound = min(entry[0] for entry in heap)
    else:
        best_bound = breakdown.score
    if math.isinf(best_bound):
        gap = math.inf if timed_out else 0.0
    else:
        denom = max(abs(breakdown.score), 1e-12)
        gap = max(0.0, (breakdown.score - best_bound) / denom)
    status = STATUS_OPTIMAL if (not timed_out or gap <= config.gap) else STATUS_FEASIBLE_TIME_LIMIT
    if not timed_out:
        gap = min(gap, config.gap)
    return SolveReport(
        partitioning=part,
        objective=breakdown.objective,
        score=breakdown.score,
        bound_gap=gap,
        wall_time=wall,
        node_count=node_count,
        status=status,
    )


# ---------------------------------------------------------------------------
# Exhaustive oracle


@dataclass(frozen=True)
class BruteResult:
    """Outcome of exhaustive enumeration."""

    partitioning: Partitioning
    objective: float
    score: float
    combinations: int  # nominal layouts in the search space


def enumeration_size(instance: Instance, forbid_replication: bool = False) -> int:
    """Nominal layout count |S|^|T| * (2^|S|-1)^|A| (|S|^|A| if disjoint)."""
    s, t, a = instance.site_count, instance.transaction_count, instance.attribute_count
    per_attr = s if forbid_replication else (2**s - 1)
    return s**t * per_attr**a


def brute_force(
    instance: Instance,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    forbid_replication: bool = False,
    model: Optional[CostModel] = None,
) -> BruteResult:
    """Enumerate every layout and return the lexicographically first
    minimizer of the weighted score.

    Refuses instances whose nominal search space exceeds ``budget``.
    """
    size = enumeration_size(instance, forbid_replication)
    if size > budget:
        raise BudgetExceededError(
            f"enumeration would visit {size} layouts, over the budget of {budget}"
        )
    if model is None:
        model = derive(instance)
    if instance.latency_penalty is not None:
        write_ids = [q.id for q in instance.queries if q.is_write]
        write_attr = np.ascontiguousarray(model.attr_access[:, write_ids], dtype=np.bool_)
        write_txn = np.asarray([model.txn_of_query[q] for q in write_ids], dtype=np.int64)
        write_freq = np.asarray([model.frequencies[q] for q in write_ids], dtype=np.float64)
        found, _, best_x, best_mask = kernels.enumerate_layouts_latency_numpy(
            model.coloc_cost,
            model.replica_cost,
            model.coloc_load,
            model.replica_load,
            model.txn_reads,
            float(instance.cost_weight),
            instance.site_count,
            forbid_replication,
            write_attr,
            write_txn,
            write_freq,
            float(instance.latency_penalty),
        )
    else:
        found, _, best_x, best_mask = kernels.enumerate_layouts(
            model.coloc_cost,
            model.replica_cost,
            model.coloc_load,
            model.replica_load,
            model.txn_reads,
            float(instance.cost_weight),
            instance.site_count,
            forbid_replication,
        )
    if not found:
        raise BudgetExceededError("enumeration found no feasible layout")
    replica = np.zeros((instance.attribute_count, instance.site_count), dtype=np.bool_)
    for a in range(instance.attribute_count):
        mask = int(best_mask[a])
        for s in range(instance.site_count):
            replica[a, s] = bool(mask & (1 << s))
    part = Partitioning(
        txn_site=np.asarray(best_x, dtype=np.int64), replica=replica
    )
    breakdown = evaluate(instance, model, part)
    return BruteResult(
        partitioning=part,
        objective=breakdown.objective,
        score=breakdown.score,
        combinations=size,
    )


# ---------------------------------------------------------------------------
# Workload-prioritized staged solve


def solve_exact_staged(
    instance: Instance,
    config: Optional[ExactConfig] = None,
    top_fraction: float = 0.2,
) -> SolveReport:
    """Two-stage solve: optimize the heaviest transactions first, keep
    their replicas as pinned lower bounds, then solve the full workload.

    The heavy subset is the top ``top_fraction`` of transactions by
    total read weight (at least one).  The final report prices the full
    instance; optimality holds only relative to the pinned replicas.
    """
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must lie in (0, 1]")
    if config is None:
        config = ExactConfig()
    model = derive(instance)
    order = order_transactions_by_load(instance, model)
    keep = max(1, math.ceil(top_fraction * instance.transaction_count))
    heavy = [int(t) for t in order[:keep]]
    if len(heavy) == instance.transaction_count:
        return solve_exact(instance, config, model=model)
    stage_one = solve_exact(subset_transactions(instance, heavy), config)
    if stage_one.partitioning is None:
        return solve_exact(instance, config, model=model)
    pinned = tuple(
        (a, s)
        for a in range(instance.attribute_count)
        for s in range(instance.site_count)
        if stage_one.partitioning.replica[a, s]
    )
    merged = replace(config, fixed_replicas=tuple(sorted(set(config.fixed_replicas) | set(pinned))))
    return solve_exact(instance, merged, model=model)
