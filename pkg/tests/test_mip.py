"""Integer-program construction, export, exact solver, enumeration."""
from __future__ import annotations

import math

import numpy as np
import pytest

from vpadvisor import (
    BudgetExceededError,
    ExactConfig,
    Partitioning,
    brute_force,
    build_mip,
    check_feasible,
    derive,
    enumeration_size,
    evaluate,
    export_model,
    solve_exact,
    solve_exact_staged,
)
from vpadvisor.errors import FormatError
from vpadvisor.report import (
    STATUS_NO_SOLUTION_TIME_LIMIT,
    STATUS_OPTIMAL,
)

from conftest import (
    check_point,
    lifted_point,
    random_instance,
    random_partitioning,
    set_load_and_latency,
    t1_instance,
    t2_instance,
)


# ---------------------------------------------------------------------------
# model construction


def test_t1_model_shape(t1):
    model = build_mip(t1)
    # x: 2, y: 4, u: 4, m: 1
    assert model.variable_count == 11
    # assign 1, cover 2, coloc 4, load 2, linearization 12
    assert model.constraint_count == 21


def test_variable_count_formula_holds_generally():
    inst = random_instance(1, site_count=3)
    model = build_mip(inst)
    T, A, S = inst.transaction_count, inst.attribute_count, inst.site_count
    assert model.variable_count == T * S + A * S + T * A * S + 1
    assert model.constraint_count == T + A + A * T * S + S + 3 * T * A * S


def test_u_variables_are_continuous(t1):
    model = build_mip(t1)
    kinds = {v.name.split("_")[0]: v.kind for v in model.variables}
    assert kinds["x"] == "binary"
    assert kinds["y"] == "binary"
    assert kinds["u"] == "continuous-nonnegative"
    assert kinds["m"] == "continuous-nonnegative"


@pytest.mark.parametrize("seed", range(10))
def test_lifted_layouts_satisfy_every_constraint(seed):
    inst = random_instance(seed, site_count=2 + seed % 2)
    model = derive(inst)
    mip = build_mip(inst)
    rng = np.random.default_rng(seed * 3 + 1)
    for _ in range(10):
        part = random_partitioning(inst, rng)
        values = lifted_point(mip, part.txn_site, part.replica)
        breakdown = evaluate(inst, model, part)
        values = set_load_and_latency(mip, inst, values, breakdown)
        assert check_point(mip, values) == []
        # the linear objective at the lifted point reproduces the score
        obj = sum(values[i] * v.objective for i, v in enumerate(mip.variables))
        assert obj == pytest.approx(breakdown.score, rel=1e-9, abs=1e-9)


def test_infeasible_layout_violates_some_constraint(t1):
    mip = build_mip(t1)
    # reader on site 1, its attribute only on site 0
    values = lifted_point(mip, np.array([1]), np.array([[True, False], [False, True]]))
    values[mip.m_index] = 1e9  # generous load bound; the violation is structural
    assert check_point(mip, values)


# ---------------------------------------------------------------------------
# export


def test_mps_export_is_deterministic_and_structured(t1):
    mip = build_mip(t1)
    text1 = export_model(mip, "free-mps")
    text2 = export_model(mip, "free-mps")
    assert text1 == text2
    lines = text1.splitlines()
    assert lines[0].startswith("NAME")
    assert "ROWS" in lines
    assert "COLUMNS" in lines
    assert "RHS" in lines
    assert lines[-1] == "ENDATA"
    assert text1.endswith("\n")
    # one row entry per constraint plus the objective row
    rows_at = lines.index("ROWS")
    cols_at = lines.index("COLUMNS")
    assert cols_at - rows_at - 1 == mip.constraint_count + 1


def test_lp_export_names_variables_by_role(t1):
    text = export_model(build_mip(t1), "lp-text")
    assert "Minimize" in text
    assert "Subject To" in text
    assert "Binary" in text
    assert "x_0_0" in text and "y_1_1" in text and "u_0_1_0" in text
    assert text.rstrip().endswith("End")


def test_export_rejects_unknown_format(t1):
    with pytest.raises(FormatError):
        export_model(build_mip(t1), "qps")


def test_exported_mps_matches_lp_variable_sets(t1):
    mip = build_mip(t1)
    mps = export_model(mip, "free-mps")
    lp = export_model(mip, "lp-text")
    names = {v.name for v in mip.variables}
    for name in names:
        assert name in mps
        assert name in lp


# ---------------------------------------------------------------------------
# independent integer solver on the exported matrices


def _milp_solve(mip):
    from scipy.optimize import LinearConstraint, milp

    n = mip.variable_count
    cost = np.array([v.objective for v in mip.variables])
    integrality = np.array(
        [1 if v.kind == "binary" else 0 for v in mip.variables]
    )
    lb = np.zeros(n)
    ub = np.array(
        [
            1.0 if v.kind == "binary" else (v.upper if v.upper is not None else np.inf)
            for v in mip.variables
        ]
    )
    constraints = []
    for con in mip.constraints:
        row = np.zeros(n)
        for i, c in con.terms:
            row[i] += c
        if con.relation == "<=":
            constraints.append(LinearConstraint(row, -np.inf, con.rhs))
        elif con.relation == ">=":
            constraints.append(LinearConstraint(row, con.rhs, np.inf))
        else:
            constraints.append(LinearConstraint(row, con.rhs, con.rhs))
    from scipy.optimize import Bounds

    res = milp(
        c=cost,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
    )
    assert res.success, res.message
    return res.fun


@pytest.mark.parametrize("seed", range(5))
def test_model_optimum_agrees_with_reference_integer_solver(seed):
    inst = random_instance(seed, site_count=2)
    mip = build_mip(inst)
    reference = _milp_solve(mip)
    ours = solve_exact(inst, ExactConfig(gap=0.0))
    assert ours.score == pytest.approx(reference, rel=1e-7, abs=1e-7)


def test_latency_model_agrees_with_reference_integer_solver():
    inst = random_instance(2, site_count=2, latency_penalty=7.0, update_percent=60.0)
    mip = build_mip(inst)
    reference = _milp_solve(mip)
    ours = solve_exact(inst, ExactConfig(gap=0.0))
    assert ours.score == pytest.approx(reference, rel=1e-7, abs=1e-7)


# ---------------------------------------------------------------------------
# exact solver behavior


def test_exact_t1_is_optimal(t1):
    report = solve_exact(t1, ExactConfig(gap=0.0))
    assert report.status == STATUS_OPTIMAL
    assert report.score == pytest.approx(80.0)
    assert report.bound_gap == 0.0


def test_exact_matches_brute_on_t2(t2):
    report = solve_exact(t2, ExactConfig(gap=0.0))
    result = brute_force(t2)
    assert report.score == result.score


def test_exact_respects_forbid_replication():
    inst = random_instance(4, site_count=2)
    free = solve_exact(inst, ExactConfig(gap=0.0))
    fixed = solve_exact(inst, ExactConfig(gap=0.0, forbid_replication=True))
    assert (fixed.partitioning.replica.sum(axis=1) == 1).all()
    assert free.score <= fixed.score + 1e-9
    reference = brute_force(inst, forbid_replication=True)
    assert fixed.score == pytest.approx(reference.score, abs=1e-9)


def test_exact_respects_pins():
    inst = random_instance(6, site_count=2)
    pin = ((0, 1), (1, 0))
    report = solve_exact(inst, ExactConfig(gap=0.0, fixed_replicas=pin))
    for a, s in pin:
        assert report.partitioning.replica[a, s]
    free = solve_exact(inst, ExactConfig(gap=0.0))
    assert free.score <= report.score + 1e-9


def test_exact_timeout_with_warm_start_still_returns_solution():
    inst = random_instance(3, site_count=2)
    report = solve_exact(inst, ExactConfig(time_limit=0.0))
    assert report.partitioning is not None
    assert report.status == "feasible-time-limit"
    assert report.score < math.inf
    model = derive(inst)
    assert check_feasible(inst, model, report.partitioning) == []


def test_exact_timeout_without_any_incumbent_reports_no_solution():
    # pins on two different sites + disjoint layouts defeat the trivial
    # single-site incumbents; zero time leaves nothing else
    inst = t1_instance()
    cfg = ExactConfig(
        time_limit=0.0,
        warm_start=False,
        forbid_replication=True,
        fixed_replicas=((0, 0), (1, 1)),
    )
    report = solve_exact(inst, cfg)
    assert report.status == STATUS_NO_SOLUTION_TIME_LIMIT
    assert report.partitioning is None
    assert math.isnan(report.score)


def test_gap_zero_requires_proof_of_optimality():
    inst = random_instance(9, site_count=2)
    report = solve_exact(inst, ExactConfig(gap=0.0))
    assert report.status == STATUS_OPTIMAL
    assert report.bound_gap == 0.0


# ---------------------------------------------------------------------------
# enumeration


def test_enumeration_size_formulas(t1):
    assert enumeration_size(t1, False) == 2 * 3 * 3  # S^T * (2^S-1)^A
    assert enumeration_size(t1, True) == 2 * 2 * 2  # S^(T+A)


def test_budget_refusal():
    inst = random_instance(0, site_count=3, transaction_count=6, table_count=4)
    with pytest.raises(BudgetExceededError):
        brute_force(inst, budget=10)


def test_brute_force_result_is_feasible_and_consistent():
    inst = random_instance(5, site_count=2)
    model = derive(inst)
    result = brute_force(inst)
    assert check_feasible(inst, model, result.partitioning) == []
    priced = evaluate(inst, model, result.partitioning)
    assert priced.score == result.score
    assert priced.objective == result.objective
    assert result.combinations == enumeration_size(inst, False)


def test_brute_force_with_latency_dispatches_and_agrees_with_exact():
    inst = random_instance(1, site_count=2, latency_penalty=3.0, update_percent=50.0)
    result = brute_force(inst)
    report = solve_exact(inst, ExactConfig(gap=0.0))
    assert report.score == pytest.approx(result.score, abs=1e-9)


# ---------------------------------------------------------------------------
# staged solving


def test_staged_solve_is_feasible_and_near_exact():
    inst = random_instance(12, site_count=2, transaction_count=5)
    model = derive(inst)
    staged = solve_exact_staged(inst, ExactConfig(gap=0.0), top_fraction=0.4)
    assert check_feasible(inst, model, staged.partitioning) == []
    full = solve_exact(inst, ExactConfig(gap=0.0))
    # staging is a heuristic: never better than optimal, usually equal
    assert staged.score >= full.score - 1e-9


def test_staged_solve_with_all_transactions_equals_plain_exact():
    inst = random_instance(2, site_count=2)
    staged = solve_exact_staged(inst, ExactConfig(gap=0.0), top_fraction=1.0)
    full = solve_exact(inst, ExactConfig(gap=0.0))
    assert staged.score == pytest.approx(full.score, abs=1e-9)
