"""Instance validation and derived coefficient matrices."""
from __future__ import annotations

import numpy as np
import pytest

from vpadvisor import (
    Attribute,
    Instance,
    Query,
    Table,
    Transaction,
    derive,
    lint,
    subset_transactions,
    validate,
)

from conftest import oracle_flags, random_instance, t1_instance, t2_instance


def test_t1_shape_and_validation(t1):
    assert validate(t1) == []
    assert t1.attribute_count == 2
    assert t1.transaction_count == 1
    assert t1.query_count == 1
    assert t1.site_count == 2


def test_width_zero_rejected():
    inst = Instance(
        tables=(Table(0, "R", (0,)),),
        attributes=(Attribute(0, 0, "a", 0),),
        queries=(Query(0, "q", "read", 1.0, (0,), {0: 1}),),
        transactions=(Transaction(0, "t", (0,)),),
        site_count=1,
    )
    problems = validate(inst)
    assert len(problems) == 1
    assert "width" in problems[0]


def test_validation_catches_cross_reference_problems():
    # query touching an attribute whose table has no rows statistic
    inst = Instance(
        tables=(Table(0, "R", (0,)), Table(1, "S", (1,))),
        attributes=(Attribute(0, 0, "a", 4), Attribute(1, 1, "b", 4)),
        queries=(Query(0, "q", "read", 1.0, (0, 1), {0: 1}),),
        transactions=(Transaction(0, "t", (0,)),),
        site_count=2,
    )
    assert validate(inst)


def test_query_without_transaction_is_flagged():
    inst = Instance(
        tables=(Table(0, "R", (0,)),),
        attributes=(Attribute(0, 0, "a", 4),),
        queries=(
            Query(0, "q0", "read", 1.0, (0,), {0: 1}),
            Query(1, "q1", "read", 1.0, (0,), {0: 1}),
        ),
        transactions=(Transaction(0, "t", (0,)),),
        site_count=1,
    )
    assert validate(inst)


def test_t1_weights_and_flags(t1):
    model = derive(t1)
    alpha, beta, gamma, delta, weight = oracle_flags(t1)
    # W(a1,q1)=4*10*2=80, W(a2,q1)=8*10*2=160; a2 is table-covered, not accessed
    assert weight[0, 0] == 80.0
    assert weight[1, 0] == 160.0
    assert alpha[1, 0] == 0.0
    assert beta[1, 0] == 1.0
    np.testing.assert_allclose(model.access_weight, weight)


def test_t2_folded_coefficients(t2):
    model = derive(t2)
    # write with p=8: c1 = -p*W = -32, c2 = W*(1+p) = 36, c3 = 0, c4 = W = 4
    assert model.coloc_cost[0, 0] == pytest.approx(-32.0)
    assert model.replica_cost[0] == pytest.approx(36.0)
    assert model.coloc_load[0, 0] == pytest.approx(0.0)
    assert model.replica_load[0] == pytest.approx(4.0)


def test_t1_folded_coefficients(t1):
    model = derive(t1)
    # pure reads: c1 = c3 = W per (a, t); c2 = c4 = 0
    assert model.coloc_cost[0, 0] == pytest.approx(80.0)
    assert model.coloc_cost[1, 0] == pytest.approx(160.0)
    np.testing.assert_allclose(model.coloc_cost, model.coloc_load)
    np.testing.assert_allclose(model.replica_cost, 0.0)
    np.testing.assert_allclose(model.replica_load, 0.0)


@pytest.mark.parametrize("seed", range(8))
def test_folded_coefficients_match_definitional_sums(seed):
    inst = random_instance(seed)
    model = derive(inst)
    alpha, beta, gamma, delta, weight = oracle_flags(inst)
    p = inst.network_penalty
    n_a, n_t = inst.attribute_count, inst.transaction_count
    c1 = np.zeros((n_a, n_t))
    c3 = np.zeros((n_a, n_t))
    for a in range(n_a):
        for t in range(n_t):
            for q in range(inst.query_count):
                c1[a, t] += weight[a, q] * gamma[q, t] * (
                    beta[a, q] * (1 - delta[q]) - p * alpha[a, q] * delta[q]
                )
                c3[a, t] += weight[a, q] * gamma[q, t] * beta[a, q] * (1 - delta[q])
    c2 = (weight * delta * (beta + p * alpha)).sum(axis=1)
    c4 = (weight * delta * beta).sum(axis=1)
    np.testing.assert_allclose(model.coloc_cost, c1, atol=1e-9)
    np.testing.assert_allclose(model.replica_cost, c2, atol=1e-9)
    np.testing.assert_allclose(model.coloc_load, c3, atol=1e-9)
    np.testing.assert_allclose(model.replica_load, c4, atol=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_coefficient_identity_links_cost_and_load(seed):
    # c1(a,t) + p * sum_q W*gamma*alpha*delta == c3(a,t)
    inst = random_instance(seed)
    model = derive(inst)
    alpha, beta, gamma, delta, weight = oracle_flags(inst)
    correction = np.einsum("aq,qt,aq,q->at", weight, gamma, alpha, delta)
    np.testing.assert_allclose(
        model.coloc_cost + inst.network_penalty * correction,
        model.coloc_load,
        atol=1e-9,
    )


def test_reads_matrix_reflects_read_queries_only(t2):
    model = derive(t2)
    # t2's only query is a write: nothing forces co-location
    assert not model.txn_reads.any()
    model1 = derive(t1_instance())
    assert model1.txn_reads[0, 0]
    assert not model1.txn_reads[1, 0]


def test_subset_transactions_keeps_referenced_structure():
    inst = random_instance(3, site_count=2)
    keep = [0, inst.transaction_count - 1]
    sub = subset_transactions(inst, keep)
    assert validate(sub) == []
    assert sub.transaction_count == len(set(keep))
    assert sub.attribute_count == inst.attribute_count
    kept_names = {inst.transactions[t].name for t in keep}
    assert {txn.name for txn in sub.transactions} == kept_names


def test_lint_flags_blind_writes_without_failing_validation(t1, t2):
    # t2 writes table S without ever reading it: advisory only
    assert validate(t2) == []
    notes = lint(t2)
    assert any("never reads" in note for note in notes)
    # t1 is read-only and clean
    assert lint(t1) == []


def test_derive_rejects_invalid_instance():
    inst = Instance(
        tables=(Table(0, "R", (0,)),),
        attributes=(Attribute(0, 0, "a", 0),),
        queries=(Query(0, "q", "read", 1.0, (0,), {0: 1}),),
        transactions=(Transaction(0, "t", (0,)),),
        site_count=1,
    )
    with pytest.raises(Exception):
        derive(inst)
