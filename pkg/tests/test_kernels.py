"""Hot-kernel correctness and numba/numpy path agreement.

Every kernel has a compiled variant and a pure-numpy fallback (chosen at
import time by ``VPADVISOR_NO_NUMBA``).  These tests run both variants
explicitly and require identical answers; pricing is also checked
against the definitional oracle from conftest.
"""
from __future__ import annotations

import numpy as np
import pytest

from vpadvisor import Partitioning, derive, evaluate
from vpadvisor import kernels

from conftest import oracle_best, oracle_cost, random_instance, random_partitioning


def _paired(name):
    """Return (fast, fallback) implementations for a kernel name."""
    fallback = getattr(kernels, f"{name}_numpy")
    fast = getattr(kernels, name)
    return fast, fallback


def test_flag_reporting():
    # whichever path is active, the flag and the bound functions agree
    if kernels.USING_NUMBA:
        assert kernels.folded_cost is not kernels.folded_cost_numpy
    else:
        assert kernels.folded_cost is kernels.folded_cost_numpy


@pytest.mark.parametrize("seed", range(10))
def test_folded_cost_paths_agree_and_match_oracle(seed):
    inst = random_instance(seed, site_count=2 + seed % 2)
    model = derive(inst)
    rng = np.random.default_rng(seed)
    fast, fallback = _paired("folded_cost")
    for _ in range(5):
        part = random_partitioning(inst, rng)
        args = (
            model.coloc_cost,
            model.replica_cost,
            model.coloc_load,
            model.replica_load,
            part.txn_site,
            part.replica,
            inst.cost_weight,
        )
        obj_fast, load_fast = fast(*args)
        obj_np, load_np = fallback(*args)
        assert obj_fast == obj_np
        assert load_fast == load_np
        want = oracle_cost(inst, part)
        assert obj_fast == pytest.approx(want["objective"], abs=1e-9)
        assert load_fast == pytest.approx(want["max_load"], abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_greedy_replicas_paths_agree_and_are_feasible(seed):
    inst = random_instance(seed, site_count=3)
    model = derive(inst)
    rng = np.random.default_rng(seed + 99)
    fast, fallback = _paired("greedy_replicas")
    for _ in range(4):
        txn_site = rng.integers(0, inst.site_count, inst.transaction_count)
        args = (
            txn_site,
            model.txn_reads,
            model.coloc_cost,
            model.replica_cost,
            model.coloc_load,
            model.replica_load,
            inst.cost_weight,
            inst.site_count,
        )
        got_fast = fast(*args)
        got_np = fallback(*args)
        assert (got_fast == got_np).all()
        # feasibility: coverage and per-reader co-location
        assert got_fast.any(axis=1).all()
        for t in range(inst.transaction_count):
            readers = model.txn_reads[:, t]
            assert got_fast[readers, txn_site[t]].all()


@pytest.mark.parametrize("seed", range(10))
def test_assign_transactions_paths_agree(seed):
    inst = random_instance(seed, site_count=3)
    model = derive(inst)
    rng = np.random.default_rng(seed + 7)
    fast, fallback = _paired("assign_transactions")
    part = random_partitioning(inst, rng)
    order = np.arange(inst.transaction_count)
    args = (
        part.replica,
        model.txn_reads,
        model.coloc_cost,
        model.coloc_load,
        model.replica_load,
        inst.cost_weight,
        order,
    )
    assert (fast(*args) == fallback(*args)).all()


def test_assign_transactions_returns_minus_one_when_stuck():
    inst = random_instance(0, site_count=2)
    model = derive(inst)
    # a replica matrix with an all-empty row can cover no reader of it
    replicas = np.zeros((inst.attribute_count, inst.site_count), dtype=bool)
    order = np.arange(inst.transaction_count)
    out = kernels.assign_transactions(
        replicas,
        model.txn_reads,
        model.coloc_cost,
        model.coloc_load,
        model.replica_load,
        inst.cost_weight,
        order,
    )
    if model.txn_reads.any():
        assert (out == -1).any()


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("forbid", [False, True])
def test_enumerate_paths_agree_and_match_bruteforce_oracle(seed, forbid):
    inst = random_instance(seed, site_count=2)
    model = derive(inst)
    fast, fallback = _paired("enumerate_layouts")
    args = (
        model.coloc_cost,
        model.replica_cost,
        model.coloc_load,
        model.replica_load,
        model.txn_reads,
        inst.cost_weight,
        inst.site_count,
        forbid,
    )
    found_f, score_f, x_f, mask_f = fast(*args)
    found_n, score_n, x_n, mask_n = fallback(*args)
    assert found_f == found_n
    assert score_f == score_n
    assert (x_f == x_n).all()
    assert (mask_f == mask_n).all()
    # independent oracle search over the same space
    best_score, _, _ = oracle_best(inst, forbid_replication=forbid)
    assert score_f == pytest.approx(best_score, abs=1e-9)


def test_env_flag_selects_fallback_path():
    import os
    import subprocess
    import sys

    env = dict(os.environ, VPADVISOR_NO_NUMBA="1")
    code = (
        "from vpadvisor import kernels;"
        "assert not kernels.USING_NUMBA;"
        "assert kernels.folded_cost is kernels.folded_cost_numpy;"
        "assert kernels.enumerate_layouts is kernels.enumerate_layouts_numpy;"
        "print('fallback ok')"
    )
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert "fallback ok" in proc.stdout


def test_enumerate_reconstructed_layout_prices_to_reported_score():
    inst = random_instance(3, site_count=2)
    model = derive(inst)
    found, score, x, masks = kernels.enumerate_layouts(
        model.coloc_cost,
        model.replica_cost,
        model.coloc_load,
        model.replica_load,
        model.txn_reads,
        inst.cost_weight,
        inst.site_count,
        False,
    )
    assert found
    replica = np.zeros((inst.attribute_count, inst.site_count), dtype=bool)
    for a in range(inst.attribute_count):
        for s in range(inst.site_count):
            replica[a, s] = bool(masks[a] >> s & 1)
    part = Partitioning(txn_site=x.astype(np.int64), replica=replica)
    assert evaluate(inst, model, part).score == pytest.approx(score, abs=1e-9)
