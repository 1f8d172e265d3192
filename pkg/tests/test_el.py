import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from elbounds.el import (
    ELSolverError,
    ELStatus,
    RegionSpec,
    chisq_radius,
    el_logratio,
    in_region,
    log_ratios,
    mean_estimating_function,
    solve_dual,
)

from oracles import chisq_quantile_mp, el_primal_bruteforce

LOG_27_32 = -2 * math.log(27 / 32)


def _check_invariants(ev, M):
    M = np.asarray(M, dtype=float).reshape(len(M), -1)
    n = M.shape[0]
    w = ev.weights
    assert np.all(w > 0)
    assert abs(w.sum() - 1) <= 1e-10
    assert np.linalg.norm(w @ M) <= 1e-8
    assert ev.log_ratio >= 0
    assert abs(ev.log_ratio + 2 * np.sum(np.log(n * w))) <= 1e-8


def test_balanced_values_give_zero():
    ev = el_logratio([-1.0, 0.5, 0.5])
    assert ev.status is ELStatus.INTERIOR
    assert np.allclose(ev.weights, 1 / 3, atol=1e-12)
    assert ev.log_ratio == pytest.approx(0.0, abs=1e-14)
    assert ev.iterations == 0


def test_positive_values_outside_hull():
    ev = el_logratio([1.0, 2.0, 3.0])
    assert ev.status is ELStatus.OUTSIDE_HULL
    assert ev.log_ratio == math.inf
    assert ev.to_dict()["log_ratio"] == "inf"


def test_three_point_closed_form():
    M = [-1.0, 1.0, 1.0]
    ev = el_logratio(M)
    assert ev.log_ratio == pytest.approx(LOG_27_32, abs=1e-9)
    assert np.allclose(ev.weights, [0.5, 0.25, 0.25], atol=1e-10)
    _check_invariants(ev, M)
    assert el_primal_bruteforce(M) == pytest.approx(LOG_27_32, abs=1e-6)


def test_symmetric_cross():
    M = [[2.0, 0.0], [-2.0, 0.0], [0.0, 0.5], [0.0, -0.5]]
    ev = el_logratio(M)
    assert np.allclose(ev.weights, 0.25, atol=1e-12)
    assert ev.log_ratio == pytest.approx(0.0, abs=1e-14)


def test_boundary_is_outside():
    ev = el_logratio([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
    assert ev.status is ELStatus.OUTSIDE_HULL


def test_dual_matches_primal_oracle_on_random_instances():
    rng = np.random.default_rng(20040)
    checked = 0
    while checked < 200:
        k = int(rng.integers(1, 3))
        n = int(rng.integers(k + 2, 7))
        M = rng.normal(size=(n, k)) + 0.5 * rng.normal(size=k)
        ev = el_logratio(M)
        if not ev.is_interior:
            continue
        ref = el_primal_bruteforce(M)
        assert ref is not None
        assert abs(ev.log_ratio - ref) <= 1e-6, (M, ev.log_ratio, ref)
        _check_invariants(ev, M)
        checked += 1


def test_batched_matches_single():
    rng = np.random.default_rng(4)
    M = rng.normal(size=(300, 8, 2)) + [0.4, 0.0]
    lr = log_ratios(M)
    single = np.array([el_logratio(m).log_ratio for m in M])
    finite = np.isfinite(single)
    assert np.array_equal(np.isfinite(lr), finite)
    assert np.allclose(lr[finite], single[finite], rtol=0, atol=1e-10)


def test_solve_dual_badly_scaled():
    rng = np.random.default_rng(8)
    M = rng.normal(size=(1, 40, 3)) * [1e-6, 1.0, 1e5]
    M = M - M.mean(axis=1, keepdims=True) + [1e-7, 0.1, 2e4]
    lam, iters, conv, _ = solve_dual(M)
    assert conv[0] and iters[0] < 100


def test_solver_error_carries_residual_and_index(monkeypatch):
    import elbounds.el as el

    def stuck(M, *a, **kw):
        B, _, k = M.shape
        return np.zeros((B, k)), np.full(B, 100), np.zeros(B, bool), np.full(B, 0.5)

    monkeypatch.setattr(el, "solve_dual", stuck)
    with pytest.raises(ELSolverError) as info:
        el.el_logratio([-1.0, 1.0, 1.0])
    assert info.value.residual == 0.5
    M = np.array([[[-1.0], [1.0], [1.0]], [[1.0], [2.0], [3.0]], [[-1.0], [1.0], [1.0]]])
    with pytest.raises(ELSolverError) as info:
        el.log_ratios(M[1:], offset=4096)
    assert info.value.index == 4097


def test_in_region_examples():
    M = [-1.0, 1.0, 1.0]
    assert not in_region(M, RegionSpec(0.3))
    assert in_region(M, RegionSpec(0.4))
    assert in_region([-1.0, 0.5, 0.5], RegionSpec(1e-9))
    assert not in_region([1.0, 2.0], RegionSpec(1e6))


def test_region_strict_inequality():
    ev = el_logratio([-1.0, 1.0, 1.0])
    assert not in_region([-1.0, 1.0, 1.0], RegionSpec(ev.log_ratio))


@pytest.mark.parametrize("r", [0.0, -1.0, math.inf, math.nan])
def test_region_radius_validation(r):
    with pytest.raises(ValueError):
        RegionSpec(r)


def test_region_from_level():
    spec = RegionSpec.from_level(2, 0.9)
    assert spec.level == 0.9 and spec.radius == pytest.approx(-2 * math.log(0.1), abs=1e-10)


@pytest.mark.parametrize("k, level", [(1, 0.95), (2, 0.9), (3, 0.99), (5, 0.5), (10, 0.999), (1, 1e-6)])
def test_chisq_radius_against_mp_oracle(k, level):
    assert chisq_radius(k, level) == pytest.approx(chisq_quantile_mp(k, level), abs=1e-10)


def test_chisq_radius_examples():
    assert round(chisq_radius(1, 0.95), 4) == 3.8415
    assert round(chisq_radius(2, 0.90), 4) == 4.6052
    assert chisq_radius(3, 1e-12) < 1e-6


@pytest.mark.parametrize("level", [0.0, 1.0, 2.0])
def test_chisq_radius_domain(level):
    with pytest.raises(ValueError):
        chisq_radius(1, level)


def test_mean_estimating_function():
    y = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert mean_estimating_function(y, [1.0, 1.0]).tolist() == [[0.0, 1.0], [2.0, 3.0]]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=12),
       st.floats(-10, 10, allow_nan=False))
def test_k1_logratio_properties(values, shift):
    M = np.array(values) - shift
    mags = np.abs(M[M != 0])
    assume(mags.size == 0 or mags.min() >= 1e-20 * mags.max())
    ev = el_logratio(M)
    if not ev.is_interior:
        assert ev.log_ratio == math.inf
        return
    _check_invariants(ev, M)
    # rescaling the estimating function does not change l
    assert el_logratio(3.0 * M).log_ratio == pytest.approx(ev.log_ratio, rel=1e-8, abs=1e-9)


def test_extreme_dynamic_range_reports_solver_error():
    # the optimal multiplier is ~1e166; damped Newton from zero needs ~550 steps
    with pytest.raises(ELSolverError) as info:
        el_logratio([-1.5e-167, 1.0])
    assert info.value.residual >= 0


def test_wide_dynamic_range_converges():
    ev = el_logratio([1e-14, -1.0])
    # w = (1, 1e-14) / (1 + 1e-14)
    expected = -2 * (math.log(2 / (1 + 1e-14)) + math.log(2e-14 / (1 + 1e-14)))
    assert ev.log_ratio == pytest.approx(expected, rel=1e-12)
