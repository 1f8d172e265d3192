import math

import numpy as np
import pytest

from elbounds.bounds import exact_bound
from elbounds.circle import CircularDensity, circle_outside_prob
from elbounds.el import ELSolverError, chisq_radius
from elbounds.geometry import (
    BLOCK_SIZE,
    ShiftedGaussian,
    SignBernoulli,
    UniformSphere,
    VonMisesCircle,
)
from elbounds.simulation import (
    THREADS_ENV,
    CoverageProblem,
    MCReport,
    conjecture_scan,
    coverage_curve,
    default_workers,
    estimate_coverage,
    estimate_hull_prob,
    hull_indicators,
    load_experiment,
    reports_to_csv,
    simulate_log_ratios,
    verify_projection_invariance,
)


def within(rep, target, sigmas=3.0):
    return abs(rep.estimate - target) <= sigmas * max(rep.std_error, 1e-12)


def test_report_invariants_and_wilson():
    rep = MCReport.from_hits(0, 10, seed=1)
    z2 = 1.959963984540054**2
    assert rep.estimate == 0.0 and rep.std_error == 0.0
    assert rep.wilson_lo == 0.0
    assert rep.wilson_hi == pytest.approx(z2 / (10 + z2), rel=1e-12)
    for hits in (0, 1, 37, 99, 100):
        r = MCReport.from_hits(hits, 100, seed=0)
        assert 0 <= r.wilson_lo <= r.estimate <= r.wilson_hi <= 1


def test_report_validation():
    with pytest.raises(ValueError):
        MCReport.from_hits(5, 4, 0)
    with pytest.raises(ValueError):
        MCReport.from_hits(0, 0, 0)


def test_degenerate_sign_sampler_never_hits():
    rep = estimate_hull_prob(SignBernoulli(1.0), n=10, N=5000, seed=9)
    assert rep.hits == 0 and rep.estimate == 0.0


def test_uniform_circle_matches_bound():
    rep = estimate_hull_prob(UniformSphere(2), n=6, N=40_000, seed=1)
    assert within(rep, 0.8125)


def test_von_mises_below_symmetric_and_matches_quadrature():
    rep = estimate_hull_prob(VonMisesCircle(1.0), n=6, N=40_000, seed=2)
    target = 1 - circle_outside_prob(CircularDensity.von_mises(1.0), 6)
    assert within(rep, target)
    assert rep.estimate + 3 * rep.std_error < 0.8125


def test_k_plus_one_points():
    rep = estimate_hull_prob(UniformSphere(3), n=4, N=40_000, seed=3)
    assert within(rep, 0.125)


def test_reproducible_across_threads_and_prefix_stable():
    spec = UniformSphere(3)
    a = hull_indicators(spec, 6, 3 * BLOCK_SIZE + 17, seed=5, workers=1)
    b = hull_indicators(spec, 6, 3 * BLOCK_SIZE + 17, seed=5, workers=4)
    assert np.array_equal(a, b)
    c = hull_indicators(spec, 6, BLOCK_SIZE + 3, seed=5)
    assert np.array_equal(a[: BLOCK_SIZE + 3], c)
    assert not np.array_equal(a, hull_indicators(spec, 6, 3 * BLOCK_SIZE + 17, seed=6))


def test_threads_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(THREADS_ENV, "zero")
    assert default_workers() == 1
    monkeypatch.delenv(THREADS_ENV)
    assert default_workers() == 1


def test_replicates_must_be_positive():
    with pytest.raises(ValueError):
        estimate_hull_prob(UniformSphere(2), 5, 0, seed=0)


def test_coverage_problem_checks_theta():
    p = CoverageProblem(ShiftedGaussian((1.0, 2.0)), n=5)
    assert p.true_theta == (1.0, 2.0) and p.k == 2
    with pytest.raises(ValueError):
        CoverageProblem(ShiftedGaussian((1.0, 2.0)), n=5, true_theta=(0.0, 0.0))
    with pytest.raises(ValueError):
        CoverageProblem(ShiftedGaussian((1.0,)), n=5, true_theta=(1.0, 0.0))
    p = CoverageProblem(VonMisesCircle(2.0), n=8)
    assert np.allclose(p.true_theta, VonMisesCircle(2.0).mean())


def test_coverage_hull_limit_and_monotonicity():
    problem = CoverageProblem(ShiftedGaussian.centered(1), n=5)
    radii = [chisq_radius(1, 0.95), 5.0, 10.0, 20.0, 40.0, math.inf]
    reps = coverage_curve(problem, radii, N=20_000, seed=11)
    hits = [r.hits for r in reps]
    assert hits == sorted(hits)
    assert reps[0].hits < reps[-1].hits
    assert within(reps[-1], exact_bound(1, 5).value)
    lr = simulate_log_ratios(problem, 20_000, seed=11)
    assert reps[-1].hits == int(np.isfinite(lr).sum())
    single = estimate_coverage(problem, 10.0, N=20_000, seed=11)
    assert single == reps[2]


def test_coverage_rejects_nonpositive_radius():
    problem = CoverageProblem(ShiftedGaussian.centered(1), n=5)
    with pytest.raises(ValueError):
        coverage_curve(problem, [0.0], N=10, seed=0)


def test_solver_failure_propagates_with_replicate_index(monkeypatch):
    import elbounds.el as el

    real = el.solve_dual

    def flaky(M, *a, **kw):
        lam, iters, conv, resid = real(M, *a, **kw)
        conv = conv.copy()
        conv[-1] = False
        return lam, iters, conv, resid

    monkeypatch.setattr(el, "solve_dual", flaky)
    problem = CoverageProblem(ShiftedGaussian.centered(1), n=5)
    with pytest.raises(ELSolverError) as info:
        simulate_log_ratios(problem, BLOCK_SIZE + 10, seed=0, workers=1)
    assert info.value.index is not None and 0 <= info.value.index < BLOCK_SIZE + 10


@pytest.mark.parametrize(
    "spec, n",
    [(ShiftedGaussian((0.5, 0.0, 0.0)), 6), (UniformSphere(2), 4), (SignBernoulli(0.3), 8),
     (ShiftedGaussian((2.0, -1.0)), 5)],
)
def test_projection_invariance(spec, n):
    assert verify_projection_invariance(spec, n, N=10_000, seed=4) == 0


def test_conjecture_scan_rows():
    specs = [UniformSphere(3), ShiftedGaussian((1.0, 0.0, 0.0))]
    rows = conjecture_scan(3, 8, specs, N=20_000, seed=8)
    assert all(r.conjecture_dependent for r in rows)
    assert all(r.within_bound for r in rows)
    assert rows[0].bound == exact_bound(3, 8).value == 0.7734375
    assert abs(rows[0].gap) <= 3 * rows[0].report.std_error
    assert rows[1].gap > 3 * rows[1].report.std_error
    assert rows[1].to_dict()["sampler"] == {"kind": "ShiftedGaussian", "shift": [1.0, 0.0, 0.0]}


def test_conjecture_scan_small_n():
    specs = [UniformSphere(3), ShiftedGaussian((0.3, 0.0, 0.0)), ShiftedGaussian((0.0, 0.0, 0.0))]
    for row in conjecture_scan(3, 4, specs, N=20_000, seed=1):
        assert row.report.estimate <= 0.125 + 3 * row.report.std_error


def test_conjecture_scan_k2_not_flagged():
    rows = conjecture_scan(2, 5, [UniformSphere(2)], N=2000, seed=0)
    assert not rows[0].conjecture_dependent


def test_conjecture_scan_validation():
    with pytest.raises(ValueError):
        conjecture_scan(3, 3, [UniformSphere(3)], N=10, seed=0)
    with pytest.raises(ValueError):
        conjecture_scan(3, 8, [UniformSphere(2)], N=10, seed=0)


def test_load_experiment_text_and_file(tmp_path):
    text = """
    sampler = ShiftedGaussian
    shift = 0.5, 0, 0   # first axis only
    n = 6
    replicates = 1000
    seed = 42
    radii = 3.84, 10, inf
    """
    cfg = load_experiment("\n".join(line.strip() for line in text.splitlines()))
    assert cfg["sampler"] == ShiftedGaussian((0.5, 0.0, 0.0))
    assert (cfg["n"], cfg["replicates"], cfg["seed"]) == (6, 1000, 42)
    assert cfg["radii"][:2] == [3.84, 10.0] and math.isinf(cfg["radii"][2])
    path = tmp_path / "exp.cfg"
    path.write_text("sampler = UniformSphere\nk = 3\nn = 8\n")
    cfg = load_experiment(path)
    assert cfg["sampler"] == UniformSphere(3) and cfg["replicates"] == 200_000


def test_load_experiment_errors():
    with pytest.raises(ValueError):
        load_experiment("n = 5\n")
    with pytest.raises(ValueError):
        load_experiment("sampler = UniformSphere\nk = 2\n")


def test_reports_to_csv():
    reps = [MCReport.from_hits(3, 4, 0), MCReport.from_hits(1, 4, 0)]
    text = reports_to_csv(reps, [{"radius": 1.0}, {"radius": "inf"}])
    lines = text.splitlines()
    assert lines[0] == "radius,replicates,hits,estimate,std_error,wilson_lo,wilson_hi,seed"
    assert lines[1].startswith("1.0,4,3,0.75,")
    assert lines[2].startswith("inf,4,1,0.25,")
    assert text.endswith("\n")


def test_docstring_examples():
    import doctest

    import elbounds.simulation as simulation

    assert doctest.testmod(simulation).failed == 0
