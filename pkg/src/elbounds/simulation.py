"""
Monte Carlo estimates of hull-containment and EL coverage probabilities.

Replicate i is drawn from the Philox stream keyed by (seed, i // BLOCK_SIZE),
so a run is reproducible bit-for-bit from (configuration, seed) whatever
the number of worker threads: workers take whole blocks and hit counts are
summed in block order.
"""
import configparser
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from . import geometry
from .bounds import exact_bound
from .el import log_ratios, mean_estimating_function
from .geometry import BLOCK_SIZE, DEFAULT_TOL

__all__ = [
    "MCReport",
    "CoverageProblem",
    "ScanRow",
    "hull_indicators",
    "estimate_hull_prob",
    "simulate_log_ratios",
    "estimate_coverage",
    "coverage_curve",
    "verify_projection_invariance",
    "conjecture_scan",
    "load_experiment",
    "reports_to_csv",
    "default_workers",
    "THREADS_ENV",
]

THREADS_ENV = "ELBOUNDS_THREADS"
_Z95 = NormalDist().inv_cdf(0.975)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class MCReport:
    replicates: int
    hits: int
    estimate: float
    std_error: float
    wilson_lo: float
    wilson_hi: float
    seed: int

    @classmethod
    def from_hits(cls, hits: int, replicates: int, seed: int) -> "MCReport":
        if replicates < 1 or not 0 <= hits <= replicates:
            raise ValueError("need 0 <= hits <= replicates, replicates >= 1")
        p = hits / replicates
        se = math.sqrt(p * (1.0 - p) / replicates)
        z2 = _Z95 * _Z95
        centre = (p + z2 / (2 * replicates)) / (1 + z2 / replicates)
        half = _Z95 * math.sqrt(p * (1 - p) / replicates + z2 / (4 * replicates**2)) / (1 + z2 / replicates)
        lo = min(max(0.0, centre - half), p)
        hi = max(min(1.0, centre + half), p)
        return cls(replicates, int(hits), p, se, lo, hi, int(seed))

    def to_dict(self) -> dict:
        return asdict(self)


def _run_blocks(fn, N, workers):
    """Evaluate ``fn(block, count)`` over the blocks covering N replicates."""
    if N < 1:
        raise ValueError("number of replicates must be >= 1")
    nblocks = -(-N // BLOCK_SIZE)
    counts = [min(BLOCK_SIZE, N - b * BLOCK_SIZE) for b in range(nblocks)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or nblocks == 1:
        parts = [fn(b, c) for b, c in enumerate(counts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, range(nblocks), counts))
    return np.concatenate(parts)


def _draw(spec, n, seed, block, count):
    # always draw the full block so replicate i is independent of N
    return geometry.sample_block(spec, n, seed, block)[:count]


def hull_indicators(spec, n: int, N: int, seed: int, tol=DEFAULT_TOL, workers=None) -> np.ndarray:
    """Boolean array over replicates: origin interior to the sample's hull."""
    return _run_blocks(
        lambda b, c: geometry.interior_mask(_draw(spec, n, seed, b, c), tol), N, workers
    )


def estimate_hull_prob(spec, n: int, N: int, seed: int, tol=DEFAULT_TOL, workers=None) -> MCReport:
    """
    Estimate P(0 in H(X_1..X_n)) for i.i.d. draws from ``spec``.

    Examples
    --------
    >>> from elbounds.geometry import SignBernoulli
    >>> estimate_hull_prob(SignBernoulli(1.0), n=10, N=500, seed=3).hits
    0
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    hits = int(hull_indicators(spec, n, N, seed, tol, workers).sum())
    return MCReport.from_hits(hits, N, seed)


@dataclass(frozen=True)
class CoverageProblem:
    """
    EL inference for the mean: data from ``sampler``, estimating function
    m(Y, theta) = Y - theta evaluated at the true mean.
    """

    sampler: object
    n: int
    true_theta: tuple = None
    functional: object = field(default=mean_estimating_function, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        mean = np.asarray(self.sampler.mean(), dtype=float)
        if self.true_theta is None:
            object.__setattr__(self, "true_theta", tuple(mean.tolist()))
        theta = np.asarray(self.true_theta, dtype=float)
        if theta.shape != mean.shape:
            raise ValueError(f"theta has dimension {theta.size}, sampler has {mean.size}")
        if self.functional is mean_estimating_function and not np.allclose(theta, mean, atol=1e-12):
            raise ValueError(f"true_theta {theta} is not the sampler mean {mean}")

    @property
    def k(self):
        return len(self.true_theta)


def simulate_log_ratios(problem: CoverageProblem, N: int, seed: int, tol=DEFAULT_TOL, workers=None):
    """
    l(theta_0) for each of N simulated datasets (inf where theta_0 is
    outside the hull).  Solver failures propagate with the replicate index.
    """
    theta = np.asarray(problem.true_theta, dtype=float)

    def block(b, c):
        Y = _draw(problem.sampler, problem.n, seed, b, c)
        return log_ratios(problem.functional(Y, theta), tol, offset=b * BLOCK_SIZE)

    return _run_blocks(block, N, workers)


def coverage_curve(problem: CoverageProblem, radii, N: int, seed: int, tol=DEFAULT_TOL, workers=None):
    """
    Coverage reports for several radii on one shared set of replicates.

    A radius of ``math.inf`` stands for the r -> infinity limit, i.e. the
    hull event itself.
    """
    radii = list(radii)
    for r in radii:
        if not r > 0:
            raise ValueError("radii must be positive")
    lr = simulate_log_ratios(problem, N, seed, tol, workers)
    reports = []
    for r in radii:
        hits = np.isfinite(lr).sum() if math.isinf(r) else (lr < r).sum()
        reports.append(MCReport.from_hits(int(hits), N, seed))
    return reports


def estimate_coverage(problem: CoverageProblem, radius: float, N: int, seed: int,
                      tol=DEFAULT_TOL, workers=None) -> MCReport:
    """Estimate P(theta_0 in C_r); ``radius=math.inf`` gives the hull probability."""
    return coverage_curve(problem, [radius], N, seed, tol, workers)[0]


def verify_projection_invariance(spec, n: int, N: int, seed: int, tol=DEFAULT_TOL, workers=None) -> int:
    """Number of replicates whose hull verdict changes under projection to the sphere."""

    def block(b, c):
        X = _draw(spec, n, seed, b, c)
        before = geometry.interior_mask(X, tol)
        after = geometry.interior_mask(geometry.project_to_sphere(X), tol)
        return before != after

    return int(_run_blocks(block, N, workers).sum())


@dataclass(frozen=True)
class ScanRow:
    sampler: object
    report: MCReport
    bound: float
    gap: float
    conjecture_dependent: bool

    @property
    def within_bound(self) -> bool:
        """No evidence against the conjecture: estimate <= bound + 3 SE."""
        return self.gap >= -3.0 * self.report.std_error

    def to_dict(self) -> dict:
        return {
            "sampler": self.sampler.to_dict(),
            "report": self.report.to_dict(),
            "bound": self.bound,
            "gap": self.gap,
            "within_bound": self.within_bound,
            "conjecture_dependent": self.conjecture_dependent,
        }


def conjecture_scan(k: int, n: int, specs, N: int, seed: int, tol=DEFAULT_TOL, workers=None):
    """
    Compare MC hull probabilities for several laws in R^k against b(k, n).

    For k >= 3 the claim that b(k, n) bounds every law is conjectural; rows
    are flagged ``conjecture_dependent`` accordingly.
    """
    if n <= k:
        raise ValueError("need n > k")
    bound = exact_bound(k, n).value
    rows = []
    for spec in specs:
        if spec.k != k:
            raise ValueError(f"sampler {spec} has dimension {spec.k}, expected {k}")
        rep = estimate_hull_prob(spec, n, N, seed, tol, workers)
        rows.append(ScanRow(spec, rep, bound, bound - rep.estimate, k >= 3))
    return rows


def _floats(text):
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def load_experiment(path_or_text) -> dict:
    """
    Parse a ``key = value`` experiment file.

    Recognised keys: ``sampler`` (kind), sampler parameters (``k``, ``p``,
    ``kappa``, ``mu``, ``a``, ``shift``), ``n``, ``replicates``, ``seed``,
    ``radii`` and ``theta``.  Lists are comma separated; ``inf`` is allowed
    in ``radii``.  Returns a dict with a constructed ``sampler``.
    """
    if os.path.exists(str(path_or_text)):
        with open(path_or_text) as fh:
            text = fh.read()
    else:
        text = str(path_or_text)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_file(io.StringIO("[experiment]\n" + text))
    raw = dict(cp["experiment"])
    if "sampler" not in raw:
        raise ValueError("experiment config needs a 'sampler' key")
    params = {"kind": raw["sampler"]}
    for key in ("k", "p", "kappa", "mu", "a"):
        if key in raw:
            params[key] = raw[key]
    if "shift" in raw:
        params["shift"] = tuple(_floats(raw["shift"]))
    cfg = {
        "sampler": geometry.sampler_from_dict(params),
        "n": int(raw.get("n", 0)),
        "replicates": int(raw.get("replicates", 200_000)),
        "seed": int(raw.get("seed", 0)),
        "radii": _floats(raw["radii"]) if "radii" in raw else [],
        "theta": tuple(_floats(raw["theta"])) if "theta" in raw else None,
    }
    if cfg["n"] < 1:
        raise ValueError("experiment config needs n >= 1")
    return cfg


def reports_to_csv(reports, extra=None) -> str:
    """CSV text, one line per report; ``extra`` adds leading columns per row."""
    fields = list(MCReport.__dataclass_fields__)
    extra = extra or [{} for _ in reports]
    lead = list(extra[0]) if extra else []
    lines = [",".join(lead + fields)]
    for rep, ex in zip(reports, extra):
        d = rep.to_dict()
        lines.append(",".join([str(ex[c]) for c in lead] + [repr(d[f]) for f in fields]))
    return "\n".join(lines) + "\n"
