"""
Origin-in-hull decisions, projection onto the unit sphere, and the point
samplers used by the experiments.

Point clouds are plain ``(n, k)`` float arrays, one observation per row.

Two independent routes decide whether the origin is interior to the hull:

* ``"enumerate"`` searches the C(n, k-1) hyperplanes through the origin
  spanned by k-1 of the points (compiled kernel, fast for small k);
* ``"lp"`` maximizes the smallest weight of a convex combination that
  reproduces the origin, and reads the separating direction off the dual.

``"auto"`` uses the enumeration unless the number of candidate
hyperplanes is large.  Both treat the origin as *not* interior when it is
within ``tol`` of the boundary; with continuous data that is a
probability-zero event, so the routes agree almost surely.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from . import _hullkernel

__all__ = [
    "HullStatus",
    "HullVerdict",
    "as_points",
    "contains_origin",
    "interior_mask",
    "project_to_sphere",
    "UniformSphere",
    "SignBernoulli",
    "VonMisesCircle",
    "CardioidCircle",
    "ShiftedGaussian",
    "sampler_from_dict",
    "make_rng",
    "sample",
    "sample_block",
    "read_points_csv",
    "write_points_csv",
    "DEFAULT_TOL",
    "BLOCK_SIZE",
]

DEFAULT_TOL = 1e-9
BLOCK_SIZE = 2048
ENUMERATION_LIMIT = 20_000
_SEED_MAX = 2**64


class HullStatus(str, Enum):
    INTERIOR = "Interior"
    NOT_INTERIOR = "NotInterior"


@dataclass
class HullVerdict:
    """
    Classification of the origin against conv(rows) with a certificate.

    ``weights`` (Interior) are nonnegative, sum to one and reproduce the
    origin.  ``direction`` (NotInterior) is a unit vector d with
    ``d . X_i >= -tol * |X_i|`` for every row, i.e. a hyperplane through the
    origin with all points on one side.
    """

    status: HullStatus
    weights: np.ndarray = None
    direction: np.ndarray = None
    method: str = ""

    @property
    def is_interior(self) -> bool:
        return self.status is HullStatus.INTERIOR

    def verify(self, points, tol=DEFAULT_TOL) -> bool:
        X = as_points(points)
        norms = _row_norms(X)
        if self.is_interior:
            w = self.weights
            if w is None or self.direction is not None:
                return False
            scale = max(1.0, float(norms.max()))
            return bool(
                np.all(w >= 0)
                and abs(w.sum() - 1.0) <= 1e-10
                and np.linalg.norm(w @ X) <= tol * scale
            )
        d = self.direction
        if d is None or self.weights is not None:
            return False
        return bool(
            abs(np.linalg.norm(d) - 1.0) <= 1e-12
            and np.all(X @ d >= -tol * norms - 1e-15)
        )

    def to_dict(self) -> dict:
        out = {"status": self.status.value}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        if self.direction is not None:
            out["direction"] = self.direction.tolist()
        return out


def as_points(points) -> np.ndarray:
    """Validate and return an ``(n, k)`` float array; 1-d input is read as k = 1."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"expected an (n, k) array with n, k >= 1, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("point cloud contains non-finite entries")
    return X


def _row_norms(X):
    # Euclidean norms along the last axis without underflow for tiny rows
    s = np.max(np.abs(X), axis=-1)
    safe = np.where(s > 0, s, 1.0)
    return s * np.linalg.norm(X / safe[..., None], axis=-1)


def _unit_rows(X, norms):
    # positive row scaling leaves the verdict unchanged; zero rows stay zero
    return X / np.where(norms > 0, norms, 1.0)[..., None]


def _use_enumeration(n, k):
    return math.comb(n, k - 1) <= ENUMERATION_LIMIT


def _null_direction(X):
    # unit vector orthogonal to the row space (rank-deficient clouds)
    _, _, vt = np.linalg.svd(X, full_matrices=True)
    return vt[-1]


def _max_min_weights(U):
    """
    Solve  max t  s.t.  U^T w = 0, sum(w) = 1, w_i >= t  (w otherwise free).

    t > 0 iff the origin is in the relative interior of conv(U); t < 0
    means the dual vector y on the k equality rows strictly separates.
    Returns (t, w, y), or None when the origin is not even in the affine
    hull of the rows.
    """
    n, k = U.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_eq = np.zeros((k + 1, n + 1))
    A_eq[:k, :n] = U.T
    A_eq[k, :n] = 1.0
    b_eq = np.zeros(k + 1)
    b_eq[k] = 1.0
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    b_ub = np.zeros(n)
    bounds = [(None, None)] * n + [(None, 1.0)]
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"hull LP failed: {res.message}")
    w = res.x[:n]
    y = np.asarray(res.eqlin.marginals[:k], dtype=float)
    return float(res.x[-1]), w, y


def _polish_weights(U, w):
    # minimum-norm correction onto {U^T w = 0, sum w = 1}
    A = np.vstack([U.T, np.ones(len(w))])
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    r = A @ w - b
    delta, *_ = np.linalg.lstsq(A, r, rcond=None)
    w2 = w - delta
    if np.all(w2 >= 0):
        return w2
    return np.clip(w, 0.0, None) / np.clip(w, 0.0, None).sum()


def _interior_weights(X, norms, nz):
    """Convex weights on the raw rows reproducing the origin."""
    U = X[nz] / norms[nz, None]
    _, wu, _ = _max_min_weights(U)
    wu = _polish_weights(U, np.clip(wu, 0.0, None))
    a = wu / norms[nz]
    w = np.zeros(X.shape[0])
    w[nz] = a / a.sum()
    return w


def _best_direction(X, norms, candidates):
    best, best_margin = None, -np.inf
    safe = np.where(norms > 0, norms, 1.0)
    for y in candidates:
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0:
            continue
        for s in (1.0, -1.0):
            d = s * y / ny
            margin = float(np.min((X @ d) / safe))
            if margin > best_margin:
                best, best_margin = d, margin
    return best, best_margin


def _lp_verdict(X, norms, tol):
    n, k = X.shape
    nz = norms > 0
    U = X[nz] / norms[nz, None]
    if U.shape[0] < k or np.linalg.matrix_rank(U) < k:
        return HullVerdict(HullStatus.NOT_INTERIOR, direction=_null_direction(_unit_rows(X, norms)),
                           method="lp")
    sol = _max_min_weights(U) if U.shape[0] > k else None
    if sol is None:
        # origin off the affine hull: the rows solve a.x = const > 0
        a, *_ = np.linalg.lstsq(U, np.ones(U.shape[0]), rcond=None)
        d, _ = _best_direction(X, norms, [a])
        return HullVerdict(HullStatus.NOT_INTERIOR, direction=d, method="lp")
    t, wu, y = sol
    if t > tol / n:
        wu = _polish_weights(U, wu)
        a = wu / norms[nz]
        w = np.zeros(n)
        w[nz] = a / a.sum()
        return HullVerdict(HullStatus.INTERIOR, weights=w, method="lp")
    d, _ = _best_direction(X, norms, [y])
    if d is None:
        # degenerate dual (boundary case with a null space)
        d, _ = _best_direction(X, norms, [_null_direction(U)])
    return HullVerdict(HullStatus.NOT_INTERIOR, direction=d, method="lp")


def contains_origin(points, tol: float = DEFAULT_TOL, method: str = "auto") -> HullVerdict:
    """
    Decide whether the origin is interior to the convex hull of the rows.

    Parameters
    ----------
    points : array_like, shape (n, k)
        One point per row.
    tol : float
        Relative boundary tolerance.  The origin is reported NotInterior
        whenever a unit direction d satisfies ``d . X_i >= -tol * |X_i|``
        for all rows (LP route: whenever the best smallest-weight is at
        most ``tol / n``).
    method : {"auto", "enumerate", "lp"}

    Returns
    -------
    HullVerdict
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    X = as_points(points)
    n, k = X.shape
    norms = _row_norms(X)
    if method == "auto":
        method = "enumerate" if _use_enumeration(n, k) else "lp"
    if method == "lp":
        return _lp_verdict(X, norms, tol)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")

    d = np.empty(k)
    code = _hullkernel.separating_direction(np.ascontiguousarray(_unit_rows(X, norms)), tol, d)
    if code == 1:
        return HullVerdict(HullStatus.NOT_INTERIOR, direction=d.copy(), method="enumerate")
    if code == -1:
        return HullVerdict(HullStatus.NOT_INTERIOR, direction=_null_direction(_unit_rows(X, norms)),
                           method="enumerate")
    w = _interior_weights(X, norms, norms > 0)
    return HullVerdict(HullStatus.INTERIOR, weights=w, method="enumerate")


def interior_mask(clouds, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Vectorized status-only test over a stack of clouds, shape (B, n, k).

    Returns a boolean array, True where the origin is interior.
    """
    Xb = np.ascontiguousarray(clouds, dtype=float)
    if Xb.ndim != 3:
        raise ValueError("expected a (B, n, k) array")
    B, n, k = Xb.shape
    if k == 1:
        x = Xb[:, :, 0]
        slack = tol * np.abs(x)
        # NotInterior iff every point is (weakly) on one side of zero
        return ~(np.all(x >= -slack, axis=1) | np.all(x <= slack, axis=1))
    norms = _row_norms(Xb)
    if _use_enumeration(n, k):
        out = np.empty(B, dtype=np.bool_)
        return _hullkernel.interior_batch(np.ascontiguousarray(_unit_rows(Xb, norms)), tol, out)
    out = np.empty(B, dtype=bool)
    for b in range(B):
        out[b] = _lp_verdict(Xb[b], norms[b], tol).is_interior
    return out


def project_to_sphere(points) -> np.ndarray:
    """
    Radial projection of every row onto the unit sphere.

    Accepts one ``(n, k)`` cloud or a stack ``(..., n, k)``.  Rows whose
    norm already rounds to one are returned bit-for-bit.
    """
    X = np.asarray(points, dtype=float)
    X = as_points(X) if X.ndim <= 2 else X
    if not np.all(np.isfinite(X)):
        raise ValueError("point cloud contains non-finite entries")
    v = _row_norms(X)
    bad = np.argwhere(v == 0)
    if bad.size:
        where = bad[0].tolist()
        label = where[0] if len(where) == 1 else tuple(where)
        raise ValueError(f"row {label} has zero norm and cannot be projected")
    unit = np.abs(v - 1.0) <= 4 * np.finfo(float).eps
    scale = np.where(unit, 1.0, v)
    return X / scale[..., None]


# -- samplers ---------------------------------------------------------------


def _angles_to_points(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


@dataclass(frozen=True)
class UniformSphere:
    """Uniform law on the unit sphere in R^k."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def mean(self):
        return np.zeros(self.k)

    def draw(self, rng, shape):
        g = rng.standard_normal(tuple(shape) + (self.k,))
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    def to_dict(self):
        return {"kind": "UniformSphere", "k": self.k}


@dataclass(frozen=True)
class SignBernoulli:
    """+1 with probability p, -1 otherwise (k = 1)."""

    p: float
    k: int = field(default=1, init=False)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def mean(self):
        return np.array([2.0 * self.p - 1.0])

    def draw(self, rng, shape):
        u = rng.random(tuple(shape))
        return np.where(u < self.p, 1.0, -1.0)[..., None]

    def to_dict(self):
        return {"kind": "SignBernoulli", "p": self.p}


@dataclass(frozen=True)
class VonMisesCircle:
    """Von Mises angle mapped to the unit circle in R^2."""

    kappa: float
    mu: float = 0.0
    k: int = field(default=2, init=False)

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")

    def mean(self):
        from scipy.special import i0e, i1e

        r = i1e(self.kappa) / i0e(self.kappa) if self.kappa > 0 else 0.0
        return r * np.array([np.cos(self.mu), np.sin(self.mu)])

    def draw(self, rng, shape):
        theta = rng.vonmises(self.mu, self.kappa, size=tuple(shape))
        return _angles_to_points(theta)

    def to_dict(self):
        return {"kind": "VonMisesCircle", "kappa": self.kappa, "mu": self.mu}


@dataclass(frozen=True)
class CardioidCircle:
    """Angle with density (1 + a cos x) / (2 pi) on [0, 2 pi)."""

    a: float
    k: int = field(default=2, init=False)

    def __post_init__(self):
        if abs(self.a) > 1:
            raise ValueError("|a| must be <= 1 for a nonnegative density")

    def mean(self):
        return np.array([self.a / 2.0, 0.0])

    def cdf(self, x):
        return (x + self.a * np.sin(x)) / (2 * np.pi)

    def inverse_cdf(self, u, xtol=1e-12):
        # bisection on the monotone CDF over [0, 2 pi]
        u = np.asarray(u, dtype=float)
        lo = np.zeros_like(u)
        hi = np.full_like(u, 2 * np.pi)
        n_iter = int(np.ceil(np.log2(2 * np.pi / xtol)))
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def draw(self, rng, shape):
        return _angles_to_points(self.inverse_cdf(rng.random(tuple(shape))))

    def to_dict(self):
        return {"kind": "CardioidCircle", "a": self.a}


@dataclass(frozen=True)
class ShiftedGaussian:
    """Standard normal vector in R^k plus a fixed shift."""

    shift: tuple

    def __post_init__(self):
        shift = tuple(float(s) for s in np.atleast_1d(self.shift))
        if not shift:
            raise ValueError("shift must have at least one coordinate")
        object.__setattr__(self, "shift", shift)

    @classmethod
    def centered(cls, k):
        return cls((0.0,) * k)

    @property
    def k(self):
        return len(self.shift)

    def mean(self):
        return np.array(self.shift)

    def draw(self, rng, shape):
        return rng.standard_normal(tuple(shape) + (self.k,)) + np.array(self.shift)

    def to_dict(self):
        return {"kind": "ShiftedGaussian", "shift": list(self.shift)}


_SAMPLERS = {
    "UniformSphere": lambda d: UniformSphere(int(d["k"])),
    "SignBernoulli": lambda d: SignBernoulli(float(d["p"])),
    "VonMisesCircle": lambda d: VonMisesCircle(float(d["kappa"]), float(d.get("mu", 0.0))),
    "CardioidCircle": lambda d: CardioidCircle(float(d["a"])),
    "ShiftedGaussian": lambda d: (
        ShiftedGaussian(tuple(d["shift"])) if "shift" in d else ShiftedGaussian.centered(int(d["k"]))
    ),
}


def sampler_from_dict(d: dict):
    """Build a sampler from ``{"kind": ..., <parameters>}``."""
    kind = d.get("kind")
    if kind not in _SAMPLERS:
        raise ValueError(f"unknown sampler kind {kind!r}; choose from {sorted(_SAMPLERS)}")
    return _SAMPLERS[kind](d)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Counter-based generator keyed by ``(seed, stream)``.

    Philox is keyed on a 128-bit value; the seed fills the low 64 bits and
    the stream index the high 64, so distinct streams never overlap.
    """
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if not 0 <= stream < _SEED_MAX:
        raise ValueError("stream index out of range")
    return np.random.Generator(np.random.Philox(key=seed | (int(stream) << 64)))


def sample(spec, n: int, seed: int) -> np.ndarray:
    """Draw an ``(n, k)`` cloud of i.i.d. points; deterministic in (spec, n, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.asarray(spec.draw(make_rng(seed), (n,)), dtype=float)


def sample_block(spec, n: int, seed: int, block: int) -> np.ndarray:
    """
    Replicates ``block*BLOCK_SIZE ... (block+1)*BLOCK_SIZE - 1`` as a
    ``(BLOCK_SIZE, n, k)`` array, drawn from the stream keyed by the block.
    """
    rng = make_rng(seed, block + 1)
    return np.asarray(spec.draw(rng, (BLOCK_SIZE, n)), dtype=float)


def read_points_csv(path) -> np.ndarray:
    """Headerless CSV, one point per line; k is the column count."""
    return as_points(np.loadtxt(path, delimiter=",", ndmin=2))


def write_points_csv(path, points) -> None:
    np.savetxt(path, as_points(points), delimiter=",", fmt="%.17g", newline="\n")
