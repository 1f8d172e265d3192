"""
Empirical likelihood ratio for estimating equations.

Given m_i = m(Y_i, theta), i = 1..n, in R^k,

    R(theta) = max { prod n w_i : sum w_i m_i = 0, w_i >= 0, sum w_i = 1 },

and l(theta) = -2 log R(theta).  When the origin is interior to the hull of
the m_i the maximizer is w_i = 1 / (n (1 + lam . m_i)), where lam maximizes
the concave dual  sum log(1 + lam . m_i),  and l = 2 sum log(1 + lam . m_i).
Otherwise no weights satisfy the constraint and l = +inf.

The dual is solved by damped Newton with backtracking that keeps every
1 + lam . m_i >= 1/n (any optimum satisfies this because w_i <= 1).  The
solver is vectorized over a leading batch axis so Monte Carlo runs can
solve thousands of problems at once.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammainc, gammaincinv

from .geometry import DEFAULT_TOL, as_points, interior_mask

__all__ = [
    "ELStatus",
    "ELEvaluation",
    "RegionSpec",
    "ELSolverError",
    "el_logratio",
    "in_region",
    "chisq_radius",
    "mean_estimating_function",
    "solve_dual",
    "log_ratios",
]

MAX_ITER = 100
DECREMENT_TOL = 1e-22
_ARMIJO = 1e-4
_MAX_HALVINGS = 60


class ELStatus(str, Enum):
    INTERIOR = "Interior"
    OUTSIDE_HULL = "OutsideHull"


class ELSolverError(RuntimeError):
    """The dual Newton iteration hit its cap without converging."""

    def __init__(self, message, residual, index=None):
        super().__init__(message)
        self.residual = residual
        self.index = index


@dataclass
class ELEvaluation:
    status: ELStatus
    log_ratio: float
    iterations: int = 0
    lam: np.ndarray = None
    weights: np.ndarray = None

    @property
    def is_interior(self):
        return self.status is ELStatus.INTERIOR

    def to_dict(self):
        return {
            "status": self.status.value,
            "lambda": None if self.lam is None else self.lam.tolist(),
            "log_ratio": self.log_ratio if math.isfinite(self.log_ratio) else "inf",
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class RegionSpec:
    """Region {theta : l(theta) < radius}; ``level`` records where radius came from."""

    radius: float
    level: float = None

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError("radius must be finite and positive")

    @classmethod
    def from_level(cls, k, level):
        return cls(chisq_radius(k, level), level)


def mean_estimating_function(y, theta):
    """m(Y, theta) = Y - theta, row-wise."""
    return np.asarray(y, dtype=float) - np.asarray(theta, dtype=float)


def _dual_value(z):
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(z > 0, np.log(np.where(z > 0, z, 1.0)), -np.inf).sum(axis=-1)


def solve_dual(M, max_iter=MAX_ITER, decrement_tol=DECREMENT_TOL):
    """
    Maximize sum_i log(1 + lam . m_i) for a stack of problems.

    Parameters
    ----------
    M : ndarray, shape (B, n, k)
        Estimating-function values; the origin must be interior to each
        cloud's hull.

    Returns
    -------
    lam : ndarray (B, k)
    iterations : ndarray (B,) of int
    converged : ndarray (B,) of bool
    residual : ndarray (B,)
        Final gradient norm.

    Notes
    -----
    An instance stops when its Newton decrement g' H^{-1} g drops to
    ``decrement_tol``.  The decrement bounds the remaining dual gap and
    is invariant under linear reparametrization of m, so a tiny or huge
    estimating function converges the same way; an absolute gradient
    test would stop early on the former.
    """
    M = np.asarray(M, dtype=float)
    B, n, k = M.shape
    floor = 1.0 / n
    lam = np.zeros((B, k))
    iters = np.zeros(B, dtype=int)
    done = np.zeros(B, dtype=bool)
    failed = np.zeros(B, dtype=bool)
    resid = np.full(B, np.inf)

    for _ in range(max_iter + 1):
        z = 1.0 + np.einsum("bnk,bk->bn", M, lam)
        inv = 1.0 / z
        g = np.einsum("bnk,bn->bk", M, inv)
        resid = np.linalg.norm(g, axis=1)
        done |= resid == 0
        act = np.flatnonzero(~done & ~failed & (iters < max_iter))
        if act.size == 0:
            break
        Ma = M[act]
        wa = inv[act] ** 2
        H = np.einsum("bni,bnj,bn->bij", Ma, Ma, wa)
        step = np.linalg.solve(H, g[act][..., None])[..., 0]
        decrement = np.einsum("bk,bk->b", g[act], step)
        tiny = decrement <= decrement_tol
        done[act[tiny]] = True
        act, step, decrement = act[~tiny], step[~tiny], decrement[~tiny]
        if act.size == 0:
            break

        base = _dual_value(z[act])
        # sufficient-increase test is below rounding once the decrement is tiny
        local = decrement < 1e-8
        Ma = M[act]
        t = np.ones(act.size)
        ok = np.zeros(act.size, dtype=bool)
        for _h in range(_MAX_HALVINGS):
            trial = lam[act] + t[:, None] * step
            zt = 1.0 + np.einsum("bnk,bk->bn", Ma, trial)
            feasible = zt.min(axis=1) >= floor
            val = _dual_value(zt)
            ok = feasible & (local | (val >= base + _ARMIJO * t * decrement))
            if ok.all():
                break
            t = np.where(ok, t, 0.5 * t)
        # a rejected step is fine at the rounding floor, fatal elsewhere
        stalled = ~ok
        small = decrement <= 1e-14
        done[act[stalled & small]] = True
        failed[act[stalled & ~small]] = True
        acc = act[ok]
        lam[acc] = lam[acc] + t[ok, None] * step[ok]
        iters[acc] += 1

    converged = done & ~failed
    return lam, iters, converged, resid


def el_logratio(m_values, tol: float = DEFAULT_TOL) -> ELEvaluation:
    """
    Evaluate l(theta) = -2 log R(theta) from the rows m(Y_i, theta).

    Returns an OutsideHull evaluation (log_ratio = inf) when the origin is
    not interior to the hull of the rows.

    Raises
    ------
    ELSolverError
        If the dual Newton iteration does not converge within 100 steps.
    """
    M = as_points(m_values)
    n, k = M.shape
    if not interior_mask(M[None], tol)[0]:
        return ELEvaluation(ELStatus.OUTSIDE_HULL, math.inf)
    lam, iters, conv, resid = solve_dual(M[None])
    if not conv[0]:
        raise ELSolverError(
            f"dual Newton did not converge in {MAX_ITER} iterations (|grad| = {resid[0]:.3e})",
            float(resid[0]),
        )
    z = 1.0 + M @ lam[0]
    return ELEvaluation(
        ELStatus.INTERIOR,
        log_ratio=float(max(2.0 * np.log(z).sum(), 0.0)),
        iterations=int(iters[0]),
        lam=lam[0],
        weights=1.0 / (n * z),
    )


def log_ratios(M, tol: float = DEFAULT_TOL, offset: int = 0) -> np.ndarray:
    """
    l(theta) for a stack of problems, shape (B, n, k); inf where the origin
    is outside the hull.  ``offset`` is added to replicate indices in errors.
    """
    M = np.asarray(M, dtype=float)
    out = np.full(M.shape[0], np.inf)
    inside = np.flatnonzero(interior_mask(M, tol))
    if inside.size == 0:
        return out
    Mi = M[inside]
    lam, _, conv, resid = solve_dual(Mi)
    if not conv.all():
        j = int(np.flatnonzero(~conv)[0])
        raise ELSolverError(
            f"dual Newton failed on replicate {offset + inside[j]} (|grad| = {resid[j]:.3e})",
            float(resid[j]),
            index=int(offset + inside[j]),
        )
    z = 1.0 + np.einsum("bnk,bk->bn", Mi, lam)
    out[inside] = np.maximum(2.0 * np.log(z).sum(axis=1), 0.0)
    return out


def in_region(m_values, spec: RegionSpec, tol: float = DEFAULT_TOL) -> bool:
    """theta in C_r  iff  l(theta) < r  (strict; OutsideHull is never inside)."""
    return el_logratio(m_values, tol).log_ratio < spec.radius


def chisq_radius(k: int, level: float) -> float:
    """
    The ``level`` quantile of chi-square with k degrees of freedom.

    Computed by inverting the regularized lower incomplete gamma function,
    then polished by Newton steps on the CDF.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    a = 0.5 * k
    x = float(gammaincinv(a, level))
    for _ in range(3):
        if x <= 0:
            break
        # density of Gamma(a, 1) at x
        dens = math.exp((a - 1) * math.log(x) - x - math.lgamma(a))
        if dens <= 0:
            break
        x -= (float(gammainc(a, x)) - level) / dens
    return 2.0 * x
