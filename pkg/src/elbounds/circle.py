"""
Hull-containment probabilities on the line (k = 1) and the circle (k = 2).

For an angle X on [0, 2 pi) with continuous density f, let

    G(x) = integral_x^{x+pi} f(y) dy

be the mass of the half-circle starting at x.  The origin misses the hull
of n i.i.d. points exactly when all of them fit in such a half-circle, and

    P(0 not in H) = n * int f(x) G(x)^{n-1} dx
                  = n * int f(x) G(x - pi)^{n-1} dx
                  = (n/2) * int f(x) [G(x)^{n-1} + G(x - pi)^{n-1}] dx.

``circle_outside_prob`` evaluates all three by adaptive quadrature and
refuses to answer if they disagree.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import i0e

__all__ = [
    "CircularDensity",
    "QuadratureError",
    "line_prob",
    "half_circle_mass",
    "circle_outside_prob",
    "outside_prob_forms",
    "symmetric_prob",
]

TWO_PI = 2.0 * math.pi
QUAD_ABS_TOL = 1e-10
FORM_AGREEMENT_TOL = 1e-7
NORMALIZATION_TOL = 1e-8


class QuadratureError(ArithmeticError):
    """The equivalent integral forms disagree beyond tolerance."""


@dataclass(frozen=True)
class CircularDensity:
    """
    A density on the circle, extended periodically.

    Use the ``uniform``, ``von_mises``, ``cardioid`` and ``tabulated``
    constructors.  Construction checks nonnegativity on a grid and that the
    density integrates to one.
    """

    pdf: object = field(repr=False)
    descriptor: dict
    _table: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        grid = np.linspace(0.0, TWO_PI, 721)
        if np.any(np.asarray(self.pdf(grid)) < 0):
            raise ValueError("density takes negative values")
        mass = self.total_mass()
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"density integrates to {mass!r}, not 1")

    def __call__(self, x):
        return self.pdf(np.mod(x, TWO_PI))

    def total_mass(self):
        if self._table is not None:
            return float(self._table[2][-1])
        val, _ = integrate.quad(self.pdf, 0.0, TWO_PI, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val

    @classmethod
    def uniform(cls):
        return cls(lambda x: np.full_like(np.asarray(x, dtype=float), 1.0 / TWO_PI),
                   {"kind": "Uniform"})

    @classmethod
    def von_mises(cls, kappa, mu=0.0):
        if kappa < 0:
            raise ValueError("kappa must be >= 0")
        # i0e(kappa) = exp(-kappa) I0(kappa), so this stays finite for large kappa
        norm = TWO_PI * i0e(kappa)

        def pdf(x):
            return np.exp(kappa * (np.cos(np.asarray(x, dtype=float) - mu) - 1.0)) / norm

        return cls(pdf, {"kind": "VonMises", "kappa": kappa, "mu": mu})

    @classmethod
    def cardioid(cls, a):
        if abs(a) > 1:
            raise ValueError("|a| must be <= 1")

        def pdf(x):
            return (1.0 + a * np.cos(np.asarray(x, dtype=float))) / TWO_PI

        return cls(pdf, {"kind": "Cardioid", "a": a})

    @classmethod
    def tabulated(cls, angles, values, normalize=False):
        """
        Piecewise-linear density through ``(angles, values)``, wrapping from
        the last node back to the first.  Angles must be strictly increasing
        within [0, 2 pi).
        """
        t = np.asarray(angles, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("angles and values must be 1-d arrays of equal length >= 2")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("tabulated density must be finite and nonnegative")
        if t[0] < 0 or t[-1] >= TWO_PI or np.any(np.diff(t) <= 0):
            raise ValueError("angles must be strictly increasing in [0, 2*pi)")
        # close the period: node list t_0..t_{m-1}, t_0 + 2 pi
        tt = np.append(t, t[0] + TWO_PI)
        vv = np.append(v, v[0])
        mass = float(np.sum(np.diff(tt) * (vv[:-1] + vv[1:]) / 2))
        if normalize:
            vv = vv / mass
        cum = np.concatenate([[0.0], np.cumsum(np.diff(tt) * (vv[:-1] + vv[1:]) / 2)])
        table = (tt, vv, cum)

        def pdf(x):
            x = np.asarray(x, dtype=float)
            # shift into [t_0, t_0 + 2 pi)
            y = t[0] + np.mod(x - t[0], TWO_PI)
            return np.interp(y, tt, vv)

        return cls(pdf, {"kind": "Tabulated", "nodes": int(t.size)}, table)

    @classmethod
    def from_csv(cls, path, normalize=False):
        """Two headerless columns: angle, density value."""
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError("expected two columns: angle, density")
        return cls.tabulated(data[:, 0], data[:, 1], normalize=normalize)

    def cumulative(self, x):
        """Mass on [t_0, x] for tabulated densities, any real x."""
        tt, vv, cum = self._table
        t0 = tt[0]
        turns, y = divmod(x - t0, TWO_PI)
        y = y + t0
        j = min(int(np.searchsorted(tt, y, side="right")) - 1, len(tt) - 2)
        h = y - tt[j]
        slope = (vv[j + 1] - vv[j]) / (tt[j + 1] - tt[j])
        return turns * cum[-1] + cum[j] + vv[j] * h + 0.5 * slope * h * h


def line_prob(p: float, n: int) -> float:
    """
    Probability that n i.i.d. signs (+1 w.p. p) surround the origin,
    1 - p^n - (1-p)^n.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 - p**n - (1.0 - p) ** n


def symmetric_prob(n: int) -> float:
    """P(0 in H) for any centrally symmetric law on the circle: 1 - n 2^{-(n-1)}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(1 - Fraction(n, 2 ** (n - 1)))


def half_circle_mass(d: CircularDensity, x: float) -> float:
    """G(x): the mass of the half-circle (x, x + pi), wrapping past 2 pi."""
    if d._table is not None:
        return float(d.cumulative(x + math.pi) - d.cumulative(x))
    x = math.fmod(x, TWO_PI)
    if x < 0:
        x += TWO_PI
    end = x + math.pi
    opts = dict(epsabs=QUAD_ABS_TOL, epsrel=1e-12, limit=200)
    if end <= TWO_PI:
        return integrate.quad(d.pdf, x, end, **opts)[0]
    head = integrate.quad(d.pdf, x, TWO_PI, **opts)[0]
    tail = integrate.quad(d.pdf, 0.0, end - TWO_PI, **opts)[0]
    return head + tail


def _breakpoints(d):
    # kinks of a tabulated integrand: the nodes and the nodes shifted by pi
    if d._table is None:
        return None
    nodes = d._table[0][:-1]
    pts = np.unique(np.mod(np.concatenate([nodes, nodes + math.pi]), TWO_PI))
    return pts[(pts > 0) & (pts < TWO_PI)]


def _quad_2pi(func, points=None):
    limit = 400 if points is None else max(400, 4 * len(points))
    val, _ = integrate.quad(
        func, 0.0, TWO_PI, epsabs=QUAD_ABS_TOL, epsrel=1e-12, limit=limit, points=points
    )
    return val


def outside_prob_forms(d: CircularDensity, n: int):
    """
    The three quadrature forms of P(0 not in H), in order: forward
    half-circle, backward half-circle, and their average.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n - 1
    pts = _breakpoints(d)
    fwd = n * _quad_2pi(lambda x: d.pdf(x) * half_circle_mass(d, x) ** m, pts)
    bwd = n * _quad_2pi(lambda x: d.pdf(x) * half_circle_mass(d, x - math.pi) ** m, pts)
    avg = 0.5 * n * _quad_2pi(
        lambda x: d.pdf(x) * (half_circle_mass(d, x) ** m + half_circle_mass(d, x - math.pi) ** m),
        pts,
    )
    return fwd, bwd, avg


def circle_outside_prob(d: CircularDensity, n: int) -> float:
    """
    P(0 not in H(X_1..X_n)) for n i.i.d. angles with density ``d``.

    Raises
    ------
    QuadratureError
        If the three equivalent forms differ by more than 1e-7.
    """
    forms = outside_prob_forms(d, n)
    spread = max(forms) - min(forms)
    if spread > FORM_AGREEMENT_TOL:
        raise QuadratureError(
            f"integral forms disagree by {spread:.3e} for {d.descriptor}, n={n}: {forms}"
        )
    return forms[0]
