"""
Least upper bound on the coverage probability of empirical likelihood
ratio confidence regions built from k-dimensional estimating equations.

For n i.i.d. points drawn uniformly on the unit sphere in R^k, the
probability that the origin lies inside their convex hull is

    b(k, n) = 1 - 2^{-(n-1)} * sum_{i=0}^{k-1} C(n-1, i),     n > k,

(Wendel, 1962).  For k <= 2 this is proven to be the supremum over all
continuous laws; for k >= 3 that identification is conjectural, although
the formula itself is exact for the uniform sphere in every dimension.

Everything here is computed with Python integers, so the values are exact
rationals with a power-of-two denominator; the float view is produced by a
single correctly-rounded conversion.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExactProbability",
    "LevelVerdict",
    "NormalApprox",
    "exact_bound",
    "bound_table",
    "format_table_csv",
    "normal_approx_bound",
    "check_level",
    "largest_int_below",
    "std_normal_cdf",
    "round_half_up",
    "TABLE1_K",
    "TABLE1_RATIOS",
]

TABLE1_K = (1, 2, 5)
TABLE1_RATIOS = (2, 3, 4, 5, 6, 7, 8)


@dataclass(frozen=True)
class ExactProbability:
    """
    A probability ``1 - tail_numerator / 2**log2_denominator``.

    ``tail_numerator`` is the binomial sum in the Wendel formula, i.e. the
    exact numerator of the probability that the origin is *not* interior
    to the hull.  For the degenerate case n <= k the tail is the whole
    mass, ``tail_numerator == 2**log2_denominator``.
    """

    tail_numerator: int
    log2_denominator: int

    def __post_init__(self):
        if self.log2_denominator < 0:
            raise ValueError("log2_denominator must be >= 0")
        if not 0 <= self.tail_numerator <= 1 << self.log2_denominator:
            raise ValueError("tail_numerator out of range")

    @property
    def denominator(self) -> int:
        return 1 << self.log2_denominator

    @property
    def tail(self) -> Fraction:
        return Fraction(self.tail_numerator, self.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.denominator - self.tail_numerator, self.denominator)

    @property
    def value(self) -> float:
        return float(self.as_fraction())

    def rounded(self, places: int = 4) -> str:
        return round_half_up(self.as_fraction(), places)

    def to_dict(self) -> dict:
        return {
            "tail_numerator": self.tail_numerator,
            "log2_denominator": self.log2_denominator,
            "value": self.value,
        }


@dataclass(frozen=True)
class LevelVerdict:
    requested_level: float
    bound: ExactProbability
    achievable: bool

    def to_dict(self) -> dict:
        return {
            "requested_level": self.requested_level,
            "bound": self.bound.to_dict(),
            "achievable": self.achievable,
        }


@dataclass(frozen=True)
class NormalApprox:
    """Normal approximation to b(k, n) next to the exact value."""

    k: int
    n: int
    approx: float
    exact: ExactProbability

    @property
    def error(self) -> float:
        return self.approx - self.exact.value

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "approx": self.approx,
            "exact": self.exact.to_dict(),
            "error": self.error,
        }


def _check_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")


def exact_bound(k: int, n: int) -> ExactProbability:
    """
    Exact value of b(k, n).

    Parameters
    ----------
    k : int
        Dimension of the estimating function, ``k >= 1``.
    n : int
        Sample size, ``n >= 1``.

    Returns
    -------
    ExactProbability
        The bound as an exact dyadic rational.  For ``n <= k`` fewer than
        k + 1 points cannot surround the origin and the bound is exactly 0.

    Notes
    -----
    The equality of b(k, n) with the supremum of coverage over all
    estimating-equation regions is proven for k = 1, 2 only; for k >= 3 it
    rests on the conjecture that a sign-symmetric law maximizes the hull
    probability.
    """
    _check_int("k", k, 1)
    _check_int("n", n, 1)
    if n <= k:
        return ExactProbability(1 << (n - 1), n - 1)
    tail = sum(math.comb(n - 1, i) for i in range(k))
    return ExactProbability(tail, n - 1)


def round_half_up(x: Fraction, places: int) -> str:
    """Decimal string of a nonnegative rational, rounded half-up."""
    if x < 0:
        raise ValueError("only nonnegative values are supported")
    scale = 10 ** places
    q = math.floor(Fraction(x) * scale + Fraction(1, 2))
    whole, frac = divmod(q, scale)
    if places == 0:
        return str(whole)
    return f"{whole}.{frac:0{places}d}"


def bound_table(k_list=TABLE1_K, ratio_list=TABLE1_RATIOS, places: int = 4):
    """
    Table of b(k, r*k) rounded to ``places`` decimals.

    Returns a list of rows (one per k), each a list of floats (one per
    ratio).  Rounding is done on the exact rational, half-up.
    """
    rows = []
    for k in k_list:
        _check_int("k", k, 1)
        row = []
        for r in ratio_list:
            n = _table_n(k, r)
            row.append(float(exact_bound(k, n).rounded(places)))
        rows.append(row)
    return rows


def _table_n(k, r):
    n = Fraction(r) * k
    if n.denominator != 1:
        raise ValueError(f"n = r*k must be an integer, got r={r}, k={k}")
    if r < 2:
        raise ValueError(f"ratio must be >= 2, got {r}")
    return int(n)


def format_table_csv(k_list=TABLE1_K, ratio_list=TABLE1_RATIOS, places: int = 4) -> str:
    """CSV text with header ``k,r,n,bound``, one line per cell, LF endings."""
    lines = ["k,r,n,bound"]
    for k in k_list:
        _check_int("k", k, 1)
        for r in ratio_list:
            n = _table_n(k, r)
            lines.append(f"{k},{r},{n},{exact_bound(k, n).rounded(places)}")
    return "\n".join(lines) + "\n"


def largest_int_below(x) -> int:
    """
    Largest integer strictly smaller than ``x``.

    This is not ``floor``: ``largest_int_below(3) == 2``.
    """
    return math.ceil(x) - 1


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_approx_bound(eps: float, n: int, upper: bool = False) -> NormalApprox:
    """
    Normal approximation to b([eps*n], n), with the exact value attached.

    Writing X ~ Bin(n-1, 1/2), b(k, n) = 1 - P(X <= k-1), and the
    approximation replaces X by a normal variable with the same mean and
    variance (no continuity correction).  With ``upper=True`` the
    dimension is k = [(1-eps)*n] instead, the branch that tends to zero.
    ``[x]`` is the largest integer strictly below x.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")
    _check_int("n", n, 2)
    k = largest_int_below((1.0 - eps) * n if upper else eps * n)
    if not 1 <= k < n:
        raise ValueError(f"need n > [eps*n] >= 1, got k={k}, n={n}")
    z = (k - 1 - (n - 1) / 2.0) / (math.sqrt(n - 1) / 2.0)
    return NormalApprox(k=k, n=n, approx=1.0 - std_normal_cdf(z), exact=exact_bound(k, n))


def check_level(k: int, n: int, level: float) -> LevelVerdict:
    """Whether a confidence level is attainable by any EL region with these (k, n)."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    bound = exact_bound(k, n)
    # compare against the exact rational, not the rounded float
    achievable = Fraction(level) < bound.as_fraction()
    return LevelVerdict(requested_level=level, bound=bound, achievable=achievable)
