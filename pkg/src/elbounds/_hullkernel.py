"""
Compiled kernels for the origin-in-hull decision.

The origin is *not* interior to conv(X_1..X_n) iff some hyperplane through
the origin leaves every point in one closed half-space.  When the points
span R^k, such a hyperplane can always be rotated until it contains k-1
linearly independent points, so it suffices to enumerate the C(n, k-1)
candidate normals.  A point X_i counts as on the right side of d when
d.X_i >= -tol * |X_i|.
"""
import numpy as np
from numba import njit

_RANK_EPS = 1e-12


@njit(cache=True, nogil=True)
def _null_vector(A, out):
    # A is (k-1) x k; writes a unit vector with A @ out ~= 0 into out.
    # Returns False when A is (numerically) rank deficient.
    r, k = A.shape
    M = A.copy()
    perm = np.arange(k)
    scale = 0.0
    for i in range(r):
        for j in range(k):
            scale = max(scale, abs(M[i, j]))
    if r > 0 and scale == 0.0:
        return False
    for i in range(r):
        best = 0.0
        bp = i
        bq = i
        for p in range(i, r):
            for q in range(i, k):
                if abs(M[p, q]) > best:
                    best = abs(M[p, q])
                    bp = p
                    bq = q
        if best <= _RANK_EPS * scale:
            return False
        if bp != i:
            for q in range(k):
                tmp = M[i, q]
                M[i, q] = M[bp, q]
                M[bp, q] = tmp
        if bq != i:
            for p in range(r):
                tmp = M[p, i]
                M[p, i] = M[p, bq]
                M[p, bq] = tmp
            t = perm[i]
            perm[i] = perm[bq]
            perm[bq] = t
        piv = M[i, i]
        for p in range(i + 1, r):
            f = M[p, i] / piv
            if f != 0.0:
                for q in range(i, k):
                    M[p, q] -= f * M[i, q]
    y = np.zeros(k)
    y[r] = 1.0
    for i in range(r - 1, -1, -1):
        s = 0.0
        for j in range(i + 1, k):
            s += M[i, j] * y[j]
        y[i] = -s / M[i, i]
    nrm = 0.0
    for j in range(k):
        nrm += y[j] * y[j]
    nrm = np.sqrt(nrm)
    for j in range(k):
        out[perm[j]] = y[j] / nrm
    return True


@njit(cache=True, nogil=True)
def separating_direction(X, tol, out):
    """
    Search for a unit d with d.X_i >= -tol*|X_i| for every row.

    Returns 1 if found (d written to ``out``), 0 if the origin is interior,
    and -1 if no (k-1)-subset is linearly independent, which means the rows
    span at most a (k-2)-dimensional subspace.
    """
    n, k = X.shape
    r = k - 1
    norms = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(k):
            s += X[i, j] * X[i, j]
        norms[i] = np.sqrt(s)
    A = np.empty((r, k))
    d = np.empty(k)
    idx = np.arange(r)
    any_independent = False
    if r > n:
        return -1
    while True:
        for a in range(r):
            for j in range(k):
                A[a, j] = X[idx[a], j]
        if _null_vector(A, d):
            any_independent = True
            pos = True
            neg = True
            for i in range(n):
                s = 0.0
                for j in range(k):
                    s += d[j] * X[i, j]
                slack = tol * norms[i]
                if s < -slack:
                    pos = False
                if s > slack:
                    neg = False
                if not pos and not neg:
                    break
            if pos or neg:
                sign = 1.0 if pos else -1.0
                for j in range(k):
                    out[j] = sign * d[j]
                return 1
        # next combination in lexicographic order
        a = r - 1
        while a >= 0 and idx[a] == n - r + a:
            a -= 1
        if a < 0:
            break
        idx[a] += 1
        for b in range(a + 1, r):
            idx[b] = idx[b - 1] + 1
    if not any_independent:
        return -1
    return 0


@njit(cache=True, nogil=True)
def interior_batch(Xb, tol, out):
    """Fill ``out[b]`` with True when the origin is interior to cloud ``Xb[b]``."""
    B = Xb.shape[0]
    k = Xb.shape[2]
    d = np.empty(k)
    for b in range(B):
        out[b] = separating_direction(Xb[b], tol, d) == 0
    return out
