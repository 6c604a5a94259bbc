"""Exact integer matrix algorithms: Hermite and Smith normal forms, kernels,
images, determinants, characteristic polynomials.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so nothing
overflows.  All routines are pure.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np


def as_matrix(rows, shape=None):
    """Coerce nested sequences (or an array) into an object-dtype int matrix."""
    a = np.array(rows, dtype=object)
    if a.size == 0 and shape is not None:
        return np.zeros(shape, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1) if shape is None else a.reshape(shape)
    return np.vectorize(int, otypes=[object])(a) if a.size else a


def identity(n):
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(r, c):
    return np.zeros((r, c), dtype=object)


def to_lists(a):
    return [[int(x) for x in row] for row in np.asarray(a)]


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_rows(a):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U @ a == H``, ``U`` unimodular and ``H`` in row
    echelon form with positive pivots and reduced entries above each pivot.
    Zero rows are at the bottom.
    """
    h = np.array(a, dtype=object).copy()
    m, n = h.shape
    u = identity(m)
    r = 0
    for c in range(n):
        if r >= m:
            break
        for i in range(r + 1, m):
            if h[i, c] == 0:
                continue
            g, x, y = xgcd(h[r, c], h[i, c])
            p, q = h[r, c] // g, h[i, c] // g
            hr, hi = h[r].copy(), h[i].copy()
            ur, ui = u[r].copy(), u[i].copy()
            h[r], h[i] = x * hr + y * hi, -q * hr + p * hi
            u[r], u[i] = x * ur + y * ui, -q * ur + p * ui
        if h[r, c] == 0:
            continue
        if h[r, c] < 0:
            h[r], u[r] = -h[r], -u[r]
        for i in range(r):
            f = h[i, c] // h[r, c]
            if f:
                h[i] = h[i] - f * h[r]
                u[i] = u[i] - f * u[r]
        r += 1
    return h, u


def rank(a):
    h, _ = hnf_rows(np.array(a, dtype=object))
    return sum(1 for row in h if any(x != 0 for x in row))


def kernel(a):
    """Columns form a basis of the integer kernel {x : a @ x == 0}."""
    a = np.array(a, dtype=object)
    h, u = hnf_rows(a.T)
    rows = [u[i] for i in range(h.shape[0]) if not any(x != 0 for x in h[i])]
    if not rows:
        return zeros(a.shape[1], 0)
    return np.array(rows, dtype=object).T


def image(a):
    """Columns form a basis (in Hermite form) of the column span of ``a``."""
    a = np.array(a, dtype=object)
    h, _ = hnf_rows(a.T)
    rows = [h[i] for i in range(h.shape[0]) if any(x != 0 for x in h[i])]
    if not rows:
        return zeros(a.shape[0], 0)
    return np.array(rows, dtype=object).T


def same_span(a, b):
    """Whether the columns of ``a`` and ``b`` span the same sublattice."""
    ia, ib = image(a), image(b)
    return ia.shape == ib.shape and all(x == y for x, y in zip(ia.flat, ib.flat))


def smith(a):
    """Smith normal form.

    Returns ``(d, S, T)`` where ``d`` is the list of invariant factors
    (nonnegative, each dividing the next, zeros last) and ``S @ a @ T`` is
    the diagonal matrix with entries ``d``; ``S`` and ``T`` are unimodular.
    """
    d = np.array(a, dtype=object).copy()
    m, n = d.shape
    s, t = identity(m), identity(n)
    for k in range(min(m, n)):
        while True:
            nz = [(abs(d[i, j]), i, j) for i in range(k, m) for j in range(k, n) if d[i, j] != 0]
            if not nz:
                return _diag(d), s, t
            _, i, j = min(nz)
            d[[k, i]] = d[[i, k]]
            s[[k, i]] = s[[i, k]]
            d[:, [k, j]] = d[:, [j, k]]
            t[:, [k, j]] = t[:, [j, k]]
            done = True
            for i in range(k + 1, m):
                q = d[i, k] // d[k, k]
                if q:
                    d[i] = d[i] - q * d[k]
                    s[i] = s[i] - q * s[k]
                if d[i, k]:
                    done = False
            for j in range(k + 1, n):
                q = d[k, j] // d[k, k]
                if q:
                    d[:, j] = d[:, j] - q * d[:, k]
                    t[:, j] = t[:, j] - q * t[:, k]
                if d[k, j]:
                    done = False
            if not done:
                continue
            bad = [(i, j) for i in range(k + 1, m) for j in range(k + 1, n) if d[i, j] % d[k, k]]
            if bad:
                i, _ = bad[0]
                d[k] = d[k] + d[i]
                s[k] = s[k] + s[i]
                continue
            break
        if d[k, k] < 0:
            d[k] = -d[k]
            s[k] = -s[k]
    return _diag(d), s, t


def _diag(d):
    return [int(d[i, i]) for i in range(min(d.shape))]


def det(a):
    """Exact determinant (Bareiss fraction-free elimination)."""
    m = [list(row) for row in np.array(a, dtype=object)]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_rational(a, b):
    """Solve ``a @ x == b`` over Q for full-column-rank ``a``; None if inconsistent."""
    a = np.array(a, dtype=object)
    b = np.array(b, dtype=object)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    m, n = a.shape
    aug = [[Fraction(int(x)) for x in list(a[i]) + list(b[i])] for i in range(m)]
    piv_cols, r = [], 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(any(x != 0 for x in aug[i][n:]) for i in range(r, m)):
        return None
    x = np.array([aug[i][n:] for i in range(n)], dtype=object)
    return x.reshape(-1) if vec else x


def solve_integer(a, b):
    """Integer solution of ``a @ x == b`` for full-column-rank ``a``, else None."""
    x = solve_rational(a, b)
    if x is None or any(v.denominator != 1 for v in x.flat):
        return None
    return np.vectorize(int, otypes=[object])(x)


def inverse(a):
    """Exact inverse of a unimodular matrix (raises ValueError otherwise)."""
    n = np.array(a).shape[0]
    x = solve_integer(a, identity(n))
    if x is None:
        raise ValueError("matrix is not invertible over the integers")
    return x


def charpoly(a):
    """Coefficients of det(q*I - a), lowest degree first (Faddeev-LeVerrier)."""
    a = np.array(a, dtype=object)
    n = a.shape[0]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = zeros(n, n)
    c = 1
    for k in range(1, n + 1):
        m = a.dot(m) + c * identity(n)
        am = a.dot(m)
        tr = sum(am[i, i] for i in range(n))
        c = -tr // k
        assert -tr % k == 0
        coeffs[n - k] = c
    return tuple(int(x) for x in coeffs)
