"""Exact integer matrix algorithms: Hermite and Smith normal forms, kernels.

Matrices are plain lists of lists of Python ints (arbitrary precision).
Nothing here uses floating point.
"""

from fractions import Fraction
from math import gcd


def _xgcd(a, b):
    """Return (g, x, y) with x*a + y*b == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a, ncols=None):
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b, len(b[0]) if b else 0)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def hnf(rows, ncols=None, transform=False):
    """Row-style Hermite normal form.

    Returns ``H`` (nonzero rows only) or ``(H, U, zero_rows)`` when
    ``transform`` is set, where ``U`` is unimodular with ``U * A`` equal to
    ``H`` stacked over zero rows; ``zero_rows`` are the rows of ``U`` that
    map ``A`` to zero.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    u = identity(m) if transform else None
    piv_row = 0
    for col in range(n):
        if piv_row >= m:
            break
        # gcd-combine every row below into the pivot row
        for i in range(piv_row + 1, m):
            if a[i][col] == 0:
                continue
            x, y = a[piv_row][col], a[i][col]
            g, s, t = _xgcd(x, y)
            px, py = x // g, y // g
            ra, rb = a[piv_row], a[i]
            a[piv_row] = [s * e + t * f for e, f in zip(ra, rb)]
            a[i] = [-py * e + px * f for e, f in zip(ra, rb)]
            if transform:
                ua, ub = u[piv_row], u[i]
                u[piv_row] = [s * e + t * f for e, f in zip(ua, ub)]
                u[i] = [-py * e + px * f for e, f in zip(ua, ub)]
        if a[piv_row][col] == 0:
            continue
        if a[piv_row][col] < 0:
            a[piv_row] = [-e for e in a[piv_row]]
            if transform:
                u[piv_row] = [-e for e in u[piv_row]]
        p = a[piv_row][col]
        for i in range(piv_row):
            q = a[i][col] // p
            if q:
                a[i] = [e - q * f for e, f in zip(a[i], a[piv_row])]
                if transform:
                    u[i] = [e - q * f for e, f in zip(u[i], u[piv_row])]
        piv_row += 1
    h = a[:piv_row]
    if transform:
        return h, u[:piv_row], u[piv_row:]
    return h


def integer_kernel(a, ncols=None):
    """Saturated basis of {x in Z^n : a x = 0}, returned as a list of rows.

    The basis is put in Hermite form so the output is canonical.
    """
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    if n == 0:
        return []
    if not a:
        return identity(n)
    _, _, kern = hnf(transpose(a), ncols=len(a), transform=True)
    if not kern:
        return []
    return hnf(kern, ncols=n)


def lattice_contains(basis_hnf, v):
    """Membership of integer vector ``v`` in the row lattice of an HNF basis."""
    v = list(v)
    for row in basis_hnf:
        col = next(j for j, e in enumerate(row) if e)
        q, r = divmod(v[col], row[col])
        if r:
            return False
        v = [e - q * f for e, f in zip(v, row)]
    return not any(v)


def lattice_index(rows, n):
    """Index of the row lattice of ``rows`` in Z^n; 0 if it is not full rank."""
    h = hnf(rows, ncols=n)
    if len(h) < n:
        return 0
    out = 1
    for i, row in enumerate(h):
        out *= row[i]
    return out


def smith_invariants(rows, ncols=None):
    """Invariant factors d_1 | d_2 | ... of an integer matrix (nonzero only)."""
    a = [list(r) for r in rows]
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    out = []
    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [e - q * f for e, f in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        done = False
            if done:
                # divisibility condition for the remaining block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [e + f for e, f in zip(a[t], a[bad[0]])]
                continue
            # move the smallest nonzero entry of row/col t into the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        out.append(abs(a[t][t]))
        t += 1
    return out


def cokernel_order(square):
    """Order of Z^n / f(Z^n) for a square integer matrix; 0 means infinite."""
    n = len(square)
    inv = smith_invariants(square, n)
    if len(inv) < n:
        return 0
    out = 1
    for d in inv:
        out *= d
    return out


def det(m):
    """Exact determinant over Q (entries int or Fraction)."""
    a = [[Fraction(e) for e in row] for row in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        p = a[c][c]
        out *= p
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f:
                a[r] = [e - f * g for e, g in zip(a[r], a[c])]
    return out


def content(v):
    g = 0
    for e in v:
        g = gcd(g, e)
    return g
