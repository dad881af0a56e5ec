"""Exact linear algebra over Q, carried out on primitive integer rows.

Rows are tuples of Python ints.  A *reduced system* is a tuple of rows in
reduced echelon form: rows sorted by pivot column, every pivot entry
positive, every pivot column zero outside its row, and each row divided
by the gcd of its entries.  That form is unique for a given row space,
so reduced systems double as hashable canonical keys.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Row = tuple
System = tuple


def primitive(v) -> tuple:
    """Divide by the content and make the first nonzero entry positive."""
    g = 0
    for a in v:
        if a:
            g = gcd(g, a)
    if g == 0:
        return tuple(v)
    first = next(a for a in v if a)
    if first < 0:
        g = -g
    if g == 1:
        return tuple(v)
    return tuple(a // g for a in v)


def integerize(v) -> tuple:
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for a in v:
        a = Fraction(a)
        den = lcm(den, a.denominator)
    return primitive([int(Fraction(a) * den) for a in v])


def pivot_of(row, width: int | None = None) -> int:
    n = len(row) if width is None else width
    for j in range(n):
        if row[j]:
            return j
    return -1


def reduce_against(system: System, v) -> tuple:
    """Eliminate the pivot columns of ``system`` from ``v`` (fraction-free)."""
    v = list(v)
    for r in system:
        p = pivot_of(r)
        vp = v[p]
        if vp:
            rp = r[p]
            g = gcd(rp, vp)
            a, b = rp // g, vp // g
            v = [a * x - b * y for x, y in zip(v, r)]
    return primitive(v)


def insert_row(system: System, v, width: int | None = None):
    """Add ``v`` to a reduced system.

    Returns ``(new_system, status)`` with status one of ``"new"``,
    ``"dependent"`` (v already in the span) or ``"inconsistent"`` (the
    first ``width`` entries vanish but some later entry does not; used for
    augmented rows ``[a | b]`` of affine equations).
    """
    v = reduce_against(system, v)
    w = len(v) if width is None else width
    q = pivot_of(v, w)
    if q < 0:
        if any(v[w:]):
            return system, "inconsistent"
        return system, "dependent"
    if v[q] < 0:
        v = tuple(-a for a in v)
    out = []
    for r in system:
        rq = r[q]
        if rq:
            vq = v[q]
            g = gcd(vq, rq)
            a, b = vq // g, rq // g
            r = primitive([a * x - b * y for x, y in zip(r, v)])
        out.append(r)
    out.append(v)
    out.sort(key=pivot_of)
    return tuple(out), "new"


def reduce_system(rows, width: int | None = None):
    """Reduced system spanning ``rows``; None when inconsistent."""
    sys_: System = ()
    for v in rows:
        v = integerize(v) if any(isinstance(a, Fraction) for a in v) else tuple(int(a) for a in v)
        sys_, status = insert_row(sys_, v, width)
        if status == "inconsistent":
            return None
    return sys_


def in_span(system: System, v) -> bool:
    return not any(reduce_against(system, v))


def rank(rows) -> int:
    """Rank of a rational matrix (list of rows) by fraction-free elimination."""
    m = [list(integerize(r)) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        p = m[rk][c]
        for i in range(rk + 1, len(m)):
            mi = m[i]
            f = mi[c]
            # Bareiss step: exact division by the previous pivot
            m[i] = [(p * mi[j] - f * m[rk][j]) // prev for j in range(ncols)]
        prev = p
        rk += 1
        if rk == len(m):
            break
    return rk


def det(matrix) -> Fraction:
    """Determinant of a square rational matrix (Bareiss on integerized rows)."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    m = []
    for r in matrix:
        den = 1
        for a in r:
            den = lcm(den, Fraction(a).denominator)
        scale /= den
        m.append([int(Fraction(a) * den) for a in r])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * scale * m[n - 1][n - 1]


def nullspace(system: System, ncols: int) -> list[tuple]:
    """Integer basis of {x : A x = 0} for a reduced system A.

    One basis vector per free column, in increasing column order, so the
    choice is deterministic.
    """
    pivots = {pivot_of(r, ncols): r for r in system}
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for p, r in pivots.items():
            vec[p] = Fraction(-r[f], r[p])
        basis.append(integerize(vec))
    return basis


def parametrize(system: System, ncols: int):
    """Affine chart of {x : a.x = b} for an augmented reduced system.

    Returns ``(point, directions)`` with rational point and integer
    direction vectors so that x = point + sum t_i directions[i].
    """
    pivots = {pivot_of(r, ncols): r for r in system}
    point = [Fraction(0)] * ncols
    for p, r in pivots.items():
        point[p] = Fraction(r[ncols], r[p])
    dirs = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for p, r in pivots.items():
            vec[p] = Fraction(-r[f], r[p])
        dirs.append(vec)
    return point, dirs


def solve_gram(rows, rhs):
    """Solve (R R^T) y = rhs exactly; R has independent rows."""
    m = len(rows)
    g = [[sum(Fraction(a) * b for a, b in zip(rows[i], rows[j])) for j in range(m)] for i in range(m)]
    aug = [g[i] + [Fraction(rhs[i])] for i in range(m)]
    for c in range(m):
        piv = next(i for i in range(c, m) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(m):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [aug[i][m] for i in range(m)]
