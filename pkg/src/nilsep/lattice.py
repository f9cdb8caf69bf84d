"""Exact integer-lattice algorithms backing the abelian layer.

Everything here works over arbitrary-precision integers on small dense
matrices (sections of finitely generated groups).  Subgroups of a section
Z^r / <relations> are represented by generator rows in Z^r; the subgroup
is the image of the lattice spanned by the rows *plus* the relation rows,
so canonical forms always fold the relations back in.
"""

from __future__ import annotations

from math import gcd

Matrix = list[list[int]]


def mat_identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    n, m = len(a), len(a[0])
    assert m == len(b), "shape mismatch"
    k = len(b[0]) if b else 0
    out = [[0] * k for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for j, aij in enumerate(ai):
            if aij:
                bj = b[j]
                for t in range(k):
                    oi[t] += aij * bj[t]
    return out


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b), g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*M*V = S, S diagonal with a divisibility
    chain, U and V unimodular.

    Pivoting picks the smallest nonzero absolute value to control entry
    growth; correctness does not depend on the strategy.
    """
    u, s, v, _ = _snf_with_inverse(m)
    return u, s, v


def _snf_with_inverse(m: Matrix) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    """As smith_normal_form but also returns V^{-1} (tracked exactly)."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    s = [row[:] for row in m]
    u = mat_identity(nrows)
    v = mat_identity(ncols)
    vinv = mat_identity(ncols)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        si, sj = s[i], s[j]
        for t in range(ncols):
            si[t] += c * sj[t]
        ui, uj = u[i], u[j]
        for t in range(nrows):
            ui[t] += c * uj[t]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_col(i, j, c):
        # col_i += c * col_j; V tracks the same op, V^{-1} the inverse op.
        for row in s:
            row[i] += c * row[j]
        for row in v:
            row[i] += c * row[j]
        vi, vj = vinv[i], vinv[j]
        for t in range(ncols):
            vj[t] -= c * vi[t]

    def rounded_div(a, b):
        # quotient with |remainder| <= |b| / 2, for entry-growth control
        q, r = divmod(a, b)
        if 2 * abs(r) > abs(b):
            q += 1
        return q

    t = 0
    while t < min(nrows, ncols):
        # re-select the globally smallest pivot after every reduction round
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if s[i][j] and (pivot is None or abs(s[i][j]) < abs(s[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        changed = False
        for i in range(t + 1, nrows):
            if s[i][t]:
                add_row(i, t, -rounded_div(s[i][t], s[t][t]))
                if s[i][t]:
                    changed = True
        if changed:
            continue
        for j in range(t + 1, ncols):
            if s[t][j]:
                add_col(j, t, -rounded_div(s[t][j], s[t][t]))
                if s[t][j]:
                    changed = True
        if changed:
            continue
        # column and row t are clear; enforce the divisibility chain
        culprit = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if s[i][j] % s[t][t]:
                    culprit = i
                    break
            if culprit is not None:
                break
        if culprit is not None:
            add_row(t, culprit, 1)
            continue
        if s[t][t] < 0:
            add_row(t, t, -2)  # negate via row_t += -2*row_t
        t += 1
    return u, s, v, vinv


def snf_diagonal(m: Matrix) -> list[int]:
    _, s, _ = smith_normal_form(m)
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


# ---------------------------------------------------------------------------
# Hermite-style row echelon with transformation tracking


def hnf_rows(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Canonical row-echelon basis of the lattice spanned by `rows`.

    Pivots are positive, strictly to the right as rows descend, and
    entries above a pivot are reduced into [0, pivot).
    """
    basis: list[list[int]] = []  # kept in pivot-column order
    pivcol: list[int] = []

    def insert(vec):
        vec = list(vec)
        while True:
            j = next((c for c, x in enumerate(vec) if x), None)
            if j is None:
                return
            pos = next((k for k, pc in enumerate(pivcol) if pc >= j), len(pivcol))
            if pos == len(pivcol) or pivcol[pos] != j:
                if vec[j] < 0:
                    vec = [-x for x in vec]
                basis.insert(pos, vec)
                pivcol.insert(pos, j)
                return
            a = basis[pos][j]
            b = vec[j]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, basis[pos])]
            else:
                x, y, g = xgcd(a, b)
                new = [x * p + y * q_ for p, q_ in zip(basis[pos], vec)]
                rem = [(-(b // g)) * p + (a // g) * q_ for p, q_ in zip(basis[pos], vec)]
                basis[pos] = new
                vec = rem

    for r in rows:
        assert len(r) == ncols
        insert(r)
    # reduce above pivots for canonicity; ascending order, so a pass with a
    # later row never dirties a pivot column that was already reduced
    for k in range(len(basis)):
        j = pivcol[k]
        a = basis[k][j]
        for i in range(k):
            q = basis[i][j] // a
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[k])]
    return [row[:] for row in basis]


def lattice_member(hnf: list[list[int]], vec: list[int]) -> bool:
    return express_in_lattice(hnf, vec) is not None


def express_in_lattice(hnf: list[list[int]], vec: list[int]) -> list[int] | None:
    """Coefficients of vec over the echelon basis, or None.

    Rows are echelon, so reducing pivot columns in order is exact: a later
    row is zero in every earlier pivot column.
    """
    vec = list(vec)
    coeffs = [0] * len(hnf)
    for k, row in enumerate(hnf):
        j = next(c for c, x in enumerate(row) if x)
        if vec[j] % row[j]:
            return None
        q = vec[j] // row[j]
        coeffs[k] = q
        if q:
            vec = [x - q * y for x, y in zip(vec, row)]
    return coeffs if not any(vec) else None


def kernel_rows(m: Matrix, ncols: int) -> list[list[int]]:
    """Basis of {x : x * M == 0} for the row space of M."""
    nrows = len(m)
    # reduce [M | I] so kernel rows show up where M-part vanished
    aug = [list(m[i]) + [1 if j == i else 0 for j in range(nrows)] for i in range(nrows)]
    width = ncols + nrows
    ech = hnf_rows(aug, width)
    out = []
    for row in ech:
        if not any(row[:ncols]):
            out.append(row[ncols:])
    return out


def solve_linear(m: Matrix, target: list[int], ncols: int) -> list[int] | None:
    """One integer solution x of x * M == target, or None."""
    nrows = len(m)
    aug = [list(m[i]) + [1 if j == i else 0 for j in range(nrows)] for i in range(nrows)]
    ech = hnf_rows(aug, ncols + nrows)
    vec = list(target) + [0] * nrows
    piv = [next(c for c, x in enumerate(row) if x) for row in ech]
    for k, row in enumerate(ech):
        j = piv[k]
        if j >= ncols:
            break
        if vec[j] % row[j]:
            return None
        q = vec[j] // row[j]
        if q:
            vec = [x - q * y for x, y in zip(vec, row)]
    if any(vec[:ncols]):
        return None
    return [-x for x in vec[ncols:]]


# ---------------------------------------------------------------------------
# Sections: Z^r with per-coordinate moduli (0 = free coordinate)


def sat_rows(ncols: int, rows: list[list[int]], rel: list[list[int]], primes) -> list[list[int]]:
    """Saturation with an explicit relation lattice (see section_saturation)."""
    from .primes import p_part

    mat = [list(r) for r in rows] + [list(r) for r in rel]
    if not mat:
        return []
    _, s, _, vinv = _snf_with_inverse(mat)
    out = []
    for i in range(min(len(s), ncols)):
        d = s[i][i]
        if d:
            out.append([p_part(d, primes) * x for x in vinv[i]])
    return out


def canon_rows(ncols: int, rows: list[list[int]], rel: list[list[int]]):
    return tuple(tuple(r) for r in hnf_rows([list(r) for r in rows] + [list(r) for r in rel], ncols))


def member_rows(ncols: int, rows: list[list[int]], rel: list[list[int]], vec) -> bool:
    return lattice_member(hnf_rows([list(r) for r in rows] + [list(r) for r in rel], ncols), list(vec))


def intersect_rows(ncols: int, rows_a, rows_b, rel) -> list[list[int]]:
    a = [list(x) for x in rows_a] + [list(r) for r in rel]
    b = [list(x) for x in rows_b] + [list(r) for r in rel]
    if not a or not b:
        return [list(r) for r in rel]
    out = []
    for k in kernel_rows(a + b, ncols):
        xa = k[: len(a)]
        vec = [0] * ncols
        for c, row in zip(xa, a):
            if c:
                vec = [x + c * y for x, y in zip(vec, row)]
        if any(vec):
            out.append(vec)
    return out + [list(r) for r in rel]


def index_rows(ncols: int, rows_big, rows_small, rel) -> int | None:
    """Index of the small subgroup inside the big one (None = infinite)."""
    big = hnf_rows([list(r) for r in rows_big] + [list(r) for r in rel], ncols)
    small = hnf_rows([list(r) for r in rows_small] + [list(r) for r in rel], ncols)
    if len(small) < len(big):
        return None
    assert len(small) == len(big), "containment violated"
    coeffs = []
    for row in small:
        c = express_in_lattice(big, list(row))
        assert c is not None, "containment violated"
        coeffs.append(c)
    idx = 1
    for d in snf_diagonal(coeffs):
        idx *= abs(d)
    return idx


def relation_rows(moduli: list[int]) -> list[list[int]]:
    r = len(moduli)
    rows = []
    for j, m in enumerate(moduli):
        if m:
            row = [0] * r
            row[j] = m
            rows.append(row)
    return rows


def section_canonical(moduli: list[int], rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical form of the subgroup generated by `rows` in the section.

    Returns the Hermite basis of the preimage lattice (rows + relations);
    two generating sets give the same subgroup iff these agree.
    """
    all_rows = [list(r) for r in rows] + relation_rows(moduli)
    return tuple(tuple(r) for r in hnf_rows(all_rows, len(moduli)))


def section_member(moduli: list[int], rows: list[list[int]], vec: list[int]) -> bool:
    lat = [list(r) for r in rows] + relation_rows(moduli)
    return lattice_member(hnf_rows(lat, len(moduli)), list(vec))


def section_saturation(moduli: list[int], rows: list[list[int]], primes) -> list[list[int]]:
    """Generators of {x : q*x in <rows> for some P'-number q} in the section.

    Keeps only the P-parts of the elementary divisors of the quotient, so
    with P = all primes the subgroup is returned unchanged.
    """
    from .primes import p_part

    r = len(moduli)
    mat = [list(row) for row in rows] + relation_rows(moduli)
    if not mat:
        return []
    _, s, _, vinv = _snf_with_inverse(mat)
    out = []
    for i in range(min(len(s), r)):
        d = s[i][i]
        if d:
            scale = p_part(d, primes)
            out.append([scale * x for x in vinv[i]])
    return out


def section_intersection(moduli: list[int], rows_a: list[list[int]],
                         rows_b: list[list[int]]) -> list[list[int]]:
    """Generators of the intersection of two subgroups of the section."""
    r = len(moduli)
    rel = relation_rows(moduli)
    a = [list(x) for x in rows_a] + rel
    b = [list(x) for x in rows_b] + rel
    if not a or not b:
        return [row[:] for row in rel]
    stacked = a + b
    out = []
    for k in kernel_rows(stacked, r):
        xa = k[: len(a)]
        vec = [0] * r
        for c, row in zip(xa, a):
            if c:
                vec = [x + c * y for x, y in zip(vec, row)]
        if any(vec):
            out.append(vec)
    return out + [row[:] for row in rel]


def section_index(moduli: list[int], rows_big: list[list[int]],
                  rows_small: list[list[int]]) -> int | None:
    """Index of the small subgroup in the big one; None when infinite.

    Assumes the small subgroup is contained in the big one.
    """
    big = hnf_rows([list(r) for r in rows_big] + relation_rows(moduli), len(moduli))
    small = hnf_rows([list(r) for r in rows_small] + relation_rows(moduli), len(moduli))
    if len(small) < len(big):
        return None
    assert len(small) == len(big), "containment violated"
    coeffs = []
    for row in small:
        c = express_in_lattice(big, list(row))
        assert c is not None, "containment violated"
        coeffs.append(c)
    dets = snf_diagonal(coeffs)
    idx = 1
    for d in dets:
        idx *= abs(d)
    return idx


def congruence_kernel(m: Matrix, moduli_out: list[int]) -> list[list[int]]:
    """Basis of {x : x * M == 0 in the target section}.

    M maps Z^k into a section with the given column moduli.
    """
    k = len(m)
    if k == 0:
        return []
    ncols = len(m[0])
    stacked = [list(r) for r in m] + relation_rows(moduli_out)
    out = []
    for row in kernel_rows(stacked, ncols):
        x = row[:k]
        if any(x):
            out.append(x)
    # the zero solution set always includes nothing extra; callers span
    return out


def divisors(n: int) -> list[int]:
    n = abs(n)
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out
