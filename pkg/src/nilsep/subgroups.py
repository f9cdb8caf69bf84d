"""Subgroup machinery: the non-commutative sieve, quotients, series.

A subgroup is stored as a standardized induced generating sequence: rows
with strictly increasing leading indices, positive leading exponents that
divide the relative order where one exists, tails reduced modulo later
rows, and closure under conjugation and power consequences.  Membership
is exact successive leading-exponent division, and two subgroups are
equal iff their standardized sequences coincide.
"""

from __future__ import annotations

from math import gcd, lcm

from .errors import (
    ExponentRequested,
    NotNormal,
    PresentationError,
    SearchBoundsExceeded,
)
from . import lattice
from .pc import Element, PcPresentation

ENUMERATION_CAP = 1 << 16


def _modinv(a: int, m: int) -> int:
    x, _, g = lattice.xgcd(a, m)
    assert g == 1
    return x % m


class Subgroup:
    """Standardized subgroup of a pc presentation."""

    __slots__ = ("group", "rows", "_by_lead")

    def __init__(self, group: PcPresentation, rows: tuple[Element, ...]):
        self.group = group
        self.rows = rows
        self._by_lead = {r.leading_index(): r for r in rows}

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.group is other.group
            and tuple(r.exps for r in self.rows) == tuple(r.exps for r in other.rows)
        )

    def __hash__(self):
        return hash((id(self.group), tuple(r.exps for r in self.rows)))

    def __repr__(self):
        inner = ", ".join(self.group.describe_element(r) for r in self.rows)
        return f"Subgroup<{inner}>"

    def is_trivial(self) -> bool:
        return not self.rows

    def row_at(self, lead: int) -> Element | None:
        return self._by_lead.get(lead)

    def relative_orders(self) -> list[int | None]:
        """Relative order of each row modulo the later rows."""
        out = []
        for r in self.rows:
            i = r.leading_index()
            ri = self.group.orders[i]
            out.append(None if ri is None else ri // r.exps[i])
        return out

    def order(self) -> int | None:
        total = 1
        for m in self.relative_orders():
            if m is None:
                return None
            total *= m
        return total

    def hirsch_length(self) -> int:
        return sum(1 for m in self.relative_orders() if m is None)

    def contains(self, u: Element) -> bool:
        return self.express(u) is not None

    def express(self, u: Element) -> dict[int, int] | None:
        """Coefficients {leading index: exponent} with u equal to the
        ordered product of rows^t, or None when u lies outside."""
        G = self.group
        G._own(u)
        vec = list(u.exps)
        coeffs: dict[int, int] = {}
        while True:
            i = next((k for k, e in enumerate(vec) if e), None)
            if i is None:
                return coeffs
            row = self._by_lead.get(i)
            if row is None:
                return None
            f = row.exps[i]
            e = vec[i]
            r = G.orders[i]
            if r is None:
                if e % f:
                    return None
                t = e // f
            else:
                g = gcd(f, r)
                if e % g:
                    return None
                m = r // g
                t = ((e // g) * _modinv(f // g, m)) % m
            vec = G._mul_vecs(G._pow_vec(row.exps, -t), vec)
            assert vec[i] == 0
            coeffs[i] = t

    def elements(self, cap: int = ENUMERATION_CAP) -> list[Element]:
        """All elements of a finite subgroup, deterministic order."""
        n = self.order()
        if n is None:
            raise ExponentRequested("cannot enumerate an infinite subgroup")
        if n > cap:
            raise SearchBoundsExceeded(f"subgroup of order {n} exceeds cap {cap}")
        G = self.group
        out = [G.identity]
        for row, m in zip(self.rows, self.relative_orders()):
            powers = [G.power(row, t) for t in range(m)]
            out = [G.multiply(u, p) for u in out for p in powers]
        return out

    def random_element(self, rng, window: int = 6) -> Element:
        G = self.group
        acc = G.identity
        for row, m in zip(self.rows, self.relative_orders()):
            t = rng.randrange(m) if m is not None else rng.randint(-window, window)
            acc = G.multiply(acc, G.power(row, t))
        return acc


# ---------------------------------------------------------------------------
# the sieve


class _Sieve:
    def __init__(self, group: PcPresentation):
        self.G = group
        self.rows: list[list[int] | None] = [None] * group.ngens

    def add(self, vec) -> bool:
        G = self.G
        work = [list(vec)]
        changed = False
        while work:
            v = work.pop()
            i = next((k for k, e in enumerate(v) if e), None)
            if i is None:
                continue
            e = v[i]
            r = G.orders[i]
            if r is None and e < 0:
                v = G._inv_vec(v)
                e = v[i]
            if r is not None:
                g0 = gcd(e, r)
                if g0 != e:
                    # replace v by a power with leading exponent gcd(e, r);
                    # the displaced power consequence sieves in separately
                    m = r // g0
                    x = _modinv(e // g0, m) % m
                    work.append(G._pow_vec(v, r // g0))
                    v = G._pow_vec(v, x)
                    e = g0
                    assert v[i] == e
            cur = self.rows[i]
            if cur is None:
                self.rows[i] = v
                if r is not None:
                    work.append(G._pow_vec(v, r // e))
                changed = True
                continue
            f = cur[i]
            if e % f == 0:
                resid = G._mul_vecs(G._pow_vec(cur, -(e // f)), v)
                assert resid[i] == 0
                work.append(resid)
                continue
            d, x, y = lattice.xgcd(f, e)
            new = G._mul_vecs(G._pow_vec(cur, x), G._pow_vec(v, y))
            assert new[i] == d
            self.rows[i] = new
            work.append(G._mul_vecs(G._pow_vec(new, -(f // d)), cur))
            work.append(G._mul_vecs(G._pow_vec(new, -(e // d)), v))
            if r is not None:
                work.append(G._pow_vec(new, r // d))
            changed = True
        return changed

    def member(self, vec) -> bool:
        G = self.G
        v = list(vec)
        while True:
            i = next((k for k, e in enumerate(v) if e), None)
            if i is None:
                return True
            row = self.rows[i]
            if row is None:
                return False
            f = row[i]
            e = v[i]
            r = G.orders[i]
            if r is None:
                if e % f:
                    return False
                t = e // f
            else:
                g = gcd(f, r)
                if e % g:
                    return False
                m = r // g
                t = ((e // g) * _modinv(f // g, m)) % m
            v = G._mul_vecs(G._pow_vec(row, -t), v)

    def close(self):
        """Conjugation closure: makes the rows an induced sequence."""
        G = self.G
        while True:
            current = [r for r in self.rows if r is not None]
            changed = False
            for a in current:
                inv_a = G._inv_vec(a)
                for b in current:
                    if a is b:
                        continue
                    for left, right in ((inv_a, a), (a, inv_a)):
                        conj = G._mul_vecs(G._mul_vecs(left, b), right)
                        if not self.member(conj):
                            self.add(conj)
                            changed = True
            if not changed:
                return

    def finish(self) -> list[list[int]]:
        self.close()
        out = [r for r in self.rows if r is not None]
        for idx in range(len(out)):
            reduced = self._reduce_tail(out[idx])
            out[idx] = reduced
            self.rows[reduced.index(next(x for x in reduced if x))] = reduced
        return out

    def _reduce_tail(self, v: list[int]) -> list[int]:
        G = self.G
        v = list(v)
        lead = next(k for k, e in enumerate(v) if e)
        pos = lead
        while True:
            pos = next((k for k in range(pos + 1, G.ngens) if v[k]), None)
            if pos is None:
                return v
            row = self.rows[pos]
            if row is None:
                continue
            f = row[pos]
            e = v[pos]
            r = G.orders[pos]
            if r is None:
                if e % f:
                    continue
                t = e // f
            else:
                g = gcd(f, r)
                if e % g:
                    continue
                m = r // g
                t = ((e // g) * _modinv(f // g, m)) % m
            if t == 0:
                continue
            cand = G._mul_vecs(v, G._pow_vec(row, -t))
            assert cand[pos] == 0 and cand[:lead + 1] == v[:lead + 1]
            v = cand


def span(X: PcPresentation, gens) -> Subgroup:
    """Standardized induced generating sequence of <gens>."""
    sieve = _Sieve(X)
    for g in gens:
        sieve.add(g.exps if isinstance(g, Element) else g)
    rows = sieve.finish()
    return Subgroup(X, tuple(Element(X, tuple(r)) for r in rows))


def whole_group(X: PcPresentation) -> Subgroup:
    if "whole" not in X._memo:
        X._memo["whole"] = span(X, X.generators)
    return X._memo["whole"]


def trivial_subgroup(X: PcPresentation) -> Subgroup:
    return Subgroup(X, ())


def contains(X: PcPresentation, S: Subgroup, u: Element) -> bool:
    assert S.group is X
    return S.contains(u)


def is_normal(X: PcPresentation, S: Subgroup) -> bool:
    for row in S.rows:
        for i in range(X.ngens):
            g = X.generator(i)
            for sign in (1, -1):
                w = X.conjugate(row, X.power(g, sign))
                if not S.contains(w):
                    return False
    return True


def normal_closure(X: PcPresentation, gens) -> Subgroup:
    S = span(X, gens)
    while True:
        new = []
        for row in S.rows:
            for i in range(X.ngens):
                g = X.generator(i)
                for sign in (1, -1):
                    w = X.conjugate(row, X.power(g, sign))
                    if not S.contains(w):
                        new.append(w)
        if not new:
            return S
        S = span(X, list(S.rows) + new)


def subgroup_product(X: PcPresentation, A: Subgroup, B: Subgroup) -> Subgroup:
    return span(X, list(A.rows) + list(B.rows))


def derived_subgroup_of_rows(X: PcPresentation, rows) -> Subgroup:
    """Derived subgroup of <rows>: commutators closed under conjugation."""
    gens = [X.commutator(a, b) for a in rows for b in rows]
    S = span(X, [g for g in gens if not g.is_identity()])
    while True:
        new = []
        for h in S.rows:
            for r in rows:
                for sign in (1, -1):
                    w = X.conjugate(h, X.power(r, sign))
                    if not S.contains(w):
                        new.append(w)
        if not new:
            return S
        S = span(X, list(S.rows) + new)


# ---------------------------------------------------------------------------
# quotients


def quotient(X: PcPresentation, N: Subgroup, name: str | None = None):
    """Quotient presentation and the projection homomorphism.

    Raises NotNormal when a conjugate of an N-row escapes N.
    """
    from .homs import Homomorphism

    if not is_normal(X, N):
        raise NotNormal(f"subgroup is not normal in {X.name}")
    n = X.ngens
    new_orders: list[int | None] = []
    kept: list[int] = []
    for i in range(n):
        row = N.row_at(i)
        m = X.orders[i] if row is None else row.exps[i]
        if m == 1:
            continue
        kept.append(i)
        new_orders.append(m)
    pos = {i: k for k, i in enumerate(kept)}

    def rewrite(u: Element) -> list[int]:
        vec = list(u.exps)
        out = [0] * len(kept)
        while True:
            i = next((k for k, e in enumerate(vec) if e), None)
            if i is None:
                return out
            e = vec[i]
            row = N.row_at(i)
            if i in pos:
                m = new_orders[pos[i]]
                c = e % m if m is not None else e
                out[pos[i]] = c
                head = [0] * n
                X._mul_letter(head, i, -c)
                vec = X._mul_vecs(head, vec)
                if row is not None and vec[i]:
                    k = vec[i] // row.exps[i]
                    vec = X._mul_vecs(X._pow_vec(row.exps, -k), vec)
            else:
                vec = X._mul_vecs(X._pow_vec(row.exps, -e), vec)
            assert vec[i] == 0

    qname = name if name is not None else f"{X.name}/N"
    names = [X.gen_names[i] for i in kept]
    weights = [X.weights[i] for i in kept]

    def to_word(vec: list[int]) -> list[tuple[int, int]]:
        return [(k, e) for k, e in enumerate(vec) if e]

    power_words: dict[int, list[tuple[int, int]]] = {}
    conj_words: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for k, i in enumerate(kept):
        m = new_orders[k]
        if m is not None:
            power_words[k] = to_word(rewrite(X.power(X.generator(i), m)))
    for ka, ia in enumerate(kept):
        for kb, ib in enumerate(kept):
            if ia < ib:
                img = Element(X, X._conj1[ia][ib])
                conj_words[(ka, kb)] = to_word(rewrite(img))
    Q = PcPresentation(qname, names, new_orders, weights, power_words, conj_words)
    images = [Q.element(rewrite(X.generator(i))) for i in range(n)]

    def section(qelem: Element) -> Element:
        word = [(kept[k], e) for k, e in enumerate(qelem.exps) if e]
        return X.normal_form(word)

    proj = Homomorphism(X, Q, images, section=section)
    return Q, proj


# ---------------------------------------------------------------------------
# series, center, torsion


def lower_central_series(X: PcPresentation) -> list[Subgroup]:
    if "lcs" in X._memo:
        return X._memo["lcs"]
    series = [whole_group(X)]
    while not series[-1].is_trivial():
        current = series[-1]
        comms = [X.commutator(h, g) for h in current.rows for g in X.generators]
        nxt = normal_closure(X, [c for c in comms if not c.is_identity()])
        if nxt == current:
            raise PresentationError("lower central series does not descend")
        series.append(nxt)
    X._memo["lcs"] = series
    return series


def nilpotency_class(X: PcPresentation) -> int:
    return len(lower_central_series(X)) - 1


def is_abelian(X: PcPresentation) -> bool:
    return all(
        X._conj1[i][j] == X._unit(j)
        for i in range(X.ngens)
        for j in range(i + 1, X.ngens)
    )


def center(X: PcPresentation) -> Subgroup:
    if "center" in X._memo:
        return X._memo["center"]
    result = _center_uncached(X)
    X._memo["center"] = result
    return result


def _suffix_block_relations(X: PcPresentation, start: int) -> list[list[int]]:
    """Relation lattice of the deepest weight block in its own coordinates."""
    width = X.ngens - start
    rel = []
    for i in range(start, X.ngens):
        r = X.orders[i]
        if r is None:
            continue
        row = [0] * width
        row[i - start] = r
        tail = X._power_tail_vec[i]
        for k in range(start, X.ngens):
            row[k - start] -= tail[k]
        rel.append(row)
    return rel


def _center_uncached(X: PcPresentation) -> Subgroup:
    if X.ngens == 0 or is_abelian(X):
        return whole_group(X)
    wmax = max(X.weights)
    start = X.weight_block_start(wmax)
    deep = span(X, [X.generator(i) for i in range(start, X.ngens)])
    Q, proj = quotient(X, deep, name=f"{X.name}/deep")
    zq = center(Q)
    lifted = [proj.preimage(r) for r in zq.rows]
    P = span(X, lifted + list(deep.rows))
    # Commutation with each generator is a homomorphism P -> deepest block
    # (the block is central), so the centralizing elements of P form the
    # kernel of an integer congruence system plus the derived subgroup.
    width = X.ngens - start
    rel = _suffix_block_relations(X, start)
    mat = []
    for row in P.rows:
        entry: list[int] = []
        for i in range(X.ngens):
            com = X.commutator(row, X.generator(i))
            assert all(com.exps[k] == 0 for k in range(start)), "commutator escapes block"
            entry.extend(com.exps[start:])
        mat.append(entry)
    stacked_rel = []
    for i in range(X.ngens):
        for r in rel:
            padded = [0] * (width * X.ngens)
            padded[i * width:(i + 1) * width] = r
            stacked_rel.append(padded)
    kernel = lattice.congruence_kernel_rel(mat, stacked_rel)
    gens = list(derived_subgroup_of_rows(X, list(P.rows)).rows)
    for t in kernel:
        acc = X.identity
        for coeff, row in zip(t, P.rows):
            acc = X.multiply(acc, X.power(row, coeff))
        gens.append(acc)
    return span(X, gens)


def abelian_relation_rows(X: PcPresentation, S: Subgroup) -> list[list[int]]:
    """Relation lattice of an abelian subgroup over its own rows."""
    rel = []
    s = len(S.rows)
    leads = [r.leading_index() for r in S.rows]
    for j, (row, m) in enumerate(zip(S.rows, S.relative_orders())):
        if m is None:
            continue
        tail = S.express(X.power(row, m))
        assert tail is not None
        vec = [0] * s
        vec[j] = m
        for lead, t in tail.items():
            vec[leads.index(lead)] -= t
        rel.append(vec)
    return rel


def torsion_subgroup(X: PcPresentation) -> Subgroup:
    if "torsion" in X._memo:
        return X._memo["torsion"]
    T = trivial_subgroup(X)
    while True:
        if T.is_trivial():
            Q, proj = X, None
        else:
            Q, proj = quotient(X, T, name=f"{X.name}/tors")
        C = center(Q)
        rel = abelian_relation_rows(Q, C)
        s = len(C.rows)
        new_gens: list[Element] = []
        if s and rel:
            _, diag, _, vinv = lattice._snf_with_inverse(rel)
            for i in range(min(len(rel), s)):
                if diag[i][i]:
                    acc = Q.identity
                    for coeff, row in zip(vinv[i], C.rows):
                        acc = Q.multiply(acc, Q.power(row, coeff))
                    if not acc.is_identity():
                        new_gens.append(acc)
        if not new_gens:
            X._memo["torsion"] = T
            return T
        if proj is None:
            T = span(X, new_gens)
        else:
            T = span(X, [proj.preimage(g) for g in new_gens] + list(T.rows))


def torsion_primes(X: PcPresentation) -> set[int]:
    from .primes import factorize

    T = torsion_subgroup(X)
    n = T.order()
    assert n is not None
    return set(factorize(n)) if n > 1 else set()


def exponent_of(S: Subgroup) -> int:
    """Exact exponent of a finite subgroup."""
    if S.order() is None:
        raise ExponentRequested("exponent of an infinite subgroup requested")
    e = 1
    for u in S.elements():
        e = lcm(e, u.order())
    return e


# ---------------------------------------------------------------------------
# verbal subgroups


def verbal_power_subgroup(X: PcPresentation, q: int, cap: int = ENUMERATION_CAP) -> Subgroup:
    """The subgroup generated by all q-th powers; normal (verbal) in X."""
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return whole_group(X)
    key = ("verbal", q)
    if key in X._memo:
        return X._memo[key]
    S = normal_closure(X, [X.power(g, q) for g in X.generators])
    while True:
        Q, proj = quotient(X, S, name=f"{X.name}^^{q}")
        order = Q.order()
        if order is None:
            raise SearchBoundsExceeded("verbal power quotient unexpectedly infinite")
        if order > cap:
            raise SearchBoundsExceeded(
                f"verbal power quotient of order {order} exceeds cap {cap}"
            )
        missing = []
        for qelem in all_elements(Q):
            if not Q.power(qelem, q).is_identity():
                missing.append(X.power(proj.preimage(qelem), q))
        if not missing:
            X._memo[key] = S
            return S
        S = normal_closure(X, list(S.rows) + missing)


def all_elements(Q: PcPresentation, cap: int = ENUMERATION_CAP) -> list[Element]:
    """Every element of a finite presentation, deterministic order."""
    order = Q.order()
    if order is None:
        raise ExponentRequested("cannot enumerate an infinite group")
    if order > cap:
        raise SearchBoundsExceeded(f"group of order {order} exceeds cap {cap}")
    out = [Q.identity]
    for i in range(Q.ngens):
        g = Q.generator(i)
        powers = [Q.power(g, t) for t in range(Q.orders[i])]
        out = [Q.multiply(u, p) for u in out for p in powers]
    return out


# ---------------------------------------------------------------------------
# induced presentations and subgroup indices


def subgroup_presentation(X: PcPresentation, S: Subgroup, name: str | None = None):
    """Present a subgroup on its own rows.

    Returns (P, embed, pull): embed maps P-elements into X, pull maps
    members of S to P-elements.
    """
    rows = S.rows
    s = len(rows)
    rel_orders = S.relative_orders()
    leads = [r.leading_index() for r in rows]
    lead_pos = {lead: j for j, lead in enumerate(leads)}
    names = [f"s{j + 1}" for j in range(s)]
    weights = [X.weights[i] for i in leads]

    def expr_to_word(u: Element) -> list[tuple[int, int]]:
        coeffs = S.express(u)
        assert coeffs is not None, "closure violated in subgroup presentation"
        return [(lead_pos[i], t) for i, t in sorted(coeffs.items()) if t]

    power_words: dict[int, list[tuple[int, int]]] = {}
    conj_words: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for j in range(s):
        m = rel_orders[j]
        if m is not None:
            w = expr_to_word(X.power(rows[j], m))
            assert all(k > j for k, _ in w)
            power_words[j] = w
    for j in range(s):
        for k in range(j + 1, s):
            conj_words[(j, k)] = expr_to_word(X.conjugate(rows[k], rows[j]))
    P = PcPresentation(
        name if name is not None else f"{X.name}|sub",
        names,
        rel_orders,
        weights,
        power_words,
        conj_words,
    )

    def embed(u: Element) -> Element:
        acc = X.identity
        for j, e in enumerate(u.exps):
            if e:
                acc = X.multiply(acc, X.power(rows[j], e))
        return acc

    def pull(u: Element) -> Element:
        coeffs = S.express(u)
        assert coeffs is not None, "element outside subgroup"
        vec = [0] * s
        for i, t in coeffs.items():
            vec[lead_pos[i]] = t
        return P.element(vec)

    return P, embed, pull


def subgroup_index(X: PcPresentation, T: Subgroup, S: Subgroup) -> int | None:
    """Index [T : S] for S <= T; None when infinite."""
    for r in S.rows:
        if not T.contains(r):
            raise ValueError("S is not contained in T")
    P, embed, pull = subgroup_presentation(X, T)
    inner = span(P, [pull(r) for r in S.rows])
    idx = 1
    for j in range(P.ngens):
        row = inner.row_at(j)
        if row is None:
            if P.orders[j] is None:
                return None
            idx *= P.orders[j]
        else:
            idx *= row.exps[j]
    return idx


def intersect_with_normal(X: PcPresentation, A: Subgroup, N: Subgroup) -> Subgroup:
    """A  intersect  N for a normal N of finite index (Schreier generators).

    Works whenever the image of A in X/N is finite, which holds here since
    X/N is finite in every use.
    """
    Q, proj = quotient(X, N, name=f"{X.name}/n")
    if Q.order() is None:
        raise SearchBoundsExceeded("intersection requires a finite quotient")
    # BFS over the image of A in the finite quotient, tracking representatives
    reps: dict[tuple[int, ...], Element] = {Q.identity.exps: X.identity}
    frontier = [Q.identity.exps]
    arrows = []
    for r in A.rows:
        arrows.append((r, proj.apply(r)))
        arrows.append((X.inverse(r), proj.apply(X.inverse(r))))
    while frontier:
        state = frontier.pop(0)
        u_rep = reps[state]
        for x_arrow, q_arrow in arrows:
            nxt = Q.multiply(Element(Q, state), q_arrow).exps
            if nxt not in reps:
                reps[nxt] = X.multiply(u_rep, x_arrow)
                frontier.append(nxt)
    gens = []
    for state, u_rep in reps.items():
        for x_arrow, q_arrow in arrows:
            nxt = Q.multiply(Element(Q, state), q_arrow).exps
            schreier = X.multiply(X.multiply(u_rep, x_arrow), X.inverse(reps[nxt]))
            if not schreier.is_identity():
                gens.append(schreier)
    return span(X, gens)
