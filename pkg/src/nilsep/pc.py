"""Polycyclic presentations of finitely generated nilpotent groups.

A presentation lists generators g_1..g_n with relative orders (an integer
>= 2 or None for infinite), a positive weight per generator, power
relations g_i^{r_i} = word(g_{i+1}..g_n) for the finite-order generators,
and conjugation relations g_j^{g_i} = word(g_{i+1}..g_n) for i < j.
Weights must be non-decreasing along the sequence and every conjugation
relation must move g_j strictly up in weight; that certifies a central
series whose terms are the suffix subgroups of each weight block, and it
is what every algorithm downstream leans on.

Elements are exponent vectors in collected normal form.  Multiplication
is collection from the left: letters of the right factor are folded in
one at a time, conjugating the displaced tail.  Large exponents never
expand into long words; conjugation automorphisms and element powers are
raised by repeated squaring.
"""

from __future__ import annotations

from math import gcd

from .errors import (
    InconsistentPresentation,
    NotNilpotent,
    PresentationError,
    UnknownGenerator,
)

Word = tuple[tuple[int, int], ...]


class Element:
    """A group element in collected normal form.

    Immutable; `exps[i]` is the exponent of the i-th generator, reduced
    into [0, r_i) when the relative order r_i is finite.
    """

    __slots__ = ("group", "exps")

    def __init__(self, group: "PcPresentation", exps: tuple[int, ...]):
        self.group = group
        self.exps = exps

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.group is other.group
            and self.exps == other.exps
        )

    def __hash__(self):
        return hash((id(self.group), self.exps))

    def __mul__(self, other: "Element") -> "Element":
        return self.group.multiply(self, other)

    def __pow__(self, k: int) -> "Element":
        return self.group.power(self, k)

    def inverse(self) -> "Element":
        return self.group.inverse(self)

    def is_identity(self) -> bool:
        return not any(self.exps)

    def leading_index(self) -> int | None:
        for i, e in enumerate(self.exps):
            if e:
                return i
        return None

    def order(self) -> int | None:
        return self.group.order_of(self)

    def __repr__(self):
        return f"<{self.group.describe_element(self)}>"


class PcPresentation:
    """A consistent, nilpotency-certified polycyclic presentation.

    Construction validates structure, derives inverse conjugation data,
    certifies the weight function, and runs the standard consistency
    overlaps.  Invalid input raises; nothing is repaired.
    """

    def __init__(
        self,
        name: str,
        gen_names: list[str],
        orders: list[int | None],
        weights: list[int],
        power_words: dict[int, list[tuple[int, int]]],
        conj_words: dict[tuple[int, int], list[tuple[int, int]]],
        check: bool = True,
    ):
        self.name = name
        self.gen_names = tuple(gen_names)
        self.orders = tuple(orders)
        self.weights = tuple(weights)
        self.ngens = len(self.gen_names)
        self.power_words: dict[int, Word] = {
            i: tuple((int(a), int(b)) for a, b in w) for i, w in power_words.items()
        }
        self.conj_words: dict[tuple[int, int], Word] = {
            (i, j): tuple((int(a), int(b)) for a, b in w)
            for (i, j), w in conj_words.items()
        }
        self._index = {nm: i for i, nm in enumerate(self.gen_names)}
        self._validate_structure()
        # conjugation images by generator sign; filled for i descending
        self._conj1: list[dict[int, tuple[int, ...]]] = [dict() for _ in range(self.ngens)]
        self._conj1inv: list[dict[int, tuple[int, ...]]] = [dict() for _ in range(self.ngens)]
        self._power_tail_vec: dict[int, tuple[int, ...]] = {}
        self._conj_pow_memo: dict[tuple[int, int], dict[int, tuple[int, ...]]] = {}
        self._memo: dict = {}  # scratch for derived structures (series, center, ...)
        self._initialize_tables()
        if check:
            self._check_consistency()

    # -- construction ------------------------------------------------------

    def _validate_structure(self):
        if len(set(self.gen_names)) != self.ngens:
            raise PresentationError("duplicate generator names")
        if len(self.orders) != self.ngens or len(self.weights) != self.ngens:
            raise PresentationError("orders/weights length mismatch")
        for r in self.orders:
            if r is not None and r < 2:
                raise PresentationError("relative orders must be >= 2 or infinite")
        for w in self.weights:
            if w < 1:
                raise PresentationError("weights must be positive")
        for a, b in zip(self.weights, self.weights[1:]):
            if b < a:
                raise PresentationError(
                    "generator weights must be non-decreasing along the pc sequence"
                )
        for i, r in enumerate(self.orders):
            if r is None and i in self.power_words:
                raise PresentationError(
                    f"power relation given for infinite-order generator {self.gen_names[i]}"
                )
            if r is not None and i not in self.power_words:
                raise PresentationError(
                    f"missing power relation for finite-order generator {self.gen_names[i]}"
                )
        for i, w in self.power_words.items():
            for j, _ in w:
                if not i < j < self.ngens:
                    raise PresentationError(
                        f"power relation of {self.gen_names[i]} must use later generators"
                    )
        for (i, j), w in self.conj_words.items():
            if not 0 <= i < j < self.ngens:
                raise PresentationError("conjugation relations require i < j")
            for k, _ in w:
                if not i < k < self.ngens:
                    raise PresentationError(
                        f"conjugate of {self.gen_names[j]} by {self.gen_names[i]}"
                        " must be a word in later generators"
                    )

    def _initialize_tables(self):
        """Collect relation words, certify weights, derive inverse images.

        Processed for i descending: collecting a word in g_{i+1}..g_n only
        consults conjugation data of later generators, which is complete
        by the time generator i is handled.
        """
        n = self.ngens
        bound = (max(self.weights) if n else 0) + 2
        for i in range(n - 1, -1, -1):
            if i in self.power_words:
                self._power_tail_vec[i] = tuple(self._collect_word(self.power_words[i]))
            for j in range(i + 1, n):
                word = self.conj_words.get((i, j))
                img = self._unit(j) if word is None else tuple(self._collect_word(word))
                if img[j] != 1 or any(img[k] for k in range(j)):
                    raise NotNilpotent(
                        f"conjugate of {self.gen_names[j]} by {self.gen_names[i]}"
                        f" does not have the form {self.gen_names[j]} * tail"
                    )
                for k in range(j + 1, n):
                    if img[k] and self.weights[k] <= self.weights[j]:
                        raise NotNilpotent(
                            f"conjugation tail of {self.gen_names[j]} by"
                            f" {self.gen_names[i]} fails to climb in weight"
                        )
                self._conj1[i][j] = img
            phi = self._conj1[i]
            for j in range(i + 1, n):
                target = list(self._unit(j))
                x = target[:]
                for _ in range(bound):
                    fx = self._apply_aut(phi, x)
                    if fx == target:
                        break
                    delta = self._mul_vecs(self._inv_vec(fx), target)
                    x = self._mul_vecs(x, delta)
                else:
                    raise NotNilpotent(
                        f"could not invert conjugation by {self.gen_names[i]}"
                    )
                self._conj1inv[i][j] = tuple(x)

    def _check_consistency(self):
        n = self.ngens
        g = [self.generator(i) for i in range(n)]
        mul, pw = self.multiply, self.power
        for k in range(n):
            for j in range(k):
                for i in range(j):
                    if mul(g[k], mul(g[j], g[i])) != mul(mul(g[k], g[j]), g[i]):
                        raise InconsistentPresentation(
                            f"overlap {self.gen_names[k]}({self.gen_names[j]}"
                            f"{self.gen_names[i]}) fails"
                        )
        for j in range(n):
            rj = self.orders[j]
            for i in range(j):
                ri = self.orders[i]
                if rj is not None:
                    if mul(pw(g[j], rj), g[i]) != mul(pw(g[j], rj - 1), mul(g[j], g[i])):
                        raise InconsistentPresentation(
                            f"power overlap {self.gen_names[j]}^{rj}"
                            f" {self.gen_names[i]} fails"
                        )
                if ri is not None:
                    if mul(g[j], pw(g[i], ri)) != mul(mul(g[j], g[i]), pw(g[i], ri - 1)):
                        raise InconsistentPresentation(
                            f"power overlap {self.gen_names[j]}"
                            f" {self.gen_names[i]}^{ri} fails"
                        )
                # inverse overlap exercises the derived inverse conjugation
                if mul(mul(g[j], self.inverse(g[i])), g[i]) != g[j]:
                    raise InconsistentPresentation(
                        f"inverse overlap {self.gen_names[j]}"
                        f" {self.gen_names[i]}^-1 fails"
                    )
        for i in range(n):
            ri = self.orders[i]
            if ri is not None:
                if mul(pw(g[i], ri), g[i]) != mul(g[i], pw(g[i], ri)):
                    raise InconsistentPresentation(
                        f"power overlap {self.gen_names[i]}^{ri}"
                        f" {self.gen_names[i]} fails"
                    )

    # -- resolution --------------------------------------------------------

    def gen_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r} in group {self.name!r}")

    def generator(self, i) -> Element:
        if isinstance(i, str):
            i = self.gen_index(i)
        return Element(self, self._unit(i))

    @property
    def generators(self) -> list[Element]:
        return [self.generator(i) for i in range(self.ngens)]

    @property
    def identity(self) -> Element:
        return Element(self, (0,) * self.ngens)

    def is_finite(self) -> bool:
        return all(r is not None for r in self.orders)

    def order(self) -> int | None:
        """Group order; None when infinite."""
        if not self.is_finite():
            return None
        total = 1
        for r in self.orders:
            total *= r
        return total

    def hirsch_length(self) -> int:
        return sum(1 for r in self.orders if r is None)

    # -- collection core ---------------------------------------------------

    def _unit(self, i: int) -> tuple[int, ...]:
        v = [0] * self.ngens
        v[i] = 1
        return tuple(v)

    def _collect_word(self, word) -> list[int]:
        vec = [0] * self.ngens
        for i, e in word:
            self._mul_letter(vec, i, e)
        return vec

    def _mul_letter(self, vec: list[int], i: int, e: int):
        """vec := vec * g_i^e, in place."""
        if e == 0:
            return
        n = self.ngens
        tail = [(j, vec[j]) for j in range(i + 1, n) if vec[j]]
        for j, _ in tail:
            vec[j] = 0
        a = vec[i] + e
        r = self.orders[i]
        if r is None:
            vec[i] = a
        else:
            vec[i] = a % r
            q = (a - vec[i]) // r
            if q:
                self._mul_vector(vec, self._pow_vec(self._power_tail_vec[i], q))
        if tail:
            images = self._conj_aut(i, e)
            for j, c in tail:
                img = images[j]
                self._mul_vector(vec, self._pow_vec(img, c))

    def _mul_vector(self, vec: list[int], other):
        for j, e in enumerate(other):
            if e:
                self._mul_letter(vec, j, e)

    def _mul_vecs(self, a, b) -> list[int]:
        out = list(a)
        self._mul_vector(out, b)
        return out

    def _inv_vec(self, vec) -> list[int]:
        out = [0] * self.ngens
        for j in range(self.ngens - 1, -1, -1):
            if vec[j]:
                self._mul_letter(out, j, -vec[j])
        return out

    def _pow_vec(self, vec, k: int) -> list[int]:
        if k < 0:
            vec = self._inv_vec(vec)
            k = -k
        out = [0] * self.ngens
        base = list(vec)
        while k:
            if k & 1:
                out = self._mul_vecs(out, base)
            k >>= 1
            if k:
                base = self._mul_vecs(base, base)
        return out

    def _apply_aut(self, images: dict[int, tuple[int, ...]], vec) -> list[int]:
        out = [0] * self.ngens
        for j, e in enumerate(vec):
            if e:
                out = self._mul_vecs(out, self._pow_vec(images[j], e))
        return out

    def _conj_aut(self, i: int, e: int) -> dict[int, tuple[int, ...]]:
        """Images of g_j (j > i) under conjugation by g_i^e."""
        key = (i, e)
        hit = self._conj_pow_memo.get(key)
        if hit is not None:
            return hit
        if e == 1:
            result = self._conj1[i]
        elif e == -1:
            result = self._conj1inv[i]
        else:
            base = self._conj1[i] if e > 0 else self._conj1inv[i]
            k = abs(e)
            acc = None
            sq = base
            while k:
                if k & 1:
                    acc = sq if acc is None else self._compose_auts(acc, sq)
                k >>= 1
                if k:
                    sq = self._compose_auts(sq, sq)
            result = acc
        self._conj_pow_memo[key] = result
        return result

    def _compose_auts(self, first, second) -> dict[int, tuple[int, ...]]:
        """Composite automorphism: apply `first`, then `second`."""
        return {j: tuple(self._apply_aut(second, img)) for j, img in first.items()}

    # -- public operations -------------------------------------------------

    def word(self, factors) -> Word:
        """Resolve [(name-or-index, exp), ...] into an index word."""
        out = []
        for g, e in factors:
            i = self.gen_index(g) if isinstance(g, str) else int(g)
            if not 0 <= i < self.ngens:
                raise UnknownGenerator(f"generator index {i} out of range")
            out.append((i, int(e)))
        return tuple(out)

    def normal_form(self, word) -> Element:
        """Collected normal form of a word [(gen, exp), ...]."""
        return Element(self, tuple(self._collect_word(self.word(word))))

    def element(self, exps) -> Element:
        """Element from a raw exponent vector (normalized by collection)."""
        exps = list(exps)
        if len(exps) != self.ngens:
            raise ValueError("exponent vector has wrong length")
        return self.normal_form(list(zip(range(self.ngens), exps)))

    def multiply(self, u: Element, v: Element) -> Element:
        self._own(u), self._own(v)
        vec = list(u.exps)
        self._mul_vector(vec, v.exps)
        return Element(self, tuple(vec))

    def inverse(self, u: Element) -> Element:
        self._own(u)
        return Element(self, tuple(self._inv_vec(u.exps)))

    def power(self, u: Element, k: int) -> Element:
        self._own(u)
        return Element(self, tuple(self._pow_vec(u.exps, k)))

    def conjugate(self, u: Element, by: Element) -> Element:
        """u^by = by^-1 * u * by."""
        return self.multiply(self.multiply(self.inverse(by), u), by)

    def commutator(self, u: Element, v: Element) -> Element:
        """[u, v] = u^-1 v^-1 u v."""
        return self.multiply(
            self.multiply(self.inverse(u), self.inverse(v)), self.multiply(u, v)
        )

    def order_of(self, u: Element) -> int | None:
        """Order of an element; None when infinite."""
        self._own(u)
        vec = u.exps
        total = 1
        while any(vec):
            k = next(i for i, e in enumerate(vec) if e)
            r = self.orders[k]
            if r is None:
                return None
            d = r // gcd(r, vec[k])
            total *= d
            vec = tuple(self._pow_vec(vec, d))
        return total

    def describe_element(self, u: Element) -> str:
        if u.is_identity():
            return "1"
        parts = [
            f"{self.gen_names[i]}^{e}" for i, e in enumerate(u.exps) if e
        ]
        return " ".join(parts)

    def _own(self, u: Element):
        if u.group is not self:
            raise ValueError("element belongs to a different presentation")

    # -- weight filtration --------------------------------------------------

    def weight_levels(self) -> list[int]:
        """Sorted distinct weights."""
        return sorted(set(self.weights))

    def weight_block_start(self, w: int) -> int:
        """Index of the first generator of weight >= w (ngens if none)."""
        for i, wi in enumerate(self.weights):
            if wi >= w:
                return i
        return self.ngens

    def __repr__(self):
        return f"PcPresentation({self.name!r}, {self.ngens} generators)"


def direct_product(name: str, left: PcPresentation, right: PcPresentation) -> tuple[
    PcPresentation, list[int], list[int]
]:
    """Direct product with generators merged in weight order.

    Returns (product, left_map, right_map) where the maps send old
    generator indices to indices in the product.  Generator names must be
    disjoint.
    """
    if set(left.gen_names) & set(right.gen_names):
        raise PresentationError("direct_product requires disjoint generator names")
    tagged = [(left.weights[i], 0, i) for i in range(left.ngens)] + [
        (right.weights[i], 1, i) for i in range(right.ngens)
    ]
    tagged.sort(key=lambda t: (t[0], t[1], t[2]))
    left_map = [0] * left.ngens
    right_map = [0] * right.ngens
    names, orders, weights = [], [], []
    for new_i, (w, side, old_i) in enumerate(tagged):
        src = left if side == 0 else right
        (left_map if side == 0 else right_map)[old_i] = new_i
        names.append(src.gen_names[old_i])
        orders.append(src.orders[old_i])
        weights.append(w)

    def remap(word: Word, mapping) -> list[tuple[int, int]]:
        return [(mapping[i], e) for i, e in word]

    power_words: dict[int, list[tuple[int, int]]] = {}
    conj_words: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for src, mapping in ((left, left_map), (right, right_map)):
        for i, wrd in src.power_words.items():
            power_words[mapping[i]] = remap(wrd, mapping)
        for (i, j), wrd in src.conj_words.items():
            a, b = mapping[i], mapping[j]
            if a < b:
                conj_words[(a, b)] = remap(wrd, mapping)
            else:
                # weight-stable sort keeps each block in order, so a < b
                raise PresentationError("unexpected generator reordering")
    return (
        PcPresentation(name, names, orders, weights, power_words, conj_words),
        left_map,
        right_map,
    )
