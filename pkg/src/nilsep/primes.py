"""Prime sets and the arithmetic of P-numbers.

A root class of groups enters every computation in this package only
through the set of primes dividing element orders of its members, so a
prime set is the entire class datum.  Three representations are supported:
an explicit finite set, the complement of a finite set, and the set of all
primes.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; n is a positive integer.

    Inputs here are exponents and subgroup indices at desk scale, so no
    attempt is made at large-number factoring.
    """
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n > 1 and factorize(n) == {n: 1}


@dataclass(frozen=True)
class PrimeSet:
    """A nonempty set of primes, possibly cofinite or all primes.

    mode is one of "explicit", "cofinite" (all primes except `primes`) and
    "all".  The cofinite mode exists because the *complement* is often the
    naturally given datum; membership is O(len) either way.
    """

    mode: str
    primes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.mode not in ("explicit", "cofinite", "all"):
            raise ValueError(f"bad prime-set mode {self.mode!r}")
        ps = tuple(sorted(set(self.primes)))
        object.__setattr__(self, "primes", ps)
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.mode == "explicit" and not ps:
            raise ValueError("an explicit prime set must be nonempty")
        if self.mode == "all" and ps:
            raise ValueError("mode 'all' takes no primes")

    @staticmethod
    def explicit(*primes: int) -> "PrimeSet":
        return PrimeSet("explicit", tuple(primes))

    @staticmethod
    def all_primes() -> "PrimeSet":
        return PrimeSet("all")

    @staticmethod
    def all_except(*primes: int) -> "PrimeSet":
        return PrimeSet("cofinite", tuple(primes))

    def __contains__(self, p: int) -> bool:
        if self.mode == "all":
            return is_prime(p)
        if self.mode == "explicit":
            return p in self.primes
        return is_prime(p) and p not in self.primes

    def complement_contains(self, p: int) -> bool:
        """Membership of p in the complementary prime set."""
        return is_prime(p) and p not in self

    def describe(self) -> str:
        if self.mode == "all":
            return "all"
        body = ",".join(str(p) for p in self.primes)
        return body if self.mode == "explicit" else f"all-except:{body}"

    def __str__(self) -> str:
        return self.describe()


def is_p_number(n: int, primes: PrimeSet) -> bool:
    """True iff every prime factor of n lies in the set.  1 qualifies."""
    if n < 1:
        raise ValueError("P-numbers are positive")
    return all(p in primes for p in factorize(n))


def is_p_prime_number(n: int, primes: PrimeSet) -> bool:
    """True iff no prime factor of n lies in the set (a P'-number)."""
    if n < 1:
        raise ValueError("P'-numbers are positive")
    return all(p not in primes for p in factorize(n))


def p_split(n: int, primes: PrimeSet) -> tuple[int, int]:
    """Split n = nP * nP' into its P-part and coprime P'-part."""
    if n < 1:
        raise ValueError("p_split expects a positive integer")
    np_, npp = 1, 1
    for p, e in factorize(n).items():
        if p in primes:
            np_ *= p**e
        else:
            npp *= p**e
    return np_, npp


def p_part(n: int, primes: PrimeSet) -> int:
    return p_split(n, primes)[0]


def p_prime_part(n: int, primes: PrimeSet) -> int:
    return p_split(n, primes)[1]


def p_prime_numbers_up_to(bound: int, primes: PrimeSet):
    """All P'-numbers q with 1 <= q <= bound, ascending."""
    return [q for q in range(1, bound + 1) if is_p_prime_number(q, primes)]


def parse_prime_spec(spec: str) -> PrimeSet:
    """Parse the command-line prime-set syntax.

    Accepted forms: "2,3" (explicit), "all", "all-except:2,3".
    """
    spec = spec.strip()
    if spec == "all":
        return PrimeSet.all_primes()
    if spec.startswith("all-except:"):
        body = spec[len("all-except:"):]
        try:
            ps = tuple(int(tok) for tok in body.split(",") if tok != "")
        except ValueError as exc:
            raise ValueError(f"bad prime list in {spec!r}") from exc
        return PrimeSet.all_except(*ps)
    try:
        ps = tuple(int(tok) for tok in spec.split(",") if tok != "")
    except ValueError as exc:
        raise ValueError(f"bad prime list in {spec!r}") from exc
    if not ps:
        raise ValueError("empty prime list")
    return PrimeSet.explicit(*ps)
