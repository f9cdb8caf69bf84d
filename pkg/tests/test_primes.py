import pytest
from hypothesis import given, strategies as st

from nilsep.primes import (
    PrimeSet,
    factorize,
    is_p_number,
    is_p_prime_number,
    p_split,
    p_prime_numbers_up_to,
    parse_prime_spec,
)


def test_factorize_small():
    assert factorize(12) == {2: 2, 3: 1}
    assert factorize(1) == {}
    assert factorize(97) == {97: 1}


def test_p_split_examples():
    assert p_split(12, PrimeSet.explicit(2)) == (4, 3)
    assert p_split(7, PrimeSet.all_primes()) == (7, 1)
    assert is_p_number(1, PrimeSet.explicit(5))
    assert is_p_number(1, PrimeSet.all_except(2))


def test_prime_set_modes():
    p = PrimeSet.all_except(2, 3)
    assert 5 in p and 2 not in p and 4 not in p
    assert p.complement_contains(2)
    assert not p.complement_contains(4)
    q = PrimeSet.explicit(3, 2, 2)
    assert q.primes == (2, 3)
    with pytest.raises(ValueError):
        PrimeSet.explicit(4)
    with pytest.raises(ValueError):
        PrimeSet("explicit", ())


@given(st.integers(min_value=1, max_value=10**6),
       st.sets(st.sampled_from([2, 3, 5, 7, 11, 13]), min_size=1))
def test_p_split_roundtrip(n, ps):
    primes = PrimeSet.explicit(*ps)
    a, b = p_split(n, primes)
    assert a * b == n
    from math import gcd
    assert gcd(a, b) == 1
    assert is_p_number(a, primes)
    assert is_p_prime_number(b, primes)


def test_p_prime_numbers_up_to():
    assert p_prime_numbers_up_to(10, PrimeSet.explicit(2)) == [1, 3, 5, 7, 9]
    assert p_prime_numbers_up_to(6, PrimeSet.all_primes()) == [1]


def test_parse_prime_spec():
    assert parse_prime_spec("2,3") == PrimeSet.explicit(2, 3)
    assert parse_prime_spec("all") == PrimeSet.all_primes()
    assert parse_prime_spec("all-except:2,3") == PrimeSet.all_except(2, 3)
    with pytest.raises(ValueError):
        parse_prime_spec("2,four")
    with pytest.raises(ValueError):
        parse_prime_spec("")
