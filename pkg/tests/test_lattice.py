import random

from hypothesis import given, settings, strategies as st

from nilsep.lattice import (
    congruence_kernel,
    express_in_lattice,
    hnf_rows,
    kernel_rows,
    lattice_member,
    mat_identity,
    mat_mul,
    section_canonical,
    section_index,
    section_intersection,
    section_member,
    section_saturation,
    smith_normal_form,
    snf_diagonal,
    solve_linear,
    xgcd,
)
from nilsep.primes import PrimeSet


def is_unimodular(m):
    d = snf_diagonal(m)
    return all(abs(x) == 1 for x in d) and len(d) == len(m)


def test_xgcd():
    for a, b in [(6, 10), (0, 5), (-4, 6), (0, 0), (-3, -9)]:
        x, y, g = xgcd(a, b)
        assert x * a + y * b == g
        assert g >= 0


def test_snf_fixed_cases():
    assert snf_diagonal([[6, 0], [0, 10]]) == [2, 30]
    assert snf_diagonal([[0, 0], [0, 0]]) == [0, 0]
    assert snf_diagonal(mat_identity(3)) == [1, 1, 1]
    assert snf_diagonal([[3, 0, 1], [0, 3, 0]]) == [1, 3]


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=5),
       st.integers(min_value=0, max_value=10**6))
def test_snf_properties(nr, nc, seed):
    rng = random.Random(seed)
    m = [[rng.randint(-50, 50) for _ in range(nc)] for _ in range(nr)]
    u, s, v = smith_normal_form(m)
    assert mat_mul(mat_mul(u, m), v) == s
    assert is_unimodular(u) and is_unimodular(v)
    diag = [s[i][i] for i in range(min(nr, nc))]
    for i in range(nr):
        for j in range(nc):
            if i != j:
                assert s[i][j] == 0
    for a, b in zip(diag, diag[1:]):
        if a:
            assert b % a == 0
        else:
            assert b == 0
        assert a >= 0


def test_hnf_membership_and_express():
    basis = hnf_rows([[2, 0, 4], [0, 3, 1]], 3)
    assert lattice_member(basis, [2, 3, 5])
    assert not lattice_member(basis, [1, 0, 0])
    c = express_in_lattice(basis, [4, 3, 9])
    assert c is not None
    acc = [0, 0, 0]
    for q, row in zip(c, basis):
        acc = [a + q * b for a, b in zip(acc, row)]
    assert acc == [4, 3, 9]


def test_kernel_and_solve():
    m = [[2, 4], [1, 2], [0, 0]]
    ker = kernel_rows(m, 2)
    for k in ker:
        prod = [sum(k[i] * m[i][j] for i in range(3)) for j in range(2)]
        assert prod == [0, 0]
    # x*(rows) == (3, 6) has the solution x = (0, 3, anything)
    sol = solve_linear(m, [3, 6], 2)
    assert sol is not None
    prod = [sum(sol[i] * m[i][j] for i in range(3)) for j in range(2)]
    assert prod == [3, 6]
    assert solve_linear(m, [1, 0], 2) is None


def test_section_saturation_z():
    # Z: the subgroup 12Z with primes {2} saturates to 4Z
    rows = section_saturation([0], [[12]], PrimeSet.explicit(2))
    assert section_canonical([0], rows) == section_canonical([0], [[4]])
    # with all primes every subgroup is already saturated
    rows = section_saturation([0], [[12]], PrimeSet.all_primes())
    assert section_canonical([0], rows) == section_canonical([0], [[12]])
    # saturating the whole group is a no-op
    rows = section_saturation([0], [[1]], PrimeSet.explicit(3))
    assert section_canonical([0], rows) == section_canonical([0], [[1]])


def test_section_saturation_idempotent_monotone():
    rng = random.Random(7)
    moduli = [0, 0, 8]
    p = PrimeSet.explicit(2)
    for _ in range(40):
        rows = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(2)]
        sat = section_saturation(moduli, rows, p)
        sat2 = section_saturation(moduli, sat, p)
        assert section_canonical(moduli, sat) == section_canonical(moduli, sat2)
        # monotone: enlarge the subgroup, saturation cannot shrink
        bigger = rows + [[rng.randint(-6, 6) for _ in range(3)]]
        satb = section_saturation(moduli, bigger, p)
        for row in sat:
            assert section_member(moduli, satb, list(row))


def test_section_saturation_primitive_vector_untouched():
    # <(3,1)> in Z^2 is already isolated: (3,1) is primitive
    for p in (PrimeSet.explicit(2), PrimeSet.explicit(3)):
        sat = section_saturation([0, 0], [[3, 1]], p)
        assert section_canonical([0, 0], sat) == section_canonical([0, 0], [[3, 1]])


def test_section_intersection_and_index():
    # 4Z and 6Z intersect in 12Z
    inter = section_intersection([0], [[4]], [[6]])
    assert section_canonical([0], inter) == section_canonical([0], [[12]])
    assert section_index([0], [[4]], [[12]]) == 3
    assert section_index([0, 0], [[1, 0], [0, 1]], [[2, 0], [0, 3]]) == 6
    assert section_index([0, 0], [[1, 0], [0, 1]], [[5, 0]]) is None
    # inside Z/4 x Z/2: <(2,1)> has order 2, index 4
    assert section_index([4, 2], [[1, 0], [0, 1]], [[2, 1]]) == 4


def test_congruence_kernel():
    # x * (2) == 0 mod 8  <=>  x mod 4 == 0
    ker = congruence_kernel([[2]], [8])
    assert section_canonical([0], ker) == section_canonical([0], [[4]])
