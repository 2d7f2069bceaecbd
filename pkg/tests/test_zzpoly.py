import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from arboreal import zzpoly
from arboreal.fqpoly import RamifiedPrime, frobenius_signature
from arboreal.intfactor import FactorizationIncomplete, factor_integer, is_certified_prime
from arboreal.zzpoly import (
    SquareClassVector,
    adjusted_orbit,
    compose_poly,
    critical_orbit,
    discriminant,
    evaluate,
    irreducible_witness,
    iterate,
    quartic_galois,
    quartic_is_irreducible,
    resultant,
    square_class_rank,
    squarefree_kernel,
    surjectivity_certificate,
)

import oracles


def test_iterate_examples():
    assert iterate(1, 1) == [1, 0, 1]
    assert iterate(1, 2) == [2, 0, 2, 0, 1]
    # (x^4 + 2x^2 + 2)^2 + 1 expanded term by term
    assert iterate(1, 3) == [5, 0, 8, 0, 8, 0, 4, 0, 1]
    assert zzpoly.to_string(iterate(1, 3)) == "x^8 + 4*x^6 + 8*x^4 + 8*x^2 + 5"


def test_iterate_guard():
    with pytest.raises(ValueError):
        iterate(1, 17)
    with pytest.raises(ValueError):
        iterate(1, 0)


@pytest.mark.parametrize("c", [-3, -2, -1, 1, 2, 3])
def test_iterate_monic_degree_and_constant_term(c):
    for n in range(1, 7):
        f = iterate(c, n)
        assert len(f) - 1 == 2**n and f[-1] == 1
        assert f[0] == critical_orbit(c, n)[-1]


@pytest.mark.parametrize("c", [-2, 1, 3])
def test_iterate_composition_law(c):
    for m in range(1, 4):
        for n in range(1, 7 - m):
            assert iterate(c, m + n) == compose_poly(iterate(c, m), iterate(c, n))


def test_iterate_substitution_oracle():
    f = [1, 0, 1]
    g = f
    for n in range(2, 6):
        g = compose_poly(g, f)  # f^(n-1)(f(x))
        assert g == iterate(1, n)


def test_critical_orbit():
    assert critical_orbit(1, 4) == [1, 2, 5, 26]
    t, orbit = 0, []
    for _ in range(6):
        t = t * t + 1
        orbit.append(t)
    assert critical_orbit(1, 6) == orbit
    assert orbit[-2:] == [677, 458330]
    assert critical_orbit(-2, 3) == [-2, 2, 2]


def test_adjusted_orbit():
    assert adjusted_orbit(1, 3) == [-1, 2, 5]
    assert adjusted_orbit(-2, 2) == [2, 2]
    assert adjusted_orbit(3, 3) == [-3, 12, 147]


def test_discriminant_examples():
    assert discriminant([1, 0, 1]) == -4
    assert discriminant(iterate(1, 2)) == 512
    assert resultant(iterate(1, 2), [1]) == 1
    assert discriminant([1, 1, 0, 0, 1]) == 229
    with pytest.raises(ValueError):
        resultant([], [1, 1])


@pytest.mark.parametrize("f", [[1, 0, 1], [2, 0, 2, 0, 1], [1, 1, 0, 0, 1], [5, 0, 8, 0, 8, 0, 4, 0, 1], [-3, 2, 0, 1]])
def test_discriminant_vs_root_product(f):
    assert discriminant(f) == oracles.numeric_discriminant(f)


def test_quadratic_discriminant_formula():
    for c in range(-5, 6):
        assert discriminant([c, 0, 1]) == -4 * c


@pytest.mark.parametrize("c", [-3, -2, 1, 2, 3])
def test_discriminant_recursion(c):
    prev = discriminant(iterate(c, 1))
    for n in range(2, 6):
        cur = discriminant(iterate(c, n))
        ratio, r = divmod(cur, prev**2 * critical_orbit(c, n)[-1])
        assert r == 0
        ratio = abs(ratio)
        assert ratio & (ratio - 1) == 0
        prev = cur
    assert discriminant(iterate(1, 2)) == 16 * discriminant(iterate(1, 1)) ** 2 * 2


def test_discriminant_degenerate_c_minus_1():
    # 0 is periodic for x^2 - 1, so f^2 = x^4 - 2x^2 has a double root
    assert critical_orbit(-1, 2)[-1] == 0
    assert discriminant(iterate(-1, 2)) == 0
    for q in (3, 5, 7, 101):
        with pytest.raises(RamifiedPrime):
            frobenius_signature(-1, 2, q)


def test_factor_integer_examples():
    assert factor_integer(1) == (1, {})
    assert factor_integer(-12) == (-1, {2: 2, 3: 1})
    assert factor_integer(458330) == (1, {2: 1, 5: 1, 45833: 1})
    assert all(45833 % d for d in range(2, math.isqrt(45833) + 1))
    with pytest.raises(ValueError):
        factor_integer(0)


def test_factor_integer_large_semiprimes():
    p, q = 1000000007, 998244353
    assert factor_integer(p * q * (2**61 - 1)) == (1, {q: 1, p: 1, 2**61 - 1: 1})
    assert factor_integer(-(2**31 - 1) ** 3 * 9) == (-1, {3: 2, 2**31 - 1: 3})


def test_factor_integer_effort_bound():
    big = (2**89 - 1) * (2**107 - 1)
    with pytest.raises(FactorizationIncomplete):
        factor_integer(big, effort=1000)
    with pytest.raises(FactorizationIncomplete) as exc:
        factor_integer(3 * (2**127 - 1))
    assert exc.value.partial == {3: 1}


@settings(max_examples=300, deadline=None)
@given(st.integers(-(10**15), 10**15).filter(lambda m: m != 0))
def test_factor_integer_multiplies_back(m):
    sign, fac = factor_integer(m)
    assert sign * math.prod(p**e for p, e in fac.items()) == m
    assert all(is_certified_prime(p) for p in fac)


def test_is_certified_prime_against_sieve():
    limit = 5000
    sieve = [True] * limit
    sieve[0] = sieve[1] = False
    for i in range(2, limit):
        if sieve[i]:
            for j in range(i * i, limit, i):
                sieve[j] = False
    assert [n for n in range(limit) if is_certified_prime(n)] == [n for n in range(limit) if sieve[n]]
    # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_certified_prime(3215031751)


def test_squarefree_kernel_examples():
    assert squarefree_kernel(12).value == 3
    assert squarefree_kernel(-4).value == -1
    assert str(squarefree_kernel(-4)) == "-1"
    assert squarefree_kernel(1) == SquareClassVector(1)


@settings(max_examples=200, deadline=None)
@given(st.integers(-(10**6), 10**6).filter(bool), st.integers(1, 10**4))
def test_kernel_ignores_squares(m, k):
    assert squarefree_kernel(m * k * k) == squarefree_kernel(m)


def test_square_class_rank_examples():
    ker = lambda vals: [squarefree_kernel(v) for v in vals]
    assert square_class_rank(ker([-1, 2, 5])) == 3
    assert square_class_rank(ker([2, 2])) == 1
    assert square_class_rank(ker([1])) == 0
    assert square_class_rank(ker([-3, 12, 147])) == 2
    assert square_class_rank(ker([6, 10, 15])) == 2
    assert square_class_rank(ker([-1, 2, 5, 26, 677, 458330])) == 6


def test_square_class_rank_vs_subset_products():
    """Rank r iff exactly 2^r distinct square classes among subset products."""
    rng = random.Random(4)
    for _ in range(50):
        vals = [rng.choice([-1, 1]) * rng.randrange(1, 200) for _ in range(rng.randrange(1, 5))]
        classes = set()
        for mask in range(1 << len(vals)):
            prod = math.prod(v for i, v in enumerate(vals) if mask >> i & 1)
            classes.add(squarefree_kernel(prod))
        assert len(classes) == 2 ** square_class_rank([squarefree_kernel(v) for v in vals])


def test_irreducible_witness_examples():
    assert irreducible_witness(1, 1, [3, 5]) == 3
    assert irreducible_witness(1, 2, [3, 5, 7]) == 3
    assert pow(3, 2, 7) == 2  # 2 is a square mod 7
    assert irreducible_witness(-2, 1, [7]) is None


def test_irreducible_witness_mod3_exhaustive():
    # x^4 + 2x^2 + 2 mod 3: no linear or quadratic monic factor
    assert oracles.brute_factor_degrees(iterate(1, 2), 3) == {4: 1}


def test_certificate_c1():
    cert = surjectivity_certificate(1, 3)
    assert [lv.verdict for lv in cert.levels] == ["holds"] * 3
    assert [lv.kernel.value for lv in cert.levels] == [-1, 2, 5]
    assert [lv.witness for lv in cert.levels] == [3, 3, 3]


def test_certificate_inconclusive_cases():
    cert = surjectivity_certificate(-2, 2)
    assert [lv.verdict for lv in cert.levels] == ["holds", "inconclusive"]
    cert = surjectivity_certificate(3, 3)
    assert [lv.verdict for lv in cert.levels] == ["holds", "holds", "inconclusive"]
    with pytest.raises(ValueError):
        surjectivity_certificate(0, 2)


def test_certificate_budget_failure_is_inconclusive():
    cert = surjectivity_certificate(1, 3, effort=0, primes=[3])
    assert cert.holds  # small numbers are handled by trial division alone
    cert = surjectivity_certificate(1, 9, effort=10)
    assert cert.levels[-1].verdict == "inconclusive"
    assert "factorization incomplete" in cert.levels[-1].reason


def test_certificate_json():
    data = json.loads(surjectivity_certificate(1, 3).to_json())
    assert data["c"] == 1 and data["n"] == 3
    assert data["levels"][0] == {"k": 1, "b": -1, "kernel": "-1", "verdict": "holds", "witness": 3}


def test_quartic_galois_examples():
    assert quartic_galois(iterate(1, 2)).name == "D4"
    assert quartic_galois(iterate(1, 2)).order == 8
    assert quartic_galois([1, 0, 0, 0, 1]).name == "V4"
    assert quartic_galois([1, 1, 0, 0, 1]).name == "S4"


@pytest.mark.parametrize(
    "f,name",
    [
        ([1, 1, 1, 1, 1], "C4"),  # 5th cyclotomic
        ([5, 0, -5, 0, 1], "C4"),  # x^4 - 5x^2 + 5
        ([-2, 0, 0, 0, 1], "D4"),  # x^4 - 2
        ([1, 0, -10, 0, 1], "V4"),  # minimal polynomial of sqrt2 + sqrt3
        ([12, 8, 0, 0, 1], "A4"),  # x^4 + 8x + 12
        ([-1, -1, 0, 0, 1], "S4"),
    ],
)
def test_quartic_galois_classical(f, name):
    assert quartic_galois(f).name == name


def test_quartic_reducible_rejected():
    with pytest.raises(ValueError):
        quartic_galois([4, 0, 0, 0, 1])  # (x^2+2x+2)(x^2-2x+2)
    assert not quartic_is_irreducible([1, 0, -2, 0, 1])  # (x^2 - 1)^2
    assert not quartic_is_irreducible([0, -1, 0, 0, 1])  # x^4 - x
    assert not quartic_is_irreducible([3, 1, 4, 1, 1])  # (x^2 + 1)(x^2 + x + 3)
    assert quartic_is_irreducible(iterate(1, 2))


def test_quartic_irreducibility_vs_mod_p_evidence():
    rng = random.Random(9)
    for _ in range(100):
        f = [rng.randrange(-6, 7) for _ in range(4)] + [1]
        if quartic_is_irreducible(f):
            continue
        # reducible over Z must stay reducible mod every prime
        for q in (3, 5, 7):
            assert oracles.brute_factor_degrees(f, q) != {4: 1}
