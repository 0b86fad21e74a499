#!/usr/bin/env python3

import logging
import sys

import pytest
from sympy import primerange
from sympy.ntheory import primitive_root as sympy_primitive_root

from adelic_gates.errors import (
    FormatError,
    InvalidPrimeError,
    NotAUnitError,
    PrecisionError,
    PrimeMismatchError,
    UnsupportedPrimeError,
)
from adelic_gates.padic import (
    PadicInt,
    PadicUnit,
    UnitDecomposition,
    Valuation,
    arith,
    format_padic,
    inverse,
    make,
    parse_padic,
    primitive_root,
    recompose,
    unit_decompose,
    valuation,
)

logger = logging.getLogger("test_padic")


@pytest.mark.parametrize("p,k,n,expected", [
    (5, 3, 126, 1),
    (5, 3, -1, 124),
    (3, 2, 9, 0),
])
def test_make_reduces_to_canonical_residue(p, k, n, expected):
    x = make(p, k, n)
    assert (x.p, x.k, x.r) == (p, k, expected)


def test_make_rejects_bad_prime_and_precision():
    with pytest.raises(InvalidPrimeError):
        make(4, 2, 1)
    with pytest.raises(InvalidPrimeError):
        make(1, 2, 1)
    with pytest.raises(PrecisionError):
        make(5, 0, 1)
    with pytest.raises(PrecisionError):
        PadicInt(5, 2, 25)


def test_arith_examples():
    two, inv_two = make(5, 3, 2), make(5, 3, 63)
    assert arith("mul", two, inv_two) == make(5, 3, 1)
    x = make(5, 3, 77)
    assert arith("add", x, make(5, 3, 0)) == x
    assert arith("sub", make(5, 3, 3), make(5, 3, 4)) == make(5, 3, 124)


def test_mixed_precision_takes_the_minimum():
    result = arith("mul", make(5, 3, 7), make(5, 2, 3))
    assert result.k == 2
    assert result.r == 21


def test_arith_rejects_mismatched_primes_and_unknown_ops():
    with pytest.raises(PrimeMismatchError):
        arith("add", make(5, 2, 1), make(3, 2, 1))
    with pytest.raises(ValueError):
        arith("div", make(5, 2, 1), make(5, 2, 1))


def test_operators_match_arith():
    x = make(5, 3, 2)
    assert x * 63 == make(5, 3, 1)
    assert 3 - make(5, 2, 4) == make(5, 2, 24)
    assert -x == make(5, 3, 123)
    assert x ** 3 == make(5, 3, 8)
    assert x ** -1 == make(5, 3, 63)
    assert make(5, 3, 126).reduce(1) == make(5, 1, 1)
    with pytest.raises(PrecisionError):
        make(5, 2, 1).reduce(3)


@pytest.mark.parametrize("p,k,u,expected", [
    (5, 3, 2, 63),
    (5, 3, 1, 1),
    (5, 3, 124, 124),
])
def test_inverse_examples(p, k, u, expected):
    assert inverse(make(p, k, u)).r == expected


def test_inverse_of_non_unit_fails():
    with pytest.raises(NotAUnitError):
        inverse(make(5, 3, 10))
    with pytest.raises(NotAUnitError):
        PadicUnit(5, 3, 25)


def test_inverse_exhaustive_small_ring():
    for r in range(1, 27):
        if r % 3:
            u = make(3, 3, r)
            assert (u * inverse(u)).r == 1


GRID = [(p, k) for p in (3, 5, 7) for k in (1, 2, 3)]


@pytest.mark.parametrize("p,k", GRID)
def test_inverse_of_random_units(rng, p, k):
    m = p ** k
    for _ in range(1000):
        r = rng.randrange(1, m)
        if r % p == 0:
            r += 1
        u = make(p, k, r)
        assert (inverse(u) * u).r == 1
        assert (u * inverse(u)) == make(p, k, 1)


@pytest.mark.parametrize("p,k", GRID)
def test_valuation_is_additive_up_to_the_precision(rng, p, k):
    m = p ** k
    for _ in range(500):
        x = make(p, k, p ** rng.randrange(k + 1) * rng.randrange(m))
        y = make(p, k, p ** rng.randrange(k + 1) * rng.randrange(m))
        vx, vy, vxy = valuation(x), valuation(y), valuation(x * y)
        if vx.floor or vy.floor or vx.value + vy.value >= k:
            assert vxy == Valuation.precision_floor(k)
        else:
            assert vxy == Valuation(vx.value + vy.value)


@pytest.mark.parametrize("p,k", GRID)
def test_ring_axioms(rng, p, k):
    m = p ** k
    zero, one = make(p, k, 0), make(p, k, 1)
    for _ in range(300):
        x, y, z = (make(p, k, rng.randrange(m)) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert (x + y) * z == x * z + y * z
        assert x + y == y + x and x * y == y * x
        assert x + zero == x and x * one == x
        assert x - x == zero
        assert arith("sub", x, y) == x + (-y)


def test_valuation_examples():
    assert valuation(make(5, 3, 50)) == Valuation(2)
    assert valuation(make(5, 3, 7)) == Valuation(0)
    floor = valuation(make(5, 3, 0))
    assert floor.floor and floor.value == 3
    assert str(floor) == ">=3"
    assert floor.to_json() == ">=3"
    assert Valuation.from_json(">=3") == floor
    assert Valuation.from_json(2) == Valuation(2)
    with pytest.raises(FormatError):
        Valuation.from_json("many")


@pytest.mark.parametrize("p,expected", [(3, 2), (5, 2), (7, 3)])
def test_primitive_root_examples(p, expected):
    assert primitive_root(p) == expected


def test_primitive_root_matches_sympy():
    for p in primerange(3, 200):
        assert primitive_root(p) == sympy_primitive_root(p)


def test_primitive_root_rejects_two():
    with pytest.raises(UnsupportedPrimeError):
        primitive_root(2)


def test_unit_decompose_examples():
    dec = unit_decompose(make(5, 2, 7))
    assert (dec.a, dec.b, dec.zeta) == (1, 3, 2)
    assert (unit_decompose(make(5, 2, 1)).a, unit_decompose(make(5, 2, 1)).b) == (0, 0)
    dec = unit_decompose(make(5, 1, 2))
    assert (dec.a, dec.b) == (1, 0)


@pytest.mark.parametrize("p,k", GRID + [(11, 2)])
def test_unit_decompose_recomposes_every_unit(p, k):
    m = p ** k
    for r in range(1, m):
        if r % p == 0:
            continue
        dec = unit_decompose(make(p, k, r))
        assert 0 <= dec.a < p - 1
        assert 0 <= dec.b < p ** (k - 1)
        assert recompose(dec).r == r


def test_unit_decompose_rejects_non_units():
    with pytest.raises(NotAUnitError):
        unit_decompose(make(5, 2, 10))
    with pytest.raises(UnsupportedPrimeError):
        unit_decompose(make(2, 3, 3))


def test_recompose_takes_a_decomposition():
    assert recompose(UnitDecomposition(a=1, b=3, p=5, k=2, zeta=2)).r == 7


def test_text_format():
    assert format_padic(make(5, 3, 63)) == "5^3:63"
    assert str(make(5, 3, 63)) == "5^3:63"
    assert parse_padic("5^3:63") == make(5, 3, 63)
    assert parse_padic(" 5^3:-1 ") == make(5, 3, 124)
    for bad in ("5:63", "5^3", "x^3:1", "5^3:1.5"):
        with pytest.raises(FormatError):
            parse_padic(bad)
    with pytest.raises(InvalidPrimeError):
        parse_padic("6^2:1")


if __name__ == "__main__":
    logging.basicConfig(level=logging.DEBUG,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    sys.exit(pytest.main([__file__, "-v"]))
