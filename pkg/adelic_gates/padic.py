"""
Bounded-precision p-adic integers.

Every value carries its prime p and precision k explicitly and stores the
canonical residue r in [0, p^k). Operations never extend precision: combining
values of precisions k1 and k2 yields precision min(k1, k2).

The unit group is handled through the decomposition u = zeta^a (1+p)^b mod p^k,
zeta being the smallest generator of (Z/pZ)^*. Those two exponents are exactly
what the M_zeta and P_{1+p} gates consume.
"""

from __future__ import annotations

import logging
import operator
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Union

from sympy import factorint, isprime

from .errors import (
    FormatError,
    InvalidPrimeError,
    NotAUnitError,
    PrecisionError,
    PrimeMismatchError,
    UnsupportedPrimeError,
)

logger = logging.getLogger("adelic_gates.padic")

__all__ = [
    "PadicInt", "PadicUnit", "Valuation", "UnitDecomposition",
    "make", "arith", "inverse", "valuation", "primitive_root",
    "unit_decompose", "recompose", "format_padic", "parse_padic",
    "check_prime",
]

_TOKEN = re.compile(r"^\s*(\d+)\^(\d+):(-?\d+)\s*$")


@lru_cache(maxsize=512)
def check_prime(p: int) -> int:
    """Return p if it is a prime, raise InvalidPrimeError otherwise."""
    if isinstance(p, bool) or not isinstance(p, int) or p < 2 or not isprime(p):
        raise InvalidPrimeError(f"{p!r} is not a prime")
    return p


def _check_precision(k: int) -> int:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise PrecisionError(f"precision exponent must be an integer >= 1, got {k!r}")
    return k


@dataclass(frozen=True)
class Valuation:
    """
    A p-adic valuation read off a residue known mod p^k.

    floor=True marks the precision floor: the residue is 0 mod p^k, so all we
    know is that the true valuation is at least `value` (= k).
    """
    value: int
    floor: bool = False

    @classmethod
    def precision_floor(cls, k: int) -> "Valuation":
        return cls(k, floor=True)

    @property
    def is_finite(self) -> bool:
        return not self.floor

    def __str__(self) -> str:
        return f">={self.value}" if self.floor else str(self.value)

    def to_json(self) -> Union[int, str]:
        return str(self) if self.floor else self.value

    @classmethod
    def from_json(cls, raw: Union[int, str]) -> "Valuation":
        if isinstance(raw, int):
            return cls(raw)
        text = str(raw).strip()
        if text.startswith(">="):
            return cls(int(text[2:]), floor=True)
        try:
            return cls(int(text))
        except ValueError as e:
            raise FormatError(f"bad valuation {raw!r}") from e


@dataclass(frozen=True, eq=False)
class PadicInt:
    """An element of Z_p known modulo p^k, stored as its residue r in [0, p^k)."""
    p: int
    k: int
    r: int

    def __post_init__(self):
        check_prime(self.p)
        _check_precision(self.k)
        if not 0 <= self.r < self.p ** self.k:
            raise PrecisionError(f"residue {self.r} outside [0, {self.p}^{self.k})")

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def is_unit(self) -> bool:
        return self.r % self.p != 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicInt):
            return NotImplemented
        return (self.p, self.k, self.r) == (other.p, other.k, other.r)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.r))

    def __int__(self) -> int:
        return self.r

    def __str__(self) -> str:
        return format_padic(self)

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return make(self.p, self.k, other)
        return NotImplemented

    def _binary(self, other, op: Callable[[int, int], int], reflected: bool = False):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _apply(op, other, self) if reflected else _apply(op, self, other)

    def __add__(self, other):
        return self._binary(other, operator.add)

    def __radd__(self, other):
        return self._binary(other, operator.add, reflected=True)

    def __sub__(self, other):
        return self._binary(other, operator.sub)

    def __rsub__(self, other):
        return self._binary(other, operator.sub, reflected=True)

    def __mul__(self, other):
        return self._binary(other, operator.mul)

    def __rmul__(self, other):
        return self._binary(other, operator.mul, reflected=True)

    def __neg__(self) -> "PadicInt":
        return make(self.p, self.k, -self.r)

    def __pow__(self, exponent: int) -> "PadicInt":
        if exponent < 0:
            return make(self.p, self.k, inverse(self).r) ** (-exponent)
        return make(self.p, self.k, pow(self.r, exponent, self.modulus))

    def reduce(self, k: int) -> "PadicInt":
        """Forget digits beyond p^k (k may not exceed the current precision)."""
        _check_precision(k)
        if k > self.k:
            raise PrecisionError(f"cannot raise precision from {self.k} to {k}")
        return make(self.p, k, self.r)

    def valuation(self) -> Valuation:
        return valuation(self)


@dataclass(frozen=True, eq=False)
class PadicUnit(PadicInt):
    """A PadicInt whose residue is prime to p."""

    def __post_init__(self):
        super().__post_init__()
        if self.r % self.p == 0:
            raise NotAUnitError(f"{format_padic(self)} is not a p-adic unit")

    @classmethod
    def of(cls, x: PadicInt) -> "PadicUnit":
        if isinstance(x, PadicUnit):
            return x
        return cls(x.p, x.k, x.r)


@dataclass(frozen=True)
class UnitDecomposition:
    """Exponents with zeta^a * (1+p)^b == u (mod p^k)."""
    a: int
    b: int
    p: int
    k: int
    zeta: int


# --------------------------------------------------------------------------- #
# Operations                                                                  #
# --------------------------------------------------------------------------- #
def make(p: int, k: int, n: int) -> PadicInt:
    """The image of the integer n in Z/p^k, as a PadicInt."""
    check_prime(p)
    _check_precision(k)
    return PadicInt(p, k, n % p ** k)


def _apply(op: Callable[[int, int], int], x: PadicInt, y: PadicInt) -> PadicInt:
    if x.p != y.p:
        raise PrimeMismatchError(f"cannot combine {x.p}-adic and {y.p}-adic values")
    k = min(x.k, y.k)
    return PadicInt(x.p, k, op(x.r, y.r) % x.p ** k)


_ARITH_OPS: Dict[str, Callable[[int, int], int]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


def arith(op: str, x: PadicInt, y: PadicInt) -> PadicInt:
    """
    Residue arithmetic at precision min(x.k, y.k).

    Args:
        op: one of "add", "sub", "mul"
        x: left operand
        y: right operand, over the same prime

    Raises:
        PrimeMismatchError: If x and y live over different primes
    """
    try:
        fn = _ARITH_OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(_ARITH_OPS)}") from None
    return _apply(fn, x, y)


def inverse(u: PadicInt) -> PadicUnit:
    """Multiplicative inverse of a unit mod p^k."""
    if u.r % u.p == 0:
        raise NotAUnitError(f"{format_padic(u)} is not invertible")
    return PadicUnit(u.p, u.k, pow(u.r, -1, u.modulus))


def valuation(x: PadicInt) -> Valuation:
    """Largest v <= k with p^v | r; the precision-floor marker when r == 0."""
    if x.r == 0:
        return Valuation.precision_floor(x.k)
    v, r = 0, x.r
    while r % x.p == 0:
        r //= x.p
        v += 1
    return Valuation(v)


@lru_cache(maxsize=256)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^* for an odd prime p."""
    check_prime(p)
    if p == 2:
        raise UnsupportedPrimeError("primitive_root: p = 2 is not supported")
    order = p - 1
    prime_factors = list(factorint(order))
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in prime_factors):
            logger.debug(f"primitive root mod {p}: {g}")
            return g
    raise AssertionError(f"no primitive root found mod {p}")


def unit_decompose(u: PadicInt) -> UnitDecomposition:
    """
    Write a unit as zeta^a (1+p)^b mod p^k.

    a is the discrete log of u mod p found by exhaustive search over the p-1
    candidates; b in [0, p^(k-1)) is fixed one base-p digit at a time, digit j
    being the unique d making (1+p)^b agree with the target mod p^(j+1).

    Raises:
        NotAUnitError: If u is divisible by p
        UnsupportedPrimeError: If p == 2
    """
    u = PadicUnit.of(u)
    p, k = u.p, u.k
    zeta = primitive_root(p)
    m = u.modulus

    target = u.r % p
    a = next(e for e in range(p - 1) if pow(zeta, e, p) == target)

    w = u.r * pow(zeta, -a, m) % m  # == 1 mod p
    base = 1 + p
    b = 0
    for j in range(1, k):
        step = p ** (j - 1)
        modulus = p ** (j + 1)
        for d in range(p):
            candidate = b + d * step
            if pow(base, candidate, modulus) == w % modulus:
                b = candidate
                break
        else:
            raise AssertionError(f"digit lifting failed for {format_padic(u)} at digit {j}")

    logger.debug(f"unit_decompose({format_padic(u)}) = zeta^{a} (1+p)^{b} with zeta={zeta}")
    return UnitDecomposition(a=a, b=b, p=p, k=k, zeta=zeta)


def recompose(dec: UnitDecomposition) -> PadicUnit:
    """zeta^a (1+p)^b mod p^k."""
    m = dec.p ** dec.k
    r = pow(dec.zeta, dec.a, m) * pow(1 + dec.p, dec.b, m) % m
    return PadicUnit(dec.p, dec.k, r)


def format_padic(x: PadicInt) -> str:
    """Text encoding `p^k:r`, e.g. 5^3:63."""
    return f"{x.p}^{x.k}:{x.r}"


def parse_padic(text: str) -> PadicInt:
    """Parse `p^k:r`; r may be any integer and is reduced mod p^k."""
    match = _TOKEN.match(text)
    if not match:
        raise FormatError(f"expected a p-adic token of the form p^k:r, got {text!r}")
    p, k, n = (int(g) for g in match.groups())
    return make(p, k, n)
