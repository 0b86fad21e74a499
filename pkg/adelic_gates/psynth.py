"""
Gate synthesis over GL_2(Z_p) and GL_N(Z_p) for odd primes.

The generator alphabet is

    X      = [[0, 1], [1, 0]]
    P-     = [[1, 0], [1, 1]]          P-^m = [[1, 0], [m, 1]]
    Mz     = diag(zeta, 1)             zeta the smallest primitive root mod p
    P1p    = diag(1 + p, 1)

A determinant-one matrix with a unit lower-left entry c factors as

    [[a, b], [c, d]] = U(-(1-a)/c) . L(c) . U(-(1-d)/c)

with L(t) = P-^t and U(t) = X P-^t X. The determinant is peeled off first as
diag(u, 1) = Mz^a P1p^b, and a non-unit c is repaired by one row swap. The
transposed identity L(x) . U(b) . L(y) (b a unit) is available as an
alternative strategy.

GL_N inputs go through the Smith normal form: every elementary factor becomes
one two-level gate whose 2 x 2 word acts on a coordinate pair.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .config import get_settings
from .errors import (
    BudgetExceededError,
    DimensionError,
    FormatError,
    NotInvertibleError,
    QubitIndexError,
    UnsupportedPrimeError,
)
from .padic import PadicInt, check_prime, inverse, make, primitive_root, unit_decompose
from .plinalg import (
    ElementaryMatrix,
    PadicMatrix,
    embed_block,
    is_gl,
    smith_normal_form,
)

logger = logging.getLogger("adelic_gates.psynth")

__all__ = [
    "GateSymbol", "GateWord", "TwoLevelGate", "ReachabilityReport",
    "eval_word", "synth_gl2", "synth_gln", "bfs_oracle", "embed_two_level",
    "format_word", "parse_word", "word_inverse", "gl2_order", "generator_matrix",
    "SYMBOL_NAMES", "STRATEGIES", "MAX_WORD_LENGTH",
]

SYMBOL_NAMES = ("X", "Pminus", "Mzeta", "P1p")
STRATEGIES = ("swap", "transpose")
MAX_WORD_LENGTH = 32

_TOKENS = {"X": "X", "Pminus": "P-", "Mzeta": "Mz", "P1p": "P1p"}
_NAMES_BY_TOKEN = {v: k for k, v in _TOKENS.items()}
_TOKEN_RE = re.compile(r"^(X|P-|Mz|P1p)(?:\^(-?\d+))?$")


def _check_odd(p: int) -> None:
    check_prime(p)
    if p == 2:
        raise UnsupportedPrimeError("the generators X, P-, Mz, P1p are only complete for odd p")


# --------------------------------------------------------------------------- #
# Words                                                                       #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class GateSymbol:
    name: str
    exponent: int = 1

    def __post_init__(self):
        if self.name not in SYMBOL_NAMES:
            raise FormatError(f"unknown generator {self.name!r}; expected one of {SYMBOL_NAMES}")
        if self.exponent == 0:
            raise ValueError("generator exponents must be nonzero")
        if self.name == "X" and self.exponent != 1:
            raise ValueError("X is an involution; its exponent is always 1")

    def __str__(self) -> str:
        token = _TOKENS[self.name]
        return token if self.name == "X" else f"{token}^{self.exponent}"


def _merge(pairs: Iterable[Tuple[str, int]]) -> Tuple[GateSymbol, ...]:
    stack: List[Tuple[str, int]] = []
    for name, exponent in pairs:
        if name == "X":
            exponent %= 2
        if exponent == 0:
            continue
        if stack and stack[-1][0] == name:
            combined = stack[-1][1] + exponent
            if name == "X":
                combined %= 2
            stack.pop()
            if combined:
                stack.append((name, combined))
        else:
            stack.append((name, exponent))
    return tuple(GateSymbol(name, exponent) for name, exponent in stack)


@dataclass(frozen=True)
class GateWord:
    """
    An ordered product of generator powers at precision p^k.

    Construction normalizes the symbols: X^2 cancels, adjacent powers of the
    same generator are merged, and zero exponents disappear.
    """
    p: int
    k: int
    symbols: Tuple[GateSymbol, ...] = ()

    def __post_init__(self):
        check_prime(self.p)
        pairs = [(s.name, s.exponent) if isinstance(s, GateSymbol) else tuple(s)
                 for s in self.symbols]
        object.__setattr__(self, "symbols", _merge(pairs))

    @classmethod
    def from_pairs(cls, p: int, k: int, pairs: Iterable[Tuple[str, int]]) -> "GateWord":
        return cls(p, k, tuple(pairs))

    def __len__(self) -> int:
        return len(self.symbols)

    def __add__(self, other: "GateWord") -> "GateWord":
        if (self.p, self.k) != (other.p, other.k):
            raise ValueError(f"cannot concatenate words at {self.p}^{self.k} and {other.p}^{other.k}")
        return GateWord(self.p, self.k, self.symbols + other.symbols)

    def __str__(self) -> str:
        return format_word(self)


@dataclass(frozen=True)
class TwoLevelGate:
    """A 2 x 2 word acting on the coordinate pair (i, j), 1-based, i < j."""
    coords: Tuple[int, int]
    word: GateWord

    def __post_init__(self):
        i, j = self.coords
        if not 1 <= i < j:
            raise QubitIndexError(f"two-level gates need coordinates 1 <= i < j, got {self.coords}")

    def to_json(self) -> dict:
        return {"coords": list(self.coords), "word": format_word(self.word)}


def format_word(word: GateWord) -> str:
    """Whitespace-separated tokens X, P-^m, Mz^a, P1p^b; the empty word is ''."""
    return " ".join(str(s) for s in word.symbols)


def parse_word(text: str, p: int, k: int) -> GateWord:
    pairs = []
    for token in text.split():
        match = _TOKEN_RE.match(token)
        if not match:
            raise FormatError(f"bad word token {token!r}; expected X, P-^m, Mz^a or P1p^b")
        name = _NAMES_BY_TOKEN[match.group(1)]
        pairs.append((name, int(match.group(2)) if match.group(2) is not None else 1))
    return GateWord(p, k, tuple(pairs))


def word_inverse(word: GateWord) -> GateWord:
    return GateWord(word.p, word.k,
                    tuple((s.name, -s.exponent) for s in reversed(word.symbols)))


# --------------------------------------------------------------------------- #
# Evaluation                                                                  #
# --------------------------------------------------------------------------- #
Quad = Tuple[int, int, int, int]


def _quad_mul(x: Quad, y: Quad, m: int) -> Quad:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % m, (a * f + b * h) % m,
            (c * e + d * g) % m, (c * f + d * h) % m)


def _symbol_quad(name: str, exponent: int, p: int, m: int) -> Quad:
    if name == "X":
        return (0, 1, 1, 0) if exponent % 2 else (1, 0, 0, 1)
    if name == "Pminus":
        return (1, 0, exponent % m, 1)
    if name == "Mzeta":
        return (pow(primitive_root(p), exponent, m), 0, 0, 1)
    return (pow(1 + p, exponent, m), 0, 0, 1)


def generator_matrix(name: str, p: int, k: int, exponent: int = 1) -> PadicMatrix:
    """The 2 x 2 matrix of one generator power."""
    _check_odd(p)
    a, b, c, d = _symbol_quad(name, exponent, p, p ** k)
    return PadicMatrix.from_rows(p, k, [[a, b], [c, d]])


def eval_word(word: GateWord) -> PadicMatrix:
    """Ordered product of the generator powers of a word, mod p^k."""
    _check_odd(word.p)
    m = word.p ** word.k
    acc: Quad = (1, 0, 0, 1)
    for s in word.symbols:
        acc = _quad_mul(acc, _symbol_quad(s.name, s.exponent, word.p, m), m)
    a, b, c, d = acc
    return PadicMatrix.from_rows(word.p, word.k, [[a, b], [c, d]])


def embed_two_level(gates: Sequence[TwoLevelGate], n: int, p: int, k: int) -> PadicMatrix:
    """Ordered product of two-level gates, each embedded at its coordinate pair."""
    result = PadicMatrix.identity(p, k, n)
    for gate in gates:
        i, j = gate.coords
        if j > n:
            raise QubitIndexError(f"coordinate pair {gate.coords} exceeds dimension {n}")
        result = result @ embed_block(eval_word(gate.word), n, i, j)
    return result


# --------------------------------------------------------------------------- #
# GL_2 synthesis                                                              #
# --------------------------------------------------------------------------- #
def _unit_pairs(u: PadicInt) -> List[Tuple[str, int]]:
    """Mz^a P1p^b with zeta^a (1+p)^b == u."""
    dec = unit_decompose(u)
    return [("Mzeta", dec.a), ("P1p", dec.b)]


def _upper(t: int) -> List[Tuple[str, int]]:
    return [("X", 1), ("Pminus", t), ("X", 1)]


def _sl2_pairs(q: Quad, p: int, k: int, strategy: str) -> Optional[List[Tuple[str, int]]]:
    """Unipotent factorization of a determinant-one matrix, or None if no pivot fits."""
    m = p ** k
    a, b, c, d = q
    if c % p:
        c_inv = pow(c, -1, m)
        x = (a - 1) * c_inv % m
        y = (d - 1) * c_inv % m
        return _upper(x) + [("Pminus", c)] + _upper(y)
    if strategy == "transpose" and b % p:
        b_inv = pow(b, -1, m)
        x = (d - 1) * b_inv % m
        y = (a - 1) * b_inv % m
        return [("Pminus", x)] + _upper(b) + [("Pminus", y)]
    return None


def _shortcut(q: Quad, p: int, k: int) -> Optional[List[Tuple[str, int]]]:
    a, b, c, d = q
    if q == (1, 0, 0, 1):
        return []
    if q == (0, 1, 1, 0):
        return [("X", 1)]
    if (a, b, d) == (1, 0, 1):
        return [("Pminus", c)]
    if (a, c, d) == (1, 0, 1):
        return _upper(b)
    if (b, c, d) == (0, 0, 1) and a % p:
        return _unit_pairs(make(p, k, a))
    return None


def synth_gl2(g: PadicMatrix, strategy: str = "swap") -> GateWord:
    """
    Compile g in GL_2(Z_p) into a word over {X, P-, Mz, P1p}.

    Args:
        g: a 2 x 2 matrix with unit determinant, p odd
        strategy: "swap" repairs a non-unit lower-left entry with a row swap;
            "transpose" first tries the transposed identity on a unit
            upper-right entry

    Returns:
        A word w with eval_word(w) == g (mod p^k)

    Raises:
        UnsupportedPrimeError: If p == 2
        NotInvertibleError: If det g is not a unit
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if g.n != 2:
        raise DimensionError(f"synth_gl2 needs a 2 x 2 matrix, got {g.n} x {g.n}")
    p, k, m = g.p, g.k, g.modulus
    _check_odd(p)
    if not is_gl(g):
        raise NotInvertibleError(f"matrix is not in GL_2(Z_{p}): det = {g.det()}")

    q: Quad = (g[0, 0], g[0, 1], g[1, 0], g[1, 1])
    short = _shortcut(q, p, k)
    if short is not None:
        return GateWord(p, k, tuple(short))

    # g = diag(u, 1) . g1 with det g1 = 1
    u = g.det()
    pairs = _unit_pairs(u)
    u_inv = inverse(u).r
    a, b, c, d = q
    g1: Quad = (a * u_inv % m, b * u_inv % m, c, d)
    logger.debug(f"synth_gl2: peeled det {u} as {pairs}")

    tail = _sl2_pairs(g1, p, k, strategy)
    if tail is None:
        # first column of g1 is not divisible by p, so a is a unit: g1 = X . diag(-1, 1) . h
        a1, b1, c1, d1 = g1
        h: Quad = (-c1 % m, -d1 % m, a1, b1)
        logger.debug("synth_gl2: lower-left entry is not a unit, swapping rows")
        tail = [("X", 1)] + _unit_pairs(make(p, k, -1)) + _sl2_pairs(h, p, k, "swap")

    word = GateWord(p, k, tuple(pairs + tail))
    if len(word) > MAX_WORD_LENGTH:
        raise AssertionError(f"word of length {len(word)} exceeds {MAX_WORD_LENGTH}")
    return word


# --------------------------------------------------------------------------- #
# GL_N synthesis                                                              #
# --------------------------------------------------------------------------- #
def _factor_gate(e: ElementaryMatrix, p: int, k: int) -> Optional[TwoLevelGate]:
    if e.kind == "P":
        return TwoLevelGate((min(e.i, e.j), max(e.i, e.j)), GateWord(p, k, (("X", 1),)))
    if e.kind == "T":
        b = e.value.r % p ** k
        if e.i < e.j:
            return TwoLevelGate((e.i, e.j), GateWord(p, k, tuple(_upper(b))))
        return TwoLevelGate((e.j, e.i), GateWord(p, k, (("Pminus", b),)))
    word = GateWord(p, k, tuple(_unit_pairs(make(p, k, e.value.r))))
    if not word.symbols:
        return None
    partner = 2 if e.i == 1 else 1
    if e.i < partner:
        return TwoLevelGate((e.i, partner), word)
    # diag(1, u) on (partner, i) is X . diag(u, 1) . X
    return TwoLevelGate((partner, e.i), GateWord(p, k, (("X", 1),) + word.symbols + (("X", 1),)))


def synth_gln(g: PadicMatrix) -> List[TwoLevelGate]:
    """
    Compile g in GL_N(Z_p) into two-level gates.

    With (prod L) g (prod R) = I from the Smith normal form,
    g = L_m^-1 ... L_1^-1 . R_s^-1 ... R_1^-1, and each inverse factor
    becomes one gate.

    Raises:
        UnsupportedPrimeError: If p == 2
        NotInvertibleError: If det g is not a unit
    """
    _check_odd(g.p)
    if not is_gl(g):
        raise NotInvertibleError(f"matrix is not in GL_{g.n}(Z_{g.p}): det = {g.det()}")
    snf = smith_normal_form(g)
    factors = [e.inverse() for e in reversed(snf.left_factors)]
    factors += [e.inverse() for e in reversed(snf.right_factors)]
    gates = [gate for gate in (_factor_gate(e, g.p, g.k) for e in factors) if gate is not None]
    logger.debug(f"synth_gln: {len(factors)} elementary factors -> {len(gates)} two-level gates")
    return gates


# --------------------------------------------------------------------------- #
# Generation oracle                                                           #
# --------------------------------------------------------------------------- #
def gl2_order(p: int, k: int) -> int:
    """|GL_2(Z/p^k)| = p^(4(k-1)) (p^2 - 1)(p^2 - p)."""
    return p ** (4 * (k - 1)) * (p * p - 1) * (p * p - p)


@dataclass(frozen=True)
class ReachabilityReport:
    p: int
    k: int
    reachable: int
    group_order: int
    complete: bool

    def to_json(self) -> Dict[str, object]:
        return asdict(self)


def bfs_oracle(p: int, k: int, max_elements: Optional[int] = None) -> ReachabilityReport:
    """
    Breadth-first closure of the generators and their inverses in GL_2(Z/p^k).

    Raises:
        BudgetExceededError: If |GL_2(Z/p^k)| exceeds max_elements
            (default: the configured BFS budget)
    """
    _check_odd(p)
    if max_elements is None:
        max_elements = get_settings().bfs_budget
    order = gl2_order(p, k)
    if order > max_elements:
        raise BudgetExceededError(
            f"|GL_2(Z/{p}^{k})| = {order} exceeds the budget of {max_elements} elements")

    m = p ** k
    zeta = primitive_root(p)
    generators = [
        (0, 1, 1, 0),
        (1, 0, 1, 1), (1, 0, m - 1, 1),
        (zeta % m, 0, 0, 1), (pow(zeta, -1, m), 0, 0, 1),
        ((1 + p) % m, 0, 0, 1), (pow(1 + p, -1, m), 0, 0, 1),
    ]
    identity: Quad = (1, 0, 0, 1)
    seen = {identity}
    frontier = deque([identity])
    level = 0
    while frontier:
        level += 1
        for _ in range(len(frontier)):
            current = frontier.popleft()
            for gen in generators:
                nxt = _quad_mul(current, gen, m)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        logger.debug(f"bfs_oracle({p}, {k}): depth {level}, {len(seen)} reached, frontier {len(frontier)}")

    report = ReachabilityReport(p, k, len(seen), order, len(seen) == order)
    logger.info(f"bfs_oracle({p}, {k}): {report.reachable}/{report.group_order} reached")
    return report
