"""
Words for GL_N(Z) over two-generator alphabets.

    N = 2      {Z, X, P}     Z = diag(1, -1), X the swap, P = [[1, 1], [0, 1]]
    N even     {X, P}        X the cyclic shift e_j -> e_(j+1), P = I + E_12
    N odd      {-X, P}

Decomposition is plain integer row reduction with transvections. Each
transvection T_ij(b) is then spelled with the generators: conjugating P^b by
the cyclic shift moves it to (j, j+1), and the commutator
[T_ik(1), T_kj(b)] = T_ij(b) reaches the remaining pairs.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import DimensionError, FormatError, NotInvertibleError
from .plinalg import PadicMatrix, integer_det

logger = logging.getLogger("adelic_gates.zsynth")

__all__ = [
    "IntMatrix", "HRSymbol", "HRWord",
    "hr_generators", "decompose_glnz", "eval_hr", "apply_global", "reduce_mod",
    "format_hr_word", "parse_hr_word", "hr_word_inverse",
]

_TOKENS = {"Xcyc": "X", "Pshift": "P", "NegXcyc": "NX", "Zflip": "Z"}
_NAMES_BY_TOKEN = {v: k for k, v in _TOKENS.items()}
_TOKEN_RE = re.compile(r"^(NX|X|P|Z)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class IntMatrix:
    """An N x N matrix of arbitrary-size integers."""
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise DimensionError(f"expected a non-empty square matrix, got {n} rows")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.n != other.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        columns = list(zip(*other.entries))
        return IntMatrix(tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in columns)
                               for row in self.entries))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-x for x in row) for row in self.entries))

    def det(self) -> int:
        return integer_det(self.entries)

    def rows(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def to_json(self) -> dict:
        return {"n": self.n, "entries": self.rows()}


def hr_generators(n: int) -> Tuple[IntMatrix, IntMatrix]:
    """The cyclic shift X (X e_j = e_(j+1)) and P = I + E_12."""
    if n < 2:
        raise DimensionError(f"GL_N(Z) generators need N >= 2, got {n}")
    x = [[0] * n for _ in range(n)]
    for j in range(n):
        x[(j + 1) % n][j] = 1
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    p[0][1] = 1
    return IntMatrix.from_rows(x), IntMatrix.from_rows(p)


# --------------------------------------------------------------------------- #
# Words                                                                       #
# --------------------------------------------------------------------------- #
def _period(name: str, n: int) -> Optional[int]:
    if name == "Xcyc":
        return n
    if name == "NegXcyc":
        return 2 * n if n % 2 else n
    if name == "Zflip":
        return 2
    return None


@dataclass(frozen=True)
class HRSymbol:
    name: str
    exponent: int

    def __str__(self) -> str:
        token = _TOKENS[self.name]
        return token if self.name == "Zflip" else f"{token}^{self.exponent}"


@dataclass(frozen=True)
class HRWord:
    """
    A word over the GL_N(Z) generators. Powers of periodic generators are
    reduced modulo their order and adjacent powers merged on construction.
    """
    n: int
    symbols: Tuple[HRSymbol, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"GL_N(Z) words need N >= 2, got {self.n}")
        stack: List[Tuple[str, int]] = []
        for s in self.symbols:
            name, exponent = (s.name, s.exponent) if isinstance(s, HRSymbol) else tuple(s)
            if name not in _TOKENS:
                raise FormatError(f"unknown generator {name!r}")
            if name == "NegXcyc" and self.n % 2 == 0:
                raise FormatError("-X is only part of the alphabet for odd N")
            if name == "Xcyc" and self.n % 2:
                raise FormatError("X is only part of the alphabet for even N; use -X")
            if name == "Zflip" and self.n != 2:
                raise FormatError("Z is only part of the alphabet for N = 2")
            if stack and stack[-1][0] == name:
                exponent += stack.pop()[1]
            period = _period(name, self.n)
            if period:
                exponent %= period
            if exponent:
                stack.append((name, exponent))
        object.__setattr__(self, "symbols", tuple(HRSymbol(nm, e) for nm, e in stack))

    def __len__(self) -> int:
        return len(self.symbols)

    def __add__(self, other: "HRWord") -> "HRWord":
        if self.n != other.n:
            raise DimensionError(f"cannot concatenate words for N={self.n} and N={other.n}")
        return HRWord(self.n, self.symbols + other.symbols)

    def __str__(self) -> str:
        return format_hr_word(self)


def format_hr_word(word: HRWord) -> str:
    """Tokens X^m, P^b, NX^m and Z, separated by spaces."""
    return " ".join(str(s) for s in word.symbols)


def parse_hr_word(text: str, n: int) -> HRWord:
    pairs = []
    for token in text.split():
        match = _TOKEN_RE.match(token)
        if not match:
            raise FormatError(f"bad word token {token!r}; expected X^m, P^b, NX^m or Z")
        exponent = int(match.group(2)) if match.group(2) is not None else 1
        pairs.append((_NAMES_BY_TOKEN[match.group(1)], exponent))
    return HRWord(n, tuple(pairs))


def hr_word_inverse(word: HRWord) -> HRWord:
    return HRWord(word.n, tuple((s.name, -s.exponent) for s in reversed(word.symbols)))


# --------------------------------------------------------------------------- #
# Evaluation                                                                  #
# --------------------------------------------------------------------------- #
def _apply_symbol_right(cols: List[List[int]], name: str, exponent: int, n: int) -> List[List[int]]:
    """Right-multiply a matrix given by its columns with one generator power."""
    if name == "Pshift":
        cols[1] = [y + exponent * x for x, y in zip(cols[0], cols[1])]
        return cols
    if name == "Zflip":
        if exponent % 2:
            cols[1] = [-y for y in cols[1]]
        return cols
    # (A X^m) e_j = A e_(j+m)
    shift = exponent % n
    cols = [cols[(j + shift) % n] for j in range(n)]
    if name == "NegXcyc" and exponent % 2:
        cols = [[-x for x in col] for col in cols]
    return cols


def eval_hr(word: HRWord) -> IntMatrix:
    """Exact integer product of the word's generator powers."""
    n = word.n
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    for s in word.symbols:
        cols = _apply_symbol_right(cols, s.name, s.exponent, n)
    return IntMatrix(tuple(zip(*cols)))


def apply_global(g: IntMatrix, vector: Sequence[int]) -> Tuple[int, ...]:
    """Action of a global gate on an integral coefficient vector."""
    if len(vector) != g.n:
        raise DimensionError(f"vector of length {len(vector)} does not fit a {g.n} x {g.n} gate")
    return tuple(sum(a * int(v) for a, v in zip(row, vector)) for row in g.entries)


def reduce_mod(g: IntMatrix, p: int, k: int) -> PadicMatrix:
    """Image of a global gate in GL_N(Z/p^k)."""
    return PadicMatrix.from_rows(p, k, g.entries)


# --------------------------------------------------------------------------- #
# Decomposition                                                               #
# --------------------------------------------------------------------------- #
Transvection = Tuple[int, int, int]  # (i, j, b), 0-based: I + b E_ij


class _RowReducer:
    """Reduces a determinant-one integer matrix to I, recording transvections."""

    def __init__(self, g: IntMatrix):
        self.n = g.n
        self.rows = g.rows()
        self.ops: List[Transvection] = []

    def add(self, i: int, j: int, b: int) -> None:
        """row_i += b row_j, i.e. left multiplication by T_ij(b)."""
        if b:
            self.rows[i] = [x + b * y for x, y in zip(self.rows[i], self.rows[j])]
            self.ops.append((i, j, b))

    def signed_swap(self, s: int, t: int) -> None:
        """(row_s, row_t) -> (row_t, -row_s)."""
        self.add(s, t, 1)
        self.add(t, s, -1)
        self.add(s, t, 1)

    def reduce(self) -> List[Transvection]:
        n, rows = self.n, self.rows
        for t in range(n):
            while True:
                live = [i for i in range(t, n) if rows[i][t] != 0]
                if not live:
                    raise NotInvertibleError("matrix is not in GL_N(Z): singular column")
                pivot = min(live, key=lambda i: (abs(rows[i][t]), i))
                others = [i for i in live if i != pivot]
                if not others:
                    break
                for i in others:
                    self.add(i, pivot, -(rows[i][t] // rows[pivot][t]))
            if pivot != t:
                self.signed_swap(t, pivot)

        negative = [t for t in range(n) if rows[t][t] == -1]
        if any(abs(rows[t][t]) != 1 for t in range(n)) or len(negative) % 2:
            raise NotInvertibleError("matrix is not in SL_N(Z) after row reduction")
        for s, t in zip(negative[::2], negative[1::2]):
            self.signed_swap(s, t)
            self.signed_swap(s, t)

        for t in range(n - 1, -1, -1):
            for i in range(t):
                self.add(i, t, -rows[i][t])
        return self.ops


class _Speller:
    """Spells transvections over the generator alphabet for one N."""

    def __init__(self, n: int):
        self.n = n
        self.cyclic = "NegXcyc" if n % 2 else "Xcyc"

    def transvection(self, i: int, j: int, b: int) -> List[Tuple[str, int]]:
        n = self.n
        if j == (i + 1) % n:
            return [(self.cyclic, i), ("Pshift", b), (self.cyclic, -i)]
        k = (i + 1) % n
        # [T_ik(1), T_kj(b)] = T_ik(1) T_kj(b) T_ik(-1) T_kj(-b)
        return (self.transvection(i, k, 1) + self.transvection(k, j, b)
                + self.transvection(i, k, -1) + self.transvection(k, j, -b))


def _single_generator(g: IntMatrix) -> Optional[HRWord]:
    n = g.n
    if g == IntMatrix.identity(n):
        return HRWord(n)
    candidates = []
    p_b = g[0, 1]
    if p_b:
        candidates.append(("Pshift", p_b))
    if n == 2:
        candidates.append(("Zflip", 1))
    cyclic = "NegXcyc" if n % 2 else "Xcyc"
    candidates += [(cyclic, m) for m in range(1, _period(cyclic, n))]
    for name, exponent in candidates:
        word = HRWord(n, ((name, exponent),))
        if eval_hr(word) == g:
            return word
    return None


def decompose_glnz(g: IntMatrix) -> HRWord:
    """
    Write g in GL_N(Z) as a word over the alphabet for its size.

    Raises:
        NotInvertibleError: If |det g| != 1
    """
    n = g.n
    if n < 2:
        raise DimensionError(f"GL_N(Z) decomposition needs N >= 2, got {n}")
    d = g.det()
    if abs(d) != 1:
        raise NotInvertibleError(f"matrix is not in GL_{n}(Z): det = {d}")

    single = _single_generator(g)
    if single is not None:
        return single

    prefix: List[Tuple[str, int]] = []
    suffix: List[Tuple[str, int]] = []
    h = g
    if d == -1:
        if n == 2:
            # g = (g Z) Z
            h = IntMatrix(tuple((row[0], -row[1]) for row in g.entries))
            suffix = [("Zflip", 1)]
        elif n % 2 == 0:
            # the n-cycle is odd: g = X (X^-1 g)
            x, _ = hr_generators(n)
            x_inv = IntMatrix(tuple(zip(*x.entries)))
            h = x_inv @ g
            prefix = [("Xcyc", 1)]
        else:
            # -I = (-X)^n is central
            h = -g
            suffix = [("NegXcyc", n)]
        logger.debug(f"decompose_glnz: det -1 folded into {prefix or suffix}")

    ops = _RowReducer(h).reduce()
    logger.debug(f"decompose_glnz: {len(ops)} transvections for N={n}")
    speller = _Speller(n)
    body: List[Tuple[str, int]] = []
    # E_m ... E_1 h = I, so h = E_1^-1 ... E_m^-1
    for i, j, b in ops:
        body += speller.transvection(i, j, -b)
    return HRWord(n, tuple(prefix + body + suffix))
