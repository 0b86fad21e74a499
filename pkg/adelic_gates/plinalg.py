"""
Exact matrix algebra over Z_p at a fixed precision p^k.

PadicMatrix holds canonical residues. The Smith normal form works over the
local ring Z_p: pivots are chosen by valuation alone, unit parts are divided
out, and every row/column operation is recorded as one of the three
elementary types

    T_ij(b) = I + b E_ij,    P_ij (swap of i and j),    D_i(u) = I - (1-u) E_ii

so that (prod L) . A . (prod R) == diag(p^e_1, ..., p^e_N) (mod p^k), the
products being taken left to right over the factor lists. ElementaryMatrix
indices are 1-based like the E_ij they describe; PadicMatrix indexing is the
usual 0-based Python indexing.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DimensionError,
    NotAUnitError,
    NotInvertibleError,
    PrecisionError,
    PrimeMismatchError,
    QubitIndexError,
)
from .padic import PadicInt, PadicUnit, Valuation, check_prime, make, valuation

logger = logging.getLogger("adelic_gates.plinalg")

__all__ = [
    "PadicMatrix", "ElementaryMatrix", "SmithDecomposition",
    "mat_mul", "det", "is_gl", "smith_normal_form", "elementary_divisor_check",
    "elementary_to_matrix", "integer_det", "product", "embed_block",
    "matrix_inverse", "random_gl_matrix",
]

MAX_MINOR_CHECK_DIM = 6

Rows = Tuple[Tuple[int, ...], ...]


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for t in range(n - 1):
        if a[t][t] == 0:
            swap = next((i for i in range(t + 1, n) if a[i][t] != 0), None)
            if swap is None:
                return 0
            a[t], a[swap] = a[swap], a[t]
            sign = -sign
        for i in range(t + 1, n):
            for j in range(t + 1, n):
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
        prev = a[t][t]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class PadicMatrix:
    """An N x N matrix over Z/p^k with canonical residues."""
    p: int
    k: int
    entries: Rows

    def __post_init__(self):
        check_prime(self.p)
        if self.k < 1:
            raise PrecisionError(f"precision exponent must be >= 1, got {self.k}")
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise DimensionError(f"expected a non-empty square matrix, got {n} rows")
        m = self.p ** self.k
        if any(not 0 <= x < m for row in self.entries for x in row):
            raise PrecisionError(f"entries must be canonical residues in [0, {m})")

    @classmethod
    def from_rows(cls, p: int, k: int, rows: Iterable[Iterable[int]]) -> "PadicMatrix":
        """Build a matrix from integer rows, reducing every entry mod p^k."""
        m = p ** k
        return cls(p, k, tuple(tuple(int(x) % m for x in row) for row in rows))

    @classmethod
    def identity(cls, p: int, k: int, n: int) -> "PadicMatrix":
        return cls.from_rows(p, k, ([int(i == j) for j in range(n)] for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def entry(self, i: int, j: int) -> PadicInt:
        return PadicInt(self.p, self.k, self.entries[i][j])

    def rows(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        return mat_mul(self, other)

    def reduce(self, k: int) -> "PadicMatrix":
        if k > self.k:
            raise PrecisionError(f"cannot raise precision from {self.k} to {k}")
        return PadicMatrix.from_rows(self.p, k, self.entries)

    def transpose(self) -> "PadicMatrix":
        return PadicMatrix(self.p, self.k, tuple(zip(*self.entries)))

    def det(self) -> PadicInt:
        return det(self)

    def is_gl(self) -> bool:
        return is_gl(self)

    def inverse(self) -> "PadicMatrix":
        return matrix_inverse(self)

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "n": self.n, "entries": self.rows()}

    def __str__(self) -> str:
        width = len(str(self.modulus - 1))
        body = "\n".join(" ".join(str(x).rjust(width) for x in row) for row in self.entries)
        return f"mod {self.p}^{self.k}:\n{body}"


def _check_compatible(a: PadicMatrix, b: PadicMatrix) -> None:
    if a.p != b.p:
        raise PrimeMismatchError(f"cannot combine {a.p}-adic and {b.p}-adic matrices")
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


def mat_mul(a: PadicMatrix, b: PadicMatrix) -> PadicMatrix:
    """Exact product mod p^min(k_a, k_b)."""
    _check_compatible(a, b)
    k = min(a.k, b.k)
    m = a.p ** k
    columns = list(zip(*b.entries))
    rows = tuple(
        tuple(sum(x * y for x, y in zip(row, col)) % m for col in columns)
        for row in a.entries
    )
    return PadicMatrix(a.p, k, rows)


def det(a: PadicMatrix) -> PadicInt:
    """Determinant residue mod p^k."""
    return make(a.p, a.k, integer_det(a.entries))


def is_gl(a: PadicMatrix) -> bool:
    """True iff the determinant is a p-adic unit, i.e. a lies in GL_N(Z_p)."""
    return valuation(det(a)) == Valuation(0)


def product(factors: Iterable["ElementaryMatrix"], p: int, k: int, n: int) -> PadicMatrix:
    """Left-to-right product of elementary factors as an n x n matrix."""
    result = PadicMatrix.identity(p, k, n)
    for factor in factors:
        result = result @ elementary_to_matrix(factor, p, k)
    return result


def embed_block(block: PadicMatrix, n: int, i: int, j: int) -> PadicMatrix:
    """
    Place a 2 x 2 block on the 1-based coordinate pair (i, j), identity elsewhere.

    The block's first basis vector is e_i and its second e_j.
    """
    if block.n != 2:
        raise DimensionError(f"expected a 2 x 2 block, got {block.n} x {block.n}")
    if not (1 <= i <= n and 1 <= j <= n and i != j):
        raise QubitIndexError(f"invalid coordinate pair ({i}, {j}) for dimension {n}")
    rows = [[int(r == c) for c in range(n)] for r in range(n)]
    coords = (i - 1, j - 1)
    for a, ra in enumerate(coords):
        for b, cb in enumerate(coords):
            rows[ra][cb] = block[a, b]
    return PadicMatrix.from_rows(block.p, block.k, rows)


def random_gl_matrix(p: int, k: int, n: int, rng: random.Random) -> PadicMatrix:
    """Uniform element of GL_n(Z/p^k) by rejection sampling."""
    m = p ** k
    while True:
        candidate = PadicMatrix.from_rows(
            p, k, ([rng.randrange(m) for _ in range(n)] for _ in range(n)))
        if is_gl(candidate):
            return candidate


# --------------------------------------------------------------------------- #
# Elementary matrices                                                         #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class ElementaryMatrix:
    """
    One of the three elementary types, with 1-based indices.

    kind "T": T_ij(b) = I + b E_ij          (value = b)
    kind "P": P_ij, the swap of e_i and e_j  (value unused)
    kind "D": D_i(u) = I - (1-u) E_ii        (value = u, a unit)
    """
    kind: str
    n: int
    i: int
    j: Optional[int] = None
    value: Optional[PadicInt] = field(default=None)

    def __post_init__(self):
        if self.kind not in ("T", "P", "D"):
            raise ValueError(f"unknown elementary kind {self.kind!r}")
        if not 1 <= self.i <= self.n:
            raise QubitIndexError(f"index i={self.i} outside 1..{self.n}")
        if self.kind in ("T", "P"):
            if self.j is None or not 1 <= self.j <= self.n or self.j == self.i:
                raise QubitIndexError(f"{self.kind}_ij needs 1 <= i != j <= {self.n}, got ({self.i}, {self.j})")
        if self.kind == "T" and self.value is None:
            raise ValueError("T_ij(b) needs a value b")
        if self.kind == "D":
            if self.value is None or not self.value.is_unit:
                raise NotAUnitError(f"D_i(u) needs a unit u, got {self.value}")

    @classmethod
    def transvection(cls, n: int, i: int, j: int, b: PadicInt) -> "ElementaryMatrix":
        return cls("T", n, i, j, b)

    @classmethod
    def swap(cls, n: int, i: int, j: int) -> "ElementaryMatrix":
        return cls("P", n, i, j)

    @classmethod
    def scaling(cls, n: int, i: int, u: PadicInt) -> "ElementaryMatrix":
        return cls("D", n, i, None, PadicUnit.of(u))

    def inverse(self) -> "ElementaryMatrix":
        if self.kind == "T":
            return ElementaryMatrix("T", self.n, self.i, self.j, -self.value)
        if self.kind == "P":
            return self
        return ElementaryMatrix("D", self.n, self.i, None, self.value ** -1)

    def label(self) -> str:
        if self.kind == "T":
            return f"T{self.i},{self.j}({self.value.r})"
        if self.kind == "P":
            return f"P{self.i},{self.j}"
        return f"D{self.i}({self.value.r})"


def elementary_to_matrix(e: ElementaryMatrix, p: int, k: int) -> PadicMatrix:
    """The literal N x N matrix of an elementary factor over Z/p^k."""
    if e.value is not None and e.value.p != p:
        raise PrimeMismatchError(f"factor value is {e.value.p}-adic, requested p={p}")
    rows = [[int(r == c) for c in range(e.n)] for r in range(e.n)]
    i = e.i - 1
    if e.kind == "T":
        rows[i][e.j - 1] = e.value.r
    elif e.kind == "P":
        j = e.j - 1
        rows[i][i] = rows[j][j] = 0
        rows[i][j] = rows[j][i] = 1
    else:
        rows[i][i] = e.value.r
    return PadicMatrix.from_rows(p, k, rows)


# --------------------------------------------------------------------------- #
# Smith normal form                                                           #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class SmithDecomposition:
    """(prod left_factors) . A . (prod right_factors) == diag(p^e_i) (mod p^k)."""
    p: int
    k: int
    n: int
    left_factors: Tuple[ElementaryMatrix, ...]
    right_factors: Tuple[ElementaryMatrix, ...]
    exponents: Tuple[Valuation, ...]

    def left(self) -> PadicMatrix:
        return product(self.left_factors, self.p, self.k, self.n)

    def right(self) -> PadicMatrix:
        return product(self.right_factors, self.p, self.k, self.n)

    def diagonal(self) -> PadicMatrix:
        rows = [[0] * self.n for _ in range(self.n)]
        for t, e in enumerate(self.exponents):
            rows[t][t] = 0 if e.floor else self.p ** e.value
        return PadicMatrix.from_rows(self.p, self.k, rows)

    def chain_holds(self) -> bool:
        """Exponents nondecreasing, precision-floor markers only at the tail."""
        finite = [e.value for e in self.exponents if e.is_finite]
        seen_floor = False
        for e in self.exponents:
            if e.floor:
                seen_floor = True
            elif seen_floor:
                return False
        return all(x <= y for x, y in zip(finite, finite[1:]))

    def reproduces(self, a: PadicMatrix) -> bool:
        """Re-multiply the factors around a and compare with the diagonal."""
        return self.left() @ a @ self.right() == self.diagonal().reduce(min(a.k, self.k))


def _residue_valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def smith_normal_form(a: PadicMatrix) -> SmithDecomposition:
    """
    Smith normal form over Z_p with recorded elementary factors.

    The pivot is the entry of minimal valuation in the working block (ties in
    row-major order); its unit part is divided out through a D factor, so the
    diagonal carries pure powers p^e. A working block that vanishes mod p^k
    yields precision-floor exponents instead of an error.
    """
    p, k, n, m = a.p, a.k, a.n, a.modulus
    w = a.rows()
    left: List[ElementaryMatrix] = []
    right: List[ElementaryMatrix] = []
    exponents: List[Valuation] = []

    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if w[i][j] == 0:
                    continue
                v = _residue_valuation(w[i][j], p)
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            logger.debug(f"SNF: block {t}..{n - 1} vanishes mod {p}^{k}")
            exponents.extend(Valuation.precision_floor(k) for _ in range(t, n))
            break

        e, pi, pj = best
        logger.debug(f"SNF step {t}: pivot ({pi}, {pj}) of valuation {e}")
        if pi != t:
            w[t], w[pi] = w[pi], w[t]
            left.insert(0, ElementaryMatrix.swap(n, t + 1, pi + 1))
        if pj != t:
            for row in w:
                row[t], row[pj] = row[pj], row[t]
            right.append(ElementaryMatrix.swap(n, t + 1, pj + 1))

        pe = p ** e
        unit_inv = pow(w[t][t] // pe, -1, m)
        if unit_inv != 1:
            w[t] = [x * unit_inv % m for x in w[t]]
            left.insert(0, ElementaryMatrix.scaling(n, t + 1, make(p, k, unit_inv)))

        for i in range(t + 1, n):
            if w[i][t]:
                q = w[i][t] // pe
                w[i] = [(x - q * y) % m for x, y in zip(w[i], w[t])]
                left.insert(0, ElementaryMatrix.transvection(n, i + 1, t + 1, make(p, k, -q)))
        for j in range(t + 1, n):
            if w[t][j]:
                q = w[t][j] // pe
                for row in w:
                    row[j] = (row[j] - q * row[t]) % m
                right.append(ElementaryMatrix.transvection(n, t + 1, j + 1, make(p, k, -q)))

        exponents.append(Valuation(e))

    if any(e.floor for e in exponents):
        logger.warning(f"SNF of a {n}x{n} matrix mod {p}^{k} hit the precision floor: "
                    f"{[str(e) for e in exponents]}")
    return SmithDecomposition(p, k, n, tuple(left), tuple(right), tuple(exponents))


def _minor_valuations(a: PadicMatrix) -> List[Valuation]:
    """v(Delta_i) for i = 1..N: minimal valuation over all i x i minors."""
    result = []
    indices = range(a.n)
    for size in range(1, a.n + 1):
        best: Optional[Valuation] = None
        for rows in itertools.combinations(indices, size):
            for cols in itertools.combinations(indices, size):
                minor = integer_det([[a.entries[r][c] for c in cols] for r in rows])
                v = valuation(make(a.p, a.k, minor))
                if v.is_finite and (best is None or best.floor or v.value < best.value):
                    best = v
        result.append(best if best is not None else Valuation.precision_floor(a.k))
    return result


def elementary_divisor_check(a: PadicMatrix, s: SmithDecomposition) -> bool:
    """
    Cross-check SNF exponents against gcds of minors.

    e_i must equal v(Delta_i) - v(Delta_{i-1}) (Delta_0 = 1) wherever the
    running sum of exponents is below the precision floor; where it reaches
    k, or an exponent is a floor marker, all i x i minors must vanish mod p^k.
    """
    if a.n > MAX_MINOR_CHECK_DIM:
        raise DimensionError(f"minor enumeration supports N <= {MAX_MINOR_CHECK_DIM}, got {a.n}")
    if (s.p, s.n) != (a.p, a.n) or len(s.exponents) != a.n:
        return False
    if not s.chain_holds():
        return False
    deltas = _minor_valuations(a)
    k = min(a.k, s.k)
    cumulative = 0
    floored = False
    for e, delta in zip(s.exponents, deltas):
        if e.floor:
            floored = True
        else:
            cumulative += e.value
        if floored or cumulative >= k:
            if delta.is_finite and delta.value < k:
                return False
        elif delta.floor or delta.value != cumulative:
            return False
    return True


def matrix_inverse(a: PadicMatrix) -> PadicMatrix:
    """Inverse of a GL_N(Z_p) matrix: (prod R) . (prod L) from its Smith form."""
    s = smith_normal_form(a)
    if any(e != Valuation(0) for e in s.exponents):
        raise NotInvertibleError(f"matrix is not in GL_{a.n}(Z_{a.p}): exponents "
                                 f"{[str(e) for e in s.exponents]}")
    return s.right() @ s.left()
