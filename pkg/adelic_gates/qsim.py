"""
State-vector simulation for complex, p-adic and adelic qubit states.

Basis states are written |k_n ... k_2 k_1>, most significant digit first, and
the amplitude index is the binary value of that string. Qubit q is the digit
k_(q+1), i.e. bit q of the index. A gate on targets (t_1, ..., t_m) reads t_1
as the most significant digit of its own local basis, so CNOT on (1, 0) maps
|10> to |11>.

Complex states are numpy vectors. p-adic states hold canonical residues and
are transformed exactly. An adelic state keeps, per basis vector, one complex
archimedean amplitude and finitely many p-adic components; every prime not
listed carries the same integral tail value.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import get_settings
from .errors import (
    DimensionError,
    NonCompactGateError,
    NormalizationError,
    NotInvertibleError,
    PrecisionError,
    PrimeMismatchError,
    QubitIndexError,
)
from .padic import PadicInt, Valuation, check_prime, make, valuation
from .plinalg import PadicMatrix, is_gl
from .psynth import GateWord, eval_word
from .zsynth import IntMatrix, reduce_mod

logger = logging.getLogger("adelic_gates.qsim")

__all__ = [
    "ComplexGate", "ComplexState", "PadicGate", "PadicState",
    "AdelicCoefficient", "AdelicGate", "AdelicState",
    "gate_matrix", "apply_complex", "probabilities", "measure_sample",
    "sample_sequence", "sample_counts", "apply_padic", "padic_probabilities",
    "apply_adelic", "is_normalized_adelic", "basis_label", "lift_dense", "COMPLEX_GATE_KINDS",
]

_SQRT2_INV = 1 / math.sqrt(2)
_FIXED = {
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "PauliX": np.array([[0, 1], [1, 0]], dtype=complex),
    "PauliY": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "PauliZ": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "Toffoli": np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]],
}


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)


_PARAMETRIC = {
    "M": lambda a: np.exp(1j * a) * np.eye(2, dtype=complex),
    "P": lambda a: np.array([[1, 0], [0, np.exp(1j * a)]], dtype=complex),
    "Rx": _rx,
    "Ry": _ry,
    "Rz": _rz,
}

COMPLEX_GATE_KINDS = tuple(_PARAMETRIC) + tuple(_FIXED) + ("Unitary",)
_ALIASES = {"X": "PauliX", "Y": "PauliY", "Z": "PauliZ", "CX": "CNOT", "CCX": "Toffoli"}


def gate_matrix(kind: str, params: Sequence[float] = ()) -> np.ndarray:
    """The matrix of a named gate; parametric kinds take one angle in radians."""
    kind = _ALIASES.get(kind, kind)
    if kind in _FIXED:
        if params:
            raise ValueError(f"gate {kind} takes no parameters")
        return _FIXED[kind].copy()
    if kind in _PARAMETRIC:
        if len(params) != 1:
            raise ValueError(f"gate {kind} takes exactly one angle, got {len(params)}")
        return _PARAMETRIC[kind](float(params[0]))
    raise ValueError(f"unknown gate kind {kind!r}; expected one of {COMPLEX_GATE_KINDS}")


def basis_label(index: int, n: int) -> str:
    return format(index, f"0{n}b") if n else ""


def _check_targets(targets: Sequence[int], n: int) -> None:
    if len(set(targets)) != len(targets):
        raise QubitIndexError(f"repeated target qubits {tuple(targets)}")
    bad = [t for t in targets if not 0 <= t < n]
    if bad:
        raise QubitIndexError(f"target qubits {bad} outside 0..{n - 1}")


# --------------------------------------------------------------------------- #
# Complex regime                                                              #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class ComplexGate:
    """A named unitary acting on the listed target qubits."""
    kind: str
    targets: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    unitary: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(a) for a in self.params))
        if kind == "Unitary":
            if self.unitary is None:
                raise ValueError("Unitary gates need an explicit matrix")
            matrix = np.array(self.unitary, dtype=complex)
        else:
            matrix = gate_matrix(kind, self.params)
        dim = 2 ** len(self.targets)
        if matrix.shape != (dim, dim):
            raise DimensionError(f"{kind} is {matrix.shape[0]}-dimensional but has "
                                 f"{len(self.targets)} target qubit(s)")
        _check_targets(self.targets, max(self.targets, default=-1) + 1)
        tol = get_settings().gate_tolerance
        if not np.allclose(matrix.conj().T @ matrix, np.eye(dim), rtol=0, atol=tol):
            raise NonCompactGateError(f"{kind} gate is not unitary within {tol}")
        matrix.flags.writeable = False
        object.__setattr__(self, "_matrix", matrix)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def adjoint(self) -> "ComplexGate":
        return ComplexGate("Unitary", self.targets, unitary=self._matrix.conj().T)

    def is_real_orthogonal(self) -> bool:
        return bool(np.allclose(self._matrix.imag, 0, atol=get_settings().gate_tolerance))


@dataclass(frozen=True, eq=False)
class ComplexState:
    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (2 ** self.n,):
            raise DimensionError(f"{self.n} qubits need {2 ** self.n} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, label: Union[str, int] = 0) -> "ComplexState":
        index = int(label, 2) if isinstance(label, str) else int(label)
        amps = np.zeros(2 ** n, dtype=complex)
        amps[index] = 1
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tolerance: Optional[float] = None) -> bool:
        tol = get_settings().norm_tolerance if tolerance is None else tolerance
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= tol


def _apply_matrix(amps: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    m = len(targets)
    psi = amps.reshape([2] * n)
    axes = [n - 1 - t for t in targets]
    tensor = matrix.reshape([2] * (2 * m))
    out = np.tensordot(tensor, psi, axes=(list(range(m, 2 * m)), axes))
    return np.moveaxis(out, list(range(m)), axes).reshape(-1)


def apply_complex(gate: ComplexGate, state: ComplexState) -> ComplexState:
    """Apply a gate lifted to 2^n dimensions (identity on the other qubits)."""
    _check_targets(gate.targets, state.n)
    return ComplexState(state.n, _apply_matrix(state.amplitudes, gate.matrix, gate.targets, state.n))


def _born_weights(state: ComplexState) -> np.ndarray:
    if not state.is_normalized():
        raise NormalizationError(f"state has squared norm {state.norm() ** 2:.12g}, expected 1")
    return np.abs(state.amplitudes) ** 2


def probabilities(state: ComplexState) -> Dict[str, float]:
    """|amplitude|^2 for every basis string."""
    weights = _born_weights(state)
    return {basis_label(i, state.n): float(w) for i, w in enumerate(weights)}


def sample_sequence(state: ComplexState, shots: int, seed: int) -> List[str]:
    """Born-rule samples; the same seed always gives the same sequence."""
    weights = _born_weights(state)
    rng = np.random.default_rng(seed)
    draws = rng.choice(weights.size, size=shots, p=weights / weights.sum())
    return [basis_label(int(i), state.n) for i in draws]


def measure_sample(state: ComplexState, seed: int) -> str:
    return sample_sequence(state, 1, seed)[0]


def sample_counts(state: ComplexState, shots: int, seed: int) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for label in sample_sequence(state, shots, seed):
        counts[label] = counts.get(label, 0) + 1
    return dict(sorted(counts.items()))


# --------------------------------------------------------------------------- #
# p-adic regime                                                               #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class PadicState:
    """2^n coefficients in Z/p^k; always normalized in the Z_p sense."""
    n: int
    p: int
    k: int
    amplitudes: Tuple[int, ...]

    def __post_init__(self):
        check_prime(self.p)
        if len(self.amplitudes) != 2 ** self.n:
            raise DimensionError(f"{self.n} qubits need {2 ** self.n} coefficients, "
                                 f"got {len(self.amplitudes)}")
        m = self.p ** self.k
        object.__setattr__(self, "amplitudes", tuple(int(x) % m for x in self.amplitudes))

    @classmethod
    def basis(cls, n: int, p: int, k: int, label: Union[str, int] = 0) -> "PadicState":
        index = int(label, 2) if isinstance(label, str) else int(label)
        return cls(n, p, k, tuple(int(i == index) for i in range(2 ** n)))

    def coefficient(self, index: int) -> PadicInt:
        return PadicInt(self.p, self.k, self.amplitudes[index])


@dataclass(frozen=True)
class PadicGate:
    """A GL_N(Z_p) matrix or a 2 x 2 generator word, optionally on target qubits."""
    operator: Union[PadicMatrix, GateWord]
    targets: Optional[Tuple[int, ...]] = None

    @property
    def p(self) -> int:
        return self.operator.p

    def matrix(self) -> PadicMatrix:
        if isinstance(self.operator, GateWord):
            return eval_word(self.operator)
        return self.operator


def _local_index(index: int, targets: Sequence[int]) -> int:
    v = 0
    for t in targets:
        v = (v << 1) | ((index >> t) & 1)
    return v


def _with_local(index: int, targets: Sequence[int], local: int) -> int:
    m = len(targets)
    for pos, t in enumerate(targets):
        bit = (local >> (m - 1 - pos)) & 1
        index = (index & ~(1 << t)) | (bit << t)
    return index


def lift_dense(matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """The 2^n x 2^n matrix of a gate on the given targets, built entry by entry."""
    _check_targets(targets, n)
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for row in range(dim):
        local_row = _local_index(row, targets)
        for local_col in range(matrix.shape[0]):
            out[row, _with_local(row, targets, local_col)] = matrix[local_row, local_col]
    return out


def apply_padic(gate: Union[PadicGate, PadicMatrix, GateWord], state: PadicState) -> PadicState:
    """
    Exact matrix-vector product over Z/p^k.

    Raises:
        PrimeMismatchError: If gate and state live over different primes
        PrecisionError: If their precisions differ
        NotInvertibleError: If the gate is not in GL_N(Z_p)
    """
    if not isinstance(gate, PadicGate):
        gate = PadicGate(gate)
    matrix = gate.matrix()
    if matrix.p != state.p:
        raise PrimeMismatchError(f"{matrix.p}-adic gate applied to a {state.p}-adic state")
    if matrix.k != state.k:
        raise PrecisionError(f"gate precision {matrix.k} differs from state precision {state.k}")
    if not is_gl(matrix):
        raise NotInvertibleError(f"p-adic gate is not in GL_{matrix.n}(Z_{matrix.p})")

    m = state.p ** state.k
    amps = state.amplitudes
    if gate.targets is None:
        if matrix.n != len(amps):
            raise DimensionError(f"{matrix.n} x {matrix.n} gate on a {len(amps)}-dimensional state")
        out = tuple(sum(a * x for a, x in zip(row, amps)) % m for row in matrix.entries)
        return PadicState(state.n, state.p, state.k, out)

    targets = tuple(gate.targets)
    _check_targets(targets, state.n)
    if matrix.n != 2 ** len(targets):
        raise DimensionError(f"{matrix.n} x {matrix.n} gate on {len(targets)} target qubit(s)")
    out = []
    for index in range(len(amps)):
        row = matrix.entries[_local_index(index, targets)]
        out.append(sum(row[c] * amps[_with_local(index, targets, c)]
                       for c in range(matrix.n)) % m)
    return PadicState(state.n, state.p, state.k, tuple(out))


def padic_probabilities(state: PadicState) -> Dict[str, Valuation]:
    """Valuation of each coefficient; a larger valuation reads as a smaller p-adic probability."""
    return {basis_label(i, state.n): valuation(state.coefficient(i))
            for i in range(len(state.amplitudes))}


# --------------------------------------------------------------------------- #
# Adelic regime (base field Q)                                                #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class AdelicCoefficient:
    """
    One adele: archimedean amplitude, listed p-adic components, and the
    integer `tail_value` held at every unlisted prime when `tail_integral`.
    """
    archimedean: complex
    locals: Mapping[int, PadicInt] = field(default_factory=dict)
    tail_integral: bool = True
    tail_value: int = 0

    def __post_init__(self):
        object.__setattr__(self, "archimedean", complex(self.archimedean))
        for p, x in self.locals.items():
            check_prime(p)
            if x.p != p:
                raise PrimeMismatchError(f"component listed at {p} is {x.p}-adic")
        object.__setattr__(self, "locals", dict(sorted(self.locals.items())))

    def local(self, p: int, k: int) -> PadicInt:
        """The component at p, materialized from the tail if unlisted."""
        if p in self.locals:
            return self.locals[p]
        if not self.tail_integral:
            raise NormalizationError(f"coefficient is not known to be integral at {p}")
        return make(p, k, self.tail_value)

    def support(self) -> frozenset:
        return frozenset(self.locals)


@dataclass(frozen=True)
class AdelicState:
    n: int
    coefficients: Tuple[AdelicCoefficient, ...]

    def __post_init__(self):
        if len(self.coefficients) != 2 ** self.n:
            raise DimensionError(f"{self.n} qubits need {2 ** self.n} coefficients, "
                                 f"got {len(self.coefficients)}")

    @classmethod
    def basis(cls, n: int, label: Union[str, int] = 0, primes: Iterable[int] = (),
              k: int = 1) -> "AdelicState":
        index = int(label, 2) if isinstance(label, str) else int(label)
        primes = tuple(primes)
        coeffs = []
        for i in range(2 ** n):
            value = int(i == index)
            coeffs.append(AdelicCoefficient(complex(value), {p: make(p, k, value) for p in primes},
                                            tail_integral=True, tail_value=value))
        return cls(n, tuple(coeffs))

    def archimedean_vector(self) -> np.ndarray:
        return np.array([c.archimedean for c in self.coefficients], dtype=complex)

    def support(self) -> frozenset:
        return frozenset().union(*(c.support() for c in self.coefficients))


@dataclass(frozen=True)
class AdelicGate:
    """A finite-type gate: a unitary at infinity, GL_N(Z_p) at finitely many primes, identity elsewhere."""
    archimedean: Optional[ComplexGate] = None
    locals: Mapping[int, PadicGate] = field(default_factory=dict)

    def __post_init__(self):
        for p, g in self.locals.items():
            if g.p != p:
                raise PrimeMismatchError(f"gate listed at {p} is {g.p}-adic")
            if not is_gl(g.matrix()):
                raise NotInvertibleError(f"local gate at {p} is not in GL_N(Z_{p})")
        object.__setattr__(self, "locals", dict(sorted(self.locals.items())))

    @classmethod
    def from_global(cls, g: IntMatrix, primes: Iterable[int], k: int,
                    targets: Optional[Sequence[int]] = None) -> "AdelicGate":
        """
        Place a GL_N(Z) gate at the listed primes. A signed permutation matrix is
        orthogonal and also acts at infinity; any other global gate is the
        identity there.
        """
        if abs(g.det()) != 1:
            raise NotInvertibleError(f"matrix is not in GL_{g.n}(Z): det = {g.det()}")
        if g.n & (g.n - 1):
            raise DimensionError(f"gate dimension {g.n} is not a power of two")
        qubits = g.n.bit_length() - 1
        if targets is None:
            targets = tuple(range(qubits - 1, -1, -1))
        targets = tuple(targets)
        locals_ = {p: PadicGate(reduce_mod(g, p, k), targets) for p in primes}
        rows = np.array(g.rows(), dtype=float)
        archimedean = None
        if np.array_equal(rows @ rows.T, np.eye(g.n)):
            archimedean = ComplexGate("Unitary", targets, unitary=rows)
        return cls(archimedean, locals_)

    def support(self) -> frozenset:
        return frozenset(self.locals)

    def is_in_maximal_compact(self) -> bool:
        tol = get_settings().gate_tolerance
        if self.archimedean is not None:
            u = self.archimedean.matrix
            if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=tol):
                return False
        return all(is_gl(g.matrix()) for g in self.locals.values())


def apply_adelic(gate: AdelicGate, state: AdelicState) -> AdelicState:
    """
    Apply a finite-type gate place by place.

    Primes where the gate acts but the state lists no component are first
    materialized from each coefficient's tail value. Components at every other
    place are carried over unchanged, as the same objects.
    """
    coeffs = list(state.coefficients)
    if gate.archimedean is not None:
        arch = apply_complex(gate.archimedean, ComplexState(state.n, state.archimedean_vector()))
        coeffs = [AdelicCoefficient(complex(a), c.locals, c.tail_integral, c.tail_value)
                  for a, c in zip(arch.amplitudes, coeffs)]

    for p, local_gate in gate.locals.items():
        k = local_gate.matrix().k
        for c in coeffs:
            if p in c.locals and c.locals[p].k != k:
                raise PrecisionError(f"state precision {c.locals[p].k} at {p} differs from gate precision {k}")
        local_state = PadicState(state.n, p, k, tuple(c.local(p, k).r for c in coeffs))
        result = apply_padic(local_gate, local_state)
        coeffs = [AdelicCoefficient(c.archimedean, {**c.locals, p: result.coefficient(i)},
                                    c.tail_integral, c.tail_value)
                  for i, c in enumerate(coeffs)]

    logger.debug(f"apply_adelic: gate support {sorted(gate.support())}, "
                 f"state support {sorted(state.support())}")
    return AdelicState(state.n, tuple(coeffs))


def is_normalized_adelic(state: AdelicState, tolerance: Optional[float] = None) -> bool:
    """Unit archimedean norm, integral listed components, integral tails."""
    tol = get_settings().norm_tolerance if tolerance is None else tolerance
    arch = state.archimedean_vector()
    if abs(float(np.vdot(arch, arch).real) - 1.0) > tol:
        return False
    # listed components are PadicInts, hence in Z_p
    return all(c.tail_integral for c in state.coefficients)
