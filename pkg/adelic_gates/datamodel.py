"""
File formats for the adelic-gates batch front-end.

Matrix file:
    {"p": 5, "k": 2, "n": 2, "entries": [[2, 0], [0, 1]]}
    entries may be integers (reduced mod p^k on load) or p^k:r tokens; p and k
    are omitted for GL_N(Z) inputs.

Circuit file:
    {"regime": "complex" | "padic" | "adelic", "n": 1, "p": 5, "k": 2,
     "initial": ..., "gates": [{"kind": ..., "params": [...], "targets": [...]}]}

    initial is a basis label such as "01", or one entry per basis vector:
    [re, im] pairs (or plain numbers) for complex states, residues for p-adic
    states, {"inf": ..., "locals": {"5": residue}, "tail": 0} for adelic ones.

Gate kinds: any complex kind (H, CNOT, Rx, ...) in the complex regime;
"word" (text in the X / P-^m / Mz^a / P1p^b format) or "matrix" in the
p-adic regime; "adelic" (an "inf" complex gate plus "locals" keyed by prime)
or "global" (an integer matrix placed at "primes") in the adelic regime.
"""

import json
import logging
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from .errors import FormatError
from .padic import make, parse_padic
from .plinalg import PadicMatrix
from .psynth import parse_word
from .qsim import (
    AdelicCoefficient,
    AdelicGate,
    AdelicState,
    ComplexGate,
    ComplexState,
    PadicGate,
    PadicState,
)
from .zsynth import IntMatrix

logger = logging.getLogger("adelic_gates.datamodel")

__all__ = [
    "MatrixFile", "GateSpec", "CircuitFile", "RunReport",
    "load_matrix_file", "load_circuit_file",
    "complex_to_json", "complex_state_to_json", "adelic_state_to_json",
]

Entry = Union[int, str]


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e.msg} (line {e.lineno})") from e


# --------------------------------------------------------------------------- #
# Matrices                                                                    #
# --------------------------------------------------------------------------- #
class MatrixFile(BaseModel):
    p: Optional[int] = None
    k: Optional[int] = Field(default=None, ge=1)
    n: int = Field(ge=1)
    entries: List[List[Entry]]

    @model_validator(mode="after")
    def _square(self) -> "MatrixFile":
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must form a {self.n} x {self.n} matrix")
        return self

    def with_precision(self, p: Optional[int], k: Optional[int]) -> "MatrixFile":
        """Override p and/or k, e.g. from command-line flags."""
        update = {key: value for key, value in (("p", p), ("k", k)) if value is not None}
        return self.model_copy(update=update)

    def to_padic(self) -> PadicMatrix:
        if self.p is None or self.k is None:
            raise FormatError("a p-adic matrix file needs both p and k")
        rows = []
        for row in self.entries:
            values = []
            for entry in row:
                if isinstance(entry, str):
                    x = parse_padic(entry)
                    if x.p != self.p or x.k < self.k:
                        raise FormatError(f"entry {entry!r} does not fit {self.p}^{self.k}")
                    values.append(x.r)
                else:
                    values.append(entry)
            rows.append(values)
        return PadicMatrix.from_rows(self.p, self.k, rows)

    def to_int(self) -> IntMatrix:
        if any(isinstance(entry, str) for row in self.entries for entry in row):
            raise FormatError("integer matrices cannot contain p-adic tokens")
        return IntMatrix.from_rows(self.entries)


def load_matrix_file(path: str) -> MatrixFile:
    return MatrixFile.model_validate(_read_json(path))


# --------------------------------------------------------------------------- #
# Circuits                                                                    #
# --------------------------------------------------------------------------- #
class GateSpec(BaseModel):
    kind: str
    params: List[float] = Field(default_factory=list)
    targets: Optional[List[int]] = None
    word: Optional[str] = None
    matrix: Optional[List[List[int]]] = None
    unitary: Optional[List[List[List[float]]]] = None
    inf: Optional["GateSpec"] = None
    locals: Dict[str, "GateSpec"] = Field(default_factory=dict)
    primes: List[int] = Field(default_factory=list)

    model_config = {"extra": "forbid"}

    def to_complex(self) -> ComplexGate:
        if self.targets is None:
            raise FormatError(f"complex gate {self.kind} needs targets")
        unitary = None
        if self.unitary is not None:
            unitary = [[complex(*pair) for pair in row] for row in self.unitary]
        return ComplexGate(self.kind, tuple(self.targets), tuple(self.params), unitary)

    def to_padic(self, p: int, k: int) -> PadicGate:
        targets = tuple(self.targets) if self.targets is not None else None
        if self.kind == "word":
            if self.word is None:
                raise FormatError("a word gate needs a 'word' field")
            return PadicGate(parse_word(self.word, p, k), targets)
        if self.kind == "matrix":
            if self.matrix is None:
                raise FormatError("a matrix gate needs a 'matrix' field")
            return PadicGate(PadicMatrix.from_rows(p, k, self.matrix), targets)
        raise FormatError(f"p-adic gates are 'word' or 'matrix', got {self.kind!r}")

    def to_adelic(self, k: int) -> AdelicGate:
        if self.kind == "global":
            if self.matrix is None:
                raise FormatError("a global gate needs a 'matrix' field")
            targets = tuple(self.targets) if self.targets is not None else None
            return AdelicGate.from_global(IntMatrix.from_rows(self.matrix), self.primes, k, targets)
        if self.kind != "adelic":
            raise FormatError(f"adelic gates are 'adelic' or 'global', got {self.kind!r}")
        archimedean = self.inf.to_complex() if self.inf is not None else None
        locals_ = {int(p): local.to_padic(int(p), k) for p, local in self.locals.items()}
        return AdelicGate(archimedean, locals_)


class CircuitFile(BaseModel):
    regime: Literal["complex", "padic", "adelic"]
    n: int = Field(ge=1)
    p: Optional[int] = None
    k: Optional[int] = Field(default=None, ge=1)
    initial: Any = None
    gates: List[GateSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _regime_fields(self) -> "CircuitFile":
        if self.regime == "padic" and (self.p is None or self.k is None):
            raise ValueError("p-adic circuits need p and k")
        if self.initial is None:
            self.initial = "0" * self.n
        return self

    def _label(self) -> Optional[int]:
        if isinstance(self.initial, str):
            if len(self.initial) != self.n or set(self.initial) - {"0", "1"}:
                raise FormatError(f"basis label {self.initial!r} is not {self.n} binary digits")
            return int(self.initial, 2)
        if not isinstance(self.initial, list) or len(self.initial) != 2 ** self.n:
            raise FormatError(f"initial state needs a basis label or {2 ** self.n} entries")
        return None

    def initial_state(self):
        label = self._label()
        if self.regime == "complex":
            if label is not None:
                return ComplexState.basis(self.n, label)
            return ComplexState(self.n, [_parse_complex(x) for x in self.initial])
        if self.regime == "padic":
            if label is not None:
                return PadicState.basis(self.n, self.p, self.k, label)
            return PadicState(self.n, self.p, self.k, tuple(int(x) for x in self.initial))
        primes = sorted({int(p) for g in self.gates for p in list(g.locals) + g.primes})
        if label is not None:
            return AdelicState.basis(self.n, label, primes, self._adelic_k())
        return AdelicState(self.n, tuple(self._coefficient(x) for x in self.initial))

    def _adelic_k(self) -> int:
        return self.k if self.k is not None else 1

    def _coefficient(self, raw: Any) -> AdelicCoefficient:
        if not isinstance(raw, dict) or "inf" not in raw:
            raise FormatError(f"adelic coefficients look like {{'inf': ..., 'locals': {{...}}}}, got {raw!r}")
        k = self._adelic_k()
        locals_ = {int(p): make(int(p), k, int(r)) for p, r in raw.get("locals", {}).items()}
        return AdelicCoefficient(_parse_complex(raw["inf"]), locals_,
                                 bool(raw.get("tail_integral", True)), int(raw.get("tail", 0)))

    def build_gates(self) -> list:
        if self.regime == "complex":
            return [g.to_complex() for g in self.gates]
        if self.regime == "padic":
            return [g.to_padic(self.p, self.k) for g in self.gates]
        return [g.to_adelic(self._adelic_k()) for g in self.gates]


GateSpec.model_rebuild()


def load_circuit_file(path: str) -> CircuitFile:
    return CircuitFile.model_validate(_read_json(path))


def _parse_complex(raw: Any) -> complex:
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(float(raw[0]), float(raw[1]))
    raise FormatError(f"complex numbers are written as numbers or [re, im] pairs, got {raw!r}")


def complex_to_json(z: complex) -> Union[float, List[float]]:
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def complex_state_to_json(state: ComplexState) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in state.amplitudes]


def adelic_state_to_json(state: AdelicState) -> List[Dict[str, Any]]:
    return [{
        "inf": complex_to_json(c.archimedean),
        "locals": {str(p): x.r for p, x in c.locals.items()},
        "tail": c.tail_value,
        "tail_integral": c.tail_integral,
    } for c in state.coefficients]


# --------------------------------------------------------------------------- #
# Reports                                                                     #
# --------------------------------------------------------------------------- #
class RunReport(BaseModel):
    """
    One command run. verification is always present and is computed by
    re-evaluating outputs through a path independent of the one producing
    them.
    """
    command: str
    inputs_digest: str
    outputs: Dict[str, Any] = Field(default_factory=dict)
    verification: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    wall_time: Optional[float] = None

    def to_json(self) -> Dict[str, Any]:
        data = self.model_dump()
        for key in ("error", "wall_time"):
            if data[key] is None:
                del data[key]
        return data
