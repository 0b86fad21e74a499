#!/usr/bin/env python3

"""
adelic-gates: batch front-end for synthesis, simulation, Smith normal forms
and the generation oracle.

Every run prints one JSON report (or a JSON list when several input files are
given) to stdout; logs go to stderr. Exit codes: 0 success, 2 unreadable
input, 3 violated precondition (non-invertible matrix, p = 2, budget
exceeded, unnormalized state) or failed verification, 1 anything unexpected.
With several files a 1 wins, otherwise the largest code is returned.
"""

import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .config import get_settings
from .datamodel import (
    RunReport,
    adelic_state_to_json,
    complex_state_to_json,
    load_circuit_file,
    load_matrix_file,
)
from .decorators import batch_command, collect_commands, validate_args
from .errors import (
    EXIT_OK,
    EXIT_PRECONDITION,
    EXIT_UNEXPECTED,
    DimensionError,
    FormatError,
    NormalizationError,
    pattern_registry,
)
from .logging_config import configure_cli_logging
from .plinalg import (
    MAX_MINOR_CHECK_DIM,
    PadicMatrix,
    elementary_divisor_check,
    is_gl,
    smith_normal_form,
)
from .psynth import (
    MAX_WORD_LENGTH,
    TwoLevelGate,
    bfs_oracle,
    embed_two_level,
    eval_word,
    format_word,
    gl2_order,
    parse_word,
    synth_gl2,
    synth_gln,
)
from .qsim import (
    PadicGate,
    apply_adelic,
    apply_complex,
    apply_padic,
    is_normalized_adelic,
    lift_dense,
    padic_probabilities,
    probabilities,
    sample_counts,
)
from .utils.job_utils import run_jobs
from .utils.report_utils import canonical_json, inputs_digest, render_table
from .zsynth import decompose_glnz, eval_hr, format_hr_word, parse_hr_word

logger = logging.getLogger("adelic_gates.cli")


# --------------------------------------------------------------------------- #
# Command options                                                             #
# --------------------------------------------------------------------------- #
class SynthOptions(BaseModel):
    path: str
    target: Literal["gl2p", "glnp", "glnz"] = "gl2p"
    strategy: Literal["swap", "transpose"] = "swap"
    p: Optional[int] = None
    k: Optional[int] = Field(default=None, ge=1)


class MatrixOptions(BaseModel):
    path: str
    p: Optional[int] = None
    k: Optional[int] = Field(default=None, ge=1)


class SimOptions(BaseModel):
    path: str
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=0, ge=0)


class OracleOptions(BaseModel):
    p: int
    k: int = Field(ge=1)
    budget: Optional[int] = Field(default=None, ge=1)


class VerifyOptions(BaseModel):
    path: str
    word: str
    target: Literal["gl2p", "glnz"] = "gl2p"
    p: Optional[int] = None
    k: Optional[int] = Field(default=None, ge=1)


Outcome = Tuple[Dict[str, Any], Dict[str, Any]]


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e


def _dense_padic(gate: PadicGate, n: int) -> PadicMatrix:
    """The full 2^n x 2^n matrix of a p-adic gate: zero unless rows and columns agree off the targets."""
    matrix = gate.matrix()
    if gate.targets is None:
        return matrix
    targets = gate.targets
    off_targets = ~sum(1 << t for t in targets)

    def local(index: int) -> int:
        return int("".join(str((index >> t) & 1) for t in targets), 2)

    dim = 2 ** n
    rows = [[matrix[local(r), local(c)] if r & off_targets == c & off_targets else 0
             for c in range(dim)] for r in range(dim)]
    return PadicMatrix.from_rows(matrix.p, matrix.k, rows)


def _replay_padic(gates: List[PadicGate], vector: Tuple[int, ...], n: int, p: int, k: int) -> Tuple[int, ...]:
    """Multiply the dense gate matrices together, then apply the product once."""
    total = PadicMatrix.identity(p, k, 2 ** n)
    for gate in gates:
        total = _dense_padic(gate, n) @ total
    m = p ** k
    return tuple(sum(a * x for a, x in zip(row, vector)) % m for row in total.entries)


# --------------------------------------------------------------------------- #
# Toolkit                                                                     #
# --------------------------------------------------------------------------- #
class GateToolkit:
    """The subcommands; each returns (outputs, verification)."""

    def __init__(self, timing: bool = False):
        self.timing = timing
        self.commands = collect_commands(self)

    def run(self, command: str, **kwargs) -> Tuple[RunReport, int]:
        """Run one command and turn its outcome or failure into a report and an exit code."""
        fn = self.commands[command]
        meta = fn.__batch_meta__
        options = {key: value for key, value in kwargs.items() if key != "path"}
        digest = inputs_digest(command, options)
        outputs: Dict[str, Any] = {}
        verification: Dict[str, Any] = {}
        error = None
        exit_code = EXIT_OK

        start_time = time.perf_counter()
        logger.info(f"Starting {command} ({meta['operation_type']}) with {kwargs}")
        try:
            validate_args(fn, kwargs)
            if kwargs.get("path") is not None:
                digest = inputs_digest(command, options, [_read_bytes(kwargs["path"])])
            outputs, verification = fn(**kwargs)
            if not verification.get("verified", False):
                exit_code = EXIT_PRECONDITION
                error = {"error_code": "VERIFICATION_FAILED", "exit_code": exit_code,
                         "message": f"{command} output did not re-evaluate to its input",
                         "recovery_hint": None}
        except Exception as e:
            error = pattern_registry.describe(e)
            exit_code = error["exit_code"]
            if error["error_code"] == "UNEXPECTED":
                logger.exception(f"{command} failed unexpectedly")
            else:
                logger.error(f"{command} failed: {error['error_code']}: {e}")
        wall_time = time.perf_counter() - start_time
        logger.info(f"Finished {command} in {wall_time:.3f}s with exit code {exit_code}")

        report = RunReport(command=command, inputs_digest=digest, outputs=outputs,
                           verification=verification, error=error,
                           wall_time=wall_time if self.timing else None)
        return report, exit_code

    @batch_command(name="synth", model=SynthOptions, operation_type="synthesis")
    def synth(self, path: str, target: str = "gl2p", strategy: str = "swap",
              p: Optional[int] = None, k: Optional[int] = None) -> Outcome:
        """Compile a matrix into generator words and re-evaluate the parsed text."""
        matrix_file = load_matrix_file(path)
        if target == "glnz":
            return self._synth_glnz(matrix_file.to_int())

        g = matrix_file.with_precision(p, k).to_padic()
        if target == "gl2p":
            word = synth_gl2(g, strategy)
            text = format_word(word)
            replay = eval_word(parse_word(text, g.p, g.k))
            outputs = {"target": target, "p": g.p, "k": g.k, "word": text, "length": len(word)}
            return outputs, {"verified": replay == g,
                             "within_length_bound": len(word) <= MAX_WORD_LENGTH}

        gates = [gate.to_json() for gate in synth_gln(g)]
        replayed = [TwoLevelGate(tuple(gate["coords"]), parse_word(gate["word"], g.p, g.k))
                    for gate in gates]
        replay = embed_two_level(replayed, g.n, g.p, g.k)
        outputs = {"target": target, "p": g.p, "k": g.k, "n": g.n, "gates": gates}
        return outputs, {"verified": replay == g, "gate_count": len(gates)}

    def _synth_glnz(self, g) -> Outcome:
        word = decompose_glnz(g)
        text = format_hr_word(word)
        replay = eval_hr(parse_hr_word(text, g.n))
        outputs = {"target": "glnz", "n": g.n, "det": g.det(), "word": text, "length": len(word)}
        return outputs, {"verified": replay == g}

    @batch_command(name="glnz", model=MatrixOptions, operation_type="synthesis")
    def glnz(self, path: str, p: Optional[int] = None, k: Optional[int] = None) -> Outcome:
        """Decompose an integer matrix over the GL_N(Z) generators."""
        return self._synth_glnz(load_matrix_file(path).to_int())

    @batch_command(name="snf", model=MatrixOptions, operation_type="linear_algebra")
    def snf(self, path: str, p: Optional[int] = None, k: Optional[int] = None) -> Outcome:
        """Smith normal form over Z_p with its elementary factors."""
        a = load_matrix_file(path).with_precision(p, k).to_padic()
        s = smith_normal_form(a)
        outputs = {
            "p": a.p, "k": a.k, "n": a.n,
            "exponents": [e.to_json() for e in s.exponents],
            "left_factors": [e.label() for e in s.left_factors],
            "right_factors": [e.label() for e in s.right_factors],
            "is_gl": is_gl(a),
        }
        verification = {"reproduces": s.reproduces(a), "chain_holds": s.chain_holds()}
        minors = elementary_divisor_check(a, s) if a.n <= MAX_MINOR_CHECK_DIM else None
        verification["elementary_divisor_check"] = minors
        verification["verified"] = all(v is not False for v in verification.values())
        return outputs, verification

    @batch_command(name="oracle", model=OracleOptions, operation_type="enumeration")
    def oracle(self, p: int, k: int, budget: Optional[int] = None) -> Outcome:
        """Breadth-first closure of the GL_2 generators mod p^k."""
        report = bfs_oracle(p, k, budget)
        formula = gl2_order(p, k)
        return report.to_json(), {"formula_order": formula, "verified": report.reachable == formula}

    @batch_command(name="sim", model=SimOptions, operation_type="simulation")
    def sim(self, path: str, seed: int = 0, samples: int = 0) -> Outcome:
        """Run a circuit file and report the final state."""
        circuit = load_circuit_file(path)
        state = circuit.initial_state()
        gates = circuit.build_gates()
        if circuit.regime == "complex":
            return self._sim_complex(circuit.n, state, gates, seed, samples)
        if circuit.regime == "padic":
            return self._sim_padic(state, gates)
        return self._sim_adelic(state, gates)

    def _sim_padic(self, initial, gates) -> Outcome:
        state = initial
        for gate in gates:
            state = apply_padic(gate, state)
        m = state.p ** state.k
        outputs = {"regime": "padic", "n": state.n, "p": state.p, "k": state.k,
                   "state": list(state.amplitudes),
                   "valuations": {b: v.to_json() for b, v in padic_probabilities(state).items()}}
        replay = _replay_padic(gates, initial.amplitudes, state.n, state.p, state.k)
        canonical = all(0 <= x < m for x in state.amplitudes)
        matches = replay == state.amplitudes
        return outputs, {"canonical": canonical, "replay_matches": matches,
                         "verified": canonical and matches}

    def _sim_adelic(self, initial, gates) -> Outcome:
        state = initial
        for gate in gates:
            state = apply_adelic(gate, state)
        n = state.n
        gate_support = frozenset().union(*(gate.support() for gate in gates))
        outputs = {"regime": "adelic", "n": n, "state": adelic_state_to_json(state),
                   "support": sorted(state.support())}

        arch = initial.archimedean_vector()
        for gate in gates:
            if gate.archimedean is not None:
                arch = lift_dense(gate.archimedean.matrix, gate.archimedean.targets, n) @ arch
        tol = get_settings().norm_tolerance
        places = {"inf": bool(np.allclose(arch, state.archimedean_vector(), rtol=0, atol=tol))}
        for p in sorted(gate_support):
            acting = [gate.locals[p] for gate in gates if p in gate.locals]
            k = acting[0].matrix().k
            start = tuple(c.local(p, k).r for c in initial.coefficients)
            places[str(p)] = _replay_padic(acting, start, n, p, k) == \
                tuple(c.locals[p].r for c in state.coefficients)

        untouched = all(
            after.tail_integral == before.tail_integral and after.tail_value == before.tail_value
            and all(after.locals.get(p) == x for p, x in before.locals.items() if p not in gate_support)
            for before, after in zip(initial.coefficients, state.coefficients))
        within = state.support() <= initial.support() | gate_support
        normalized = is_normalized_adelic(state)
        replayed = all(places.values())
        return outputs, {"normalized": normalized, "support_within_gates": within,
                         "places_replayed": places, "untouched_places_identical": untouched,
                         "verified": replayed and untouched and within
                         and (normalized or not is_normalized_adelic(initial))}

    def _sim_complex(self, n, state, gates, seed: int, samples: int) -> Outcome:
        if not state.is_normalized():
            raise NormalizationError(f"initial state has norm {state.norm():.12g}, expected 1")
        initial = np.array(state.amplitudes)
        for gate in gates:
            state = apply_complex(gate, state)
        replay = initial
        for gate in gates:
            replay = lift_dense(gate.matrix, gate.targets, n) @ replay
        tol = get_settings().norm_tolerance
        outputs = {"regime": "complex", "n": n, "state": complex_state_to_json(state),
                   "probabilities": probabilities(state)}
        if samples:
            outputs["samples"] = sample_counts(state, samples, seed)
            outputs["seed"] = seed
        matches = bool(np.allclose(replay, state.amplitudes, rtol=0, atol=tol))
        return outputs, {"norm": state.norm(), "replay_matches": matches,
                         "verified": matches and state.is_normalized()}

    @batch_command(name="verify", model=VerifyOptions, operation_type="verification")
    def verify(self, path: str, word: str, target: str = "gl2p",
               p: Optional[int] = None, k: Optional[int] = None) -> Outcome:
        """Re-evaluate a word text against a matrix file."""
        matrix_file = load_matrix_file(path)
        if target == "glnz":
            g = matrix_file.to_int()
            parsed = parse_hr_word(word, g.n)
            return ({"target": target, "word": format_hr_word(parsed)},
                    {"verified": eval_hr(parsed) == g})
        g = matrix_file.with_precision(p, k).to_padic()
        if g.n != 2:
            raise DimensionError(f"gl2p words evaluate to 2 x 2 matrices, the file holds {g.n} x {g.n}")
        parsed = parse_word(word, g.p, g.k)
        return ({"target": target, "word": format_word(parsed)},
                {"verified": eval_word(parsed) == g})


# --------------------------------------------------------------------------- #
# Command line                                                                #
# --------------------------------------------------------------------------- #
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Write the report to this file instead of stdout")
    common.add_argument("--format", choices=["json", "table"], default="json", help="Report format")
    common.add_argument("--timing", action="store_true", help="Include wall time in reports")
    common.add_argument("--jobs", type=int, default=None, help="Parallel jobs for several input files")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="Log progress to stderr (-vv for algorithm tracing)")

    precision = argparse.ArgumentParser(add_help=False)
    precision.add_argument("--p", type=int, default=None, help="Prime (overrides the file)")
    precision.add_argument("--k", type=int, default=None, help="Precision exponent (overrides the file)")

    parser = argparse.ArgumentParser(
        prog="adelic-gates", description=__doc__.strip().splitlines()[0],
        epilog="Exit codes: 0 success, 2 unreadable input, 3 violated precondition or failed "
               "verification, 1 unexpected error. With several files, 1 wins over any other "
               "code; otherwise the largest code is returned.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", parents=[common, precision], help="Compile matrices into words")
    synth.add_argument("files", nargs="+", help="Matrix files")
    synth.add_argument("--target", choices=["gl2p", "glnp", "glnz"], default="gl2p")
    synth.add_argument("--strategy", choices=["swap", "transpose"], default="swap")

    glnz = sub.add_parser("glnz", parents=[common], help="Decompose integer matrices over GL_N(Z)")
    glnz.add_argument("files", nargs="+", help="Integer matrix files")

    snf = sub.add_parser("snf", parents=[common, precision], help="Smith normal form over Z_p")
    snf.add_argument("files", nargs="+", help="Matrix files")

    sim = sub.add_parser("sim", parents=[common], help="Simulate circuit files")
    sim.add_argument("files", nargs="+", help="Circuit files")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--samples", type=int, default=0, help="Number of Born-rule samples")

    oracle = sub.add_parser("oracle", parents=[common], help="Enumerate the generated subgroup of GL_2(Z/p^k)")
    oracle.add_argument("--p", type=int, required=True)
    oracle.add_argument("--k", type=int, required=True)
    oracle.add_argument("--budget", type=int, default=None, help="Maximum number of group elements")

    verify = sub.add_parser("verify", parents=[common, precision], help="Check a word against a matrix")
    verify.add_argument("files", nargs="+", help="Matrix files")
    verify.add_argument("--word", required=True, help="Word text, e.g. 'X P-^3 X'")
    verify.add_argument("--target", choices=["gl2p", "glnz"], default="gl2p")
    return parser


def combined_exit_code(codes: List[int]) -> int:
    """An unexpected failure in any job wins; otherwise the largest code."""
    if EXIT_UNEXPECTED in codes:
        return EXIT_UNEXPECTED
    return max(codes, default=EXIT_OK)


def _job_calls(args: argparse.Namespace) -> List[Dict[str, Any]]:
    if args.command == "oracle":
        return [{"p": args.p, "k": args.k, "budget": args.budget}]
    if args.command == "synth":
        extra = {"target": args.target, "strategy": args.strategy, "p": args.p, "k": args.k}
    elif args.command in ("snf",):
        extra = {"p": args.p, "k": args.k}
    elif args.command == "sim":
        extra = {"seed": args.seed, "samples": args.samples}
    elif args.command == "verify":
        extra = {"word": args.word, "target": args.target, "p": args.p, "k": args.k}
    else:
        extra = {}
    return [{"path": path, **extra} for path in args.files]


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    if args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    else:
        level = settings.log_level_number
    configure_cli_logging(level)

    toolkit = GateToolkit(timing=args.timing)
    calls = _job_calls(args)
    jobs = args.jobs if args.jobs is not None else settings.jobs
    if jobs < 1:
        parser.error("--jobs must be >= 1")
    results = run_jobs(lambda kwargs: toolkit.run(args.command, **kwargs), calls, jobs)

    reports, codes = [], []
    for result, call in zip(results, calls):
        if result.ok:
            report, code = result.value
        else:
            error = pattern_registry.describe(result.error)
            code = error["exit_code"]
            report = RunReport(command=args.command, inputs_digest=inputs_digest(args.command, call),
                               error=error)
        reports.append(report.to_json())
        codes.append(code)

    payload = reports[0] if len(reports) == 1 else reports
    text = canonical_json(payload) if args.format == "json" else render_table(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return combined_exit_code(codes)


if __name__ == "__main__":
    sys.exit(main())
