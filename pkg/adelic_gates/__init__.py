"""
adelic_gates - exact gate synthesis over Z_p and Z, with complex, p-adic and
adelic state-vector simulators
"""

import logging

# The application using the library sets up handlers and levels.
logger = logging.getLogger(__name__)

from .errors import (
    AdelicGatesError,
    BudgetExceededError,
    DimensionError,
    FormatError,
    NotInvertibleError,
    UnsupportedPrimeError,
    pattern_registry,
)
from .config import Settings, get_settings, reset_settings
from .padic import (
    PadicInt,
    PadicUnit,
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
from .plinalg import (
    ElementaryMatrix,
    PadicMatrix,
    SmithDecomposition,
    det,
    elementary_divisor_check,
    is_gl,
    mat_mul,
    matrix_inverse,
    smith_normal_form,
)
from .psynth import (
    GateWord,
    TwoLevelGate,
    bfs_oracle,
    eval_word,
    format_word,
    gl2_order,
    parse_word,
    synth_gl2,
    synth_gln,
)
from .zsynth import IntMatrix, HRWord, decompose_glnz, eval_hr, hr_generators, reduce_mod
from .qsim import (
    AdelicGate,
    AdelicState,
    ComplexGate,
    ComplexState,
    PadicGate,
    PadicState,
    apply_adelic,
    apply_complex,
    apply_padic,
    measure_sample,
    padic_probabilities,
    probabilities,
)

__all__ = [
    'AdelicGatesError',
    'BudgetExceededError',
    'DimensionError',
    'FormatError',
    'NotInvertibleError',
    'UnsupportedPrimeError',
    'pattern_registry',
    'Settings',
    'get_settings',
    'reset_settings',
    'PadicInt',
    'PadicUnit',
    'Valuation',
    'arith',
    'format_padic',
    'inverse',
    'make',
    'parse_padic',
    'primitive_root',
    'recompose',
    'unit_decompose',
    'valuation',
    'ElementaryMatrix',
    'PadicMatrix',
    'SmithDecomposition',
    'det',
    'elementary_divisor_check',
    'is_gl',
    'mat_mul',
    'matrix_inverse',
    'smith_normal_form',
    'GateWord',
    'TwoLevelGate',
    'bfs_oracle',
    'eval_word',
    'format_word',
    'gl2_order',
    'parse_word',
    'synth_gl2',
    'synth_gln',
    'IntMatrix',
    'HRWord',
    'decompose_glnz',
    'eval_hr',
    'hr_generators',
    'reduce_mod',
    'AdelicGate',
    'AdelicState',
    'ComplexGate',
    'ComplexState',
    'PadicGate',
    'PadicState',
    'apply_adelic',
    'apply_complex',
    'apply_padic',
    'measure_sample',
    'padic_probabilities',
    'probabilities',
]
