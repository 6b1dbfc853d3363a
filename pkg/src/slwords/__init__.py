"""Short words in SL_m(Z/p^n Z) over arbitrary generating sets.

Typical use::

    from slwords import GroupSpec, GeneratingSet, Synthesizer, evaluate
    spec = GroupSpec(p=3, m=2, n=6)
    S = GeneratingSet(spec, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
    syn = Synthesizer(S)
    w = syn.synthesize(target)
    assert evaluate(w, S) == target
"""

from .errors import (
    BadIndex,
    InvalidGroupSpec,
    NotAUnit,
    NotCongruent,
    NotGenerating,
    NotNilpotentEnough,
    ParseError,
    PrecisionExhausted,
    Singular,
    SLWordsError,
    TooLarge,
    VerificationError,
    WrongDimension,
)
from .lab import BenchRow, bench_lengths, emit_csv, exact_diameter, parse_csv, worst_case_sample
from .lie import LieElement, bracket, solve_bracket_sl2, solve_two_brackets
from .logexp import trunc_exp, trunc_log, verify_diagram
from .residues import GroupSpec, ModMatrix, ResidueInt, group_order, random_sl
from .search import BaseTable, bidirectional_search, build_base_table, cayley_bfs
from .synth import SynthConfig, Synthesizer, realize_level, synthesize, verify
from .words import GeneratingSet, evaluate, free_reduce, format_word, parse_word

__version__ = "0.1.0"
