"""Minimum-error measurements for symmetric coherent-state codebooks."""

from .baselines import (
    dolinar_binary_pe,
    pcppm_homodyne_ps,
    pcppm_structured_pe,
    ppm_pnr_pe,
    two_pulse_pnr_ps,
)
from .cgu import (
    BlockSystem,
    SymmetryPattern,
    analyze_fig1,
    block_reduce,
    find_fig1_subcode,
    pcppm_mpe_ps,
    solve_blocks_ykl,
    symmetry_reduced_solve,
)
from .cli import classify, solve
from .coherent import (
    BinaryLinearCode,
    Codebook,
    CoherentCodeword,
    bpsk_codebook,
    gram,
    inner_product,
    load_codebook,
    pcppm_codebook,
    ppm_codebook,
    rm_code,
    save_codebook,
    ternary_codebook,
    two_pulse_ppm_codebook,
    weighted_gram,
)
from .errors import *  # noqa: F401,F403
from .gu import gu_measurement, isotypic_overlaps, pgm, ppm_mpe_pe, two_pulse_ppm_mpe_ps
from .ykl import MeasurementSolution, YklReport, build_upsilon, load_solution, save_solution, verify

__version__ = "0.1.0"
