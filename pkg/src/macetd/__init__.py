"""Exponential time differencing solvers for the matrix-valued Allen-Cahn
equation on periodic grids, with built-in verification of the sup-norm
bound, monotone energy decay, and temporal convergence order."""

from .config import ConfigError, Notice, SimConfig, hypothesis_notices, parse_config, serialize_config
from .convergence import ConvergenceReport, convergence_study, observed_rates, reference_solution
from .fields import GridSpec, determinant_field, discrete_energy, l2_field_norm, sup_frob_norm
from .initial_conditions import EXAMPLES, InitialCondition, make_initial_field
from .io import RunWriter, read_snapshot, write_determinant_pgm, write_monitor_csv, write_snapshot
from .lemmas import LemmaSuiteReport, energy_kappa, lemma_suite, mbp_kappa
from .matrices import (
    DegenerateProjectionError,
    SvdConvergenceError,
    SvdTriple,
    frob_inner,
    frob_norm,
    nonlinear_term,
    potential_trace,
    project_orthogonal,
    stabilized_nonlinear_term,
    svd_small,
)
from .spectral import (
    LaplacianSymbol,
    PropagatorTables,
    build_propagator,
    dissipation_symbol_check,
    dissipation_y1,
    dissipation_y2,
    fft_forward,
    fft_inverse,
    laplacian_symbol,
    phi1,
    phi2,
)
from .stepping import (
    CheckResult,
    DivergenceError,
    MonitorSeries,
    Scheme,
    SolverState,
    check_energy_monotone,
    check_mbp,
    etd1_step,
    etdrk2_step,
    integrate,
    run_simulation,
)

__version__ = "0.1.0"
