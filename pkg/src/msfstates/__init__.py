"""Quantum and classical states of a charged particle in a uniform magnetic
field threaded by an ideal magnetic flux line."""

from .classical import (
    BOUNDARY,
    ClassicalOrbit,
    FluxConfig,
    Units,
    classical_a,
    classical_observables,
    classify_orbit,
    kinetic_to_a,
    orbit_state,
)
from .coherent import (
    CoefficientLattice,
    CoherentParams,
    MeanReport,
    apply_ladder,
    build_lattice,
    delta_fn,
    evolve,
    mean_a,
    mean_geometry,
    mean_n,
    observable_moments,
    overlap,
    q_fn,
    q_minus,
    q_tilde,
    t_fn,
    wavefunction,
    y_fn,
)
from .errors import (
    BranchCutError,
    ConfigError,
    ConvergenceError,
    DomainError,
    QuadratureError,
    TruncationBudgetError,
)
from .spectrum import (
    IRREGULAR,
    ZERO,
    LevelEntry,
    QuantumNumbers,
    eigenfunction,
    energy_lz,
    inner_product,
    ladder_apply,
    level_diagram,
    make_qn,
    mean_r2_rc2,
)
from .specfun import (
    EvalResult,
    bessel_i,
    bessel_j,
    laguerre_fn,
    laguerre_poly,
    log_gamma,
)

__version__ = "0.1.0"
