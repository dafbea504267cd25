"""L1-norm theta series of rational lattices, cross-polytope packing search,
and Rayleigh-fading wiretap code analysis."""

__version__ = "0.1.0"

from .errors import (
    CapExceeded,
    CrossthetaError,
    IdentityMismatch,
    Infeasible,
    InsufficientConstellation,
    InvalidLattice,
    NoConvergence,
    NonIntegralResult,
    NoSignChange,
    NotIntegral,
    NotSublattice,
)
from .lattices import (
    IntegerLattice,
    Lattice,
    lattice_from_json,
    lattice_from_text,
    lattice_to_json,
    lattice_to_text,
    load_lattice,
    save_lattice,
)
from .codes import (
    CodeLatticePair,
    LinearCode,
    SweEnumerator,
    code_from_lattice,
    construction_a,
    dual_code,
    enumerate_codewords,
    macwilliams_swe,
    swe,
)
from .series import PowerSeries, ThetaRational
from .theta import (
    theta_crossover,
    theta_from_swe,
    theta_l1_construction_a,
    theta_l1_dual_construction_a,
    theta_l1_lattice,
    theta_lp_bruteforce,
    theta_orthogonal_comparison,
)
from .geometry import (
    MinimalVectorSet,
    PackingReport,
    enumerate_within_l1,
    halfnorm_pair_count,
    l1_minimum,
    lll_reduce,
    packing_report,
)
from .bounds import (
    bound_Pce,
    bound_Peb,
    bound_curves,
    ecdp_estimate,
    eval_F,
    eval_G,
    inverse_norm_sum,
)
from .packing import (
    MinimalConfiguration,
    PackingSolution,
    SearchOptions,
    SolveOptions,
    enumerate_configurations,
    search,
    solve_configuration,
    verify_local_criticality,
)
from .simulation import (
    CosetCode,
    SimConfig,
    SimResult,
    build_coset_code,
    compare_sublattices,
    simulate,
)
