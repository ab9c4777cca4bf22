"""Few-photon simulator for driven-dissipative flux lattices.

The package models a weakly driven, lossy Bose-Hubbard lattice pierced by a
uniform synthetic magnetic flux. The low-occupation metastable state is built
order by order in the drive from block solves of the effective non-Hermitian
Hamiltonian, cross-checked against direct eigensolves and, on tiny lattices,
against the exact Lindblad steady state. Observables include centre-of-mass
photon correlations, projected two-point functions and the overlap with the
bosonic Laughlin state on the torus.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousMetastableError,
    BasisError,
    ConfigError,
    DegenerateSteadyStateError,
    DimensionGuardError,
    FillingError,
    GeometryError,
    OperatorError,
    PhotonFqhError,
    SolverError,
)
from .lattice import LatticeGeometry, ManifoldBasis, build_geometry, enumerate_manifold
from .operators import (
    HARD_CORE,
    DetectionMode,
    HeffBlocks,
    ModelParams,
    assemble_heff_blocks,
    build_link_phases,
    site_mode,
    uniform_mode,
)
from .steady_state import (
    MetastableState,
    residual_report,
    solve_eigen_metastable,
    solve_perturbative_chain,
)
from .observables import (
    g2_cm,
    g3_cm,
    gn_detection_mode,
    manifold_overlap,
    nonlinearity_estimate,
    onsite_g2,
    span_overlap,
    two_point_projected,
)
from .laughlin import (
    LaughlinConvention,
    build_laughlin,
    build_laughlin_pair,
    ed_ground_manifold,
)
from .lindblad import build_liouvillian, compare_gn, exact_steady_state
from .protocol import ProtocolSchedule, run_protocol
from .harness import run_mode

__all__ = [
    "__version__",
    "AmbiguousMetastableError",
    "BasisError",
    "ConfigError",
    "DegenerateSteadyStateError",
    "DimensionGuardError",
    "FillingError",
    "GeometryError",
    "OperatorError",
    "PhotonFqhError",
    "SolverError",
    "LatticeGeometry",
    "ManifoldBasis",
    "build_geometry",
    "enumerate_manifold",
    "HARD_CORE",
    "DetectionMode",
    "HeffBlocks",
    "ModelParams",
    "assemble_heff_blocks",
    "build_link_phases",
    "site_mode",
    "uniform_mode",
    "MetastableState",
    "residual_report",
    "solve_eigen_metastable",
    "solve_perturbative_chain",
    "g2_cm",
    "g3_cm",
    "gn_detection_mode",
    "manifold_overlap",
    "nonlinearity_estimate",
    "onsite_g2",
    "span_overlap",
    "two_point_projected",
    "LaughlinConvention",
    "build_laughlin",
    "build_laughlin_pair",
    "ed_ground_manifold",
    "build_liouvillian",
    "compare_gn",
    "exact_steady_state",
    "ProtocolSchedule",
    "run_protocol",
    "run_mode",
]
