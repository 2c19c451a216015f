"""Exact toric-code PEPS transfer-operator spectra and translation-symmetry
fractionalization classification."""

from .classify import (
    PeriodicityReport,
    SetClassification,
    SplittingFit,
    classify_eta,
    fit_splitting_decay,
    periodicity_residual,
    sweep_w,
)
from .errors import (
    CapacityError,
    InsufficientSamplesError,
    InvalidParameterError,
    NumericalFailureError,
    SetscopeError,
    VerificationError,
)
from .model import (
    APattern,
    BondTensor,
    ModelParams,
    SiteTensor,
    build_a_pattern,
    build_bond_tensor,
    build_site_tensor,
)
from .momentum import (
    BlockMatrix,
    MomentumBasis,
    OrbitClass,
    assemble_all_blocks,
    assemble_block,
    build_momentum_basis,
    enumerate_orbits,
    momentum_compatible,
)
from .pipeline import PipelinePoint, Tolerances, run_point
from .spectra import (
    BlockSpectrum,
    GapPoint,
    GroundSet,
    SclPoint,
    SclResult,
    SpectrumSet,
    diagonalize_block,
    gap_gamma,
    identify_ground_set,
    scl_minima,
)
from .transfer import (
    DoubleBond,
    TransferOperator,
    apply_transfer,
    build_double_bond,
    build_transfer,
)

__version__ = "0.1.0"
