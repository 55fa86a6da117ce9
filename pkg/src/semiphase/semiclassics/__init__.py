"""Case-study wave-function families, their closed-form limit measures,
WKB characteristic machinery, the classical Liouville push-forward and the
eps-sweep convergence driver."""

from .families import (
    CaseStudyFamily,
    CellPhase,
    CoherentState,
    Concentrating,
    HarmonicEigenstate,
    ModulatedPlaneWave,
    PeriodicOscillatory,
    PhaseSpec,
    Profile,
    ResolutionError,
    TwoPhaseWKB,
    WKBSingle,
    min_feature_length,
    synthesize,
)
from .limits import limit_bohmian, limit_wigner
from .sweep import SweepConfig, SweepResult, SweepRow, choose_grid_size, epsilon_sweep
from .wkb import (
    WKBState,
    caustic_time,
    classical_flow,
    hj_characteristics,
    liouville_pushforward,
    wkb_wavefunction,
)

__all__ = [
    "CaseStudyFamily",
    "CellPhase",
    "CoherentState",
    "Concentrating",
    "HarmonicEigenstate",
    "ModulatedPlaneWave",
    "PeriodicOscillatory",
    "PhaseSpec",
    "Profile",
    "ResolutionError",
    "TwoPhaseWKB",
    "WKBSingle",
    "WKBState",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "caustic_time",
    "choose_grid_size",
    "classical_flow",
    "epsilon_sweep",
    "hj_characteristics",
    "limit_bohmian",
    "limit_wigner",
    "liouville_pushforward",
    "min_feature_length",
    "synthesize",
    "wkb_wavefunction",
]
