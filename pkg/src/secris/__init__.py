"""RIS-assisted secure beamforming with statistical eavesdropper CSI.

Builds the deterministic lower bound on the ergodic secrecy rate from the
eavesdropper's channel statistics, maximizes it jointly over RIS phases and
transmit beamformer with a penalty-dual double-loop solver, and validates
everything against Monte Carlo estimates and brute-force oracles.
"""

from .channel import (
    EveStatistics,
    FadingStats,
    Geometry,
    ScenarioChannels,
    build_scenario,
    eve_second_moments,
    pathloss_gain,
    sample_eve_batch,
    sample_eve_channels,
    ula_response,
    upa_response,
)
from .config import ExperimentConfig
from .montecarlo import EsrEstimate, esr_estimate, expectation_oracle
from .objective import (
    BeamQuadratics,
    DualState,
    PhaseQuadratics,
    Solution,
    al_objective,
    beam_quadratics,
    lesr,
    phase_quadratics,
    rate_eve_instant,
    rate_user,
)
from .solver import PdcaConfig, SolveTrace, bsca_inner, pdca_solve, project_power
from .baselines import (
    BaselineResult,
    ao_elementwise,
    dominant_gen_eigvec,
    no_ris_beamformer,
    random_phase_mrt,
)

__version__ = "0.1.0"
