"""Error bounds and phase optimization for multi-RIS mmWave positioning.

The package maps a scenario (BS, reflecting panels, mobile user, radio
constants) to estimation-theoretic position and rotation error bounds, and
searches the panel phase shifts that minimize them.
"""

from .errors import (
    AllSingular,
    ConfigError,
    DegenerateGeometry,
    InvariantError,
    RisboundError,
    SchemaError,
    SingularFim,
    SingularJacobian,
)
from .geometry import (
    GeometryOut,
    JacobianT,
    ParamLayout,
    PathLossConfig,
    RadioConfig,
    RisPanel,
    Scenario,
    ShadowingMode,
    SPEED_OF_LIGHT,
    compute_geometry,
    jacobian_T,
)
from .channel import (
    ChannelRealization,
    PhaseProfile,
    Precoder,
    SignalModel,
    channel_matrix,
    channel_realization,
    default_precoder,
    los_path_loss,
    mean_signal,
    phase_matrix_diagonal,
    profile_sizes,
    ris_cascade,
    ris_path_loss,
    sample_shadowing,
    steer_ula,
    steer_upa,
    wrap_phase,
)
from .fim import (
    BoundEvaluator,
    ChannelParams,
    FimMode,
    FisherResult,
    evaluate_bounds,
    fim_eta,
    mu_derivatives,
    peb_reb_from_fim,
    position_fim,
)
from .optimizer import (
    Objective,
    PsoConfig,
    PsoRun,
    beam_aligned_phases,
    pso_minimize,
    pso_optimize,
    random_phases,
)
from .cli import (
    SweepResultRow,
    bundled_scenario_path,
    load_scenario,
    scenario_from_dict,
    sweep_ris_count,
    sweep_ris_size,
    with_active_ris,
    with_ris_side,
)

__version__ = "0.1.0"
