"""quadcat: four-component cat state generation in a truncated Fock space.

Simulates the interference of two two-component cat states (or two
photon-subtracted squeezed vacua) on a balanced beam splitter, followed by
realistic photon counting on one output mode, and scores the heralded states
with fidelity, Wigner, and displacement-QFI metrics.
"""

from .errors import (
    NonPositiveError,
    QuadcatError,
    TraceLossError,
    TruncationError,
    ZeroNormError,
)
from .fock_core import (
    DensityMatrix,
    FockState,
    Operator,
    TruncationConfig,
    TwoModeDensity,
    TwoModeState,
    annihilation_op,
    creation_op,
    fock_state,
    identity_op,
    normalize,
    number_op,
    parity_op,
    partial_trace,
    tensor,
    two_mode_index,
)
from .state_factory import (
    CatAxis,
    CatParity,
    CatPhase,
    SqueezeSign,
    coherent,
    four_cat,
    photon_subtract,
    squeezed_vacuum,
    two_cat,
)
from .optics import (
    LossChannel,
    apply_beam_splitter,
    apply_loss,
    beam_splitter_unitary,
    cat_circuit_output,
    displacement,
    loss_kraus_operators,
)
from .detection import (
    DetectorKind,
    DetectorModel,
    HeraldRecord,
    condition_on_povm,
    onoff_click_povm,
    pnrd_outcome_distribution,
    pnrd_project,
    pool_heralds,
    success_probability_closed_form,
)
from .metrics import (
    MeanHeraldedFidelity,
    QfiEstimate,
    WignerGrid,
    fidelity_pure,
    mean_heralded_fidelity,
    qfi_displacement,
    uhlmann_fidelity,
    wigner,
)
from .experiments import (
    OptimizationResult,
    SweepResult,
    herald_from_subtracted,
    optimize_squeezing,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
)

__version__ = "0.1.0"
