"""On-demand multi-photon time-bin entanglement, simulated.

Source qubits are entangled pairwise by a repeat-until-success gate built
on a mutually unbiased photon-pair measurement, prepared into chain states
(GHZ, W, 1-D cluster), and finally mapped onto freshly emitted time-bin
photons. A small companion module reproduces the two-atom double-slit
emission pattern behind the gate's interferometric stability.
"""

from .qstate import (
    SOURCE,
    PHOTON,
    Subsystem,
    SubsystemLayout,
    StateVector,
    LocalUnitary,
    MeasurementRecord,
    QStateError,
    LayoutError,
    TargetError,
    BasisError,
    ProjectionError,
    EntanglementError,
    source_register,
    product_state,
    apply_unitary,
    measurement_probabilities,
    measure_in_basis,
    fidelity_up_to_phase,
    discard_parked,
)
from .photonics import (
    EmissionReport,
    encode_qubit_to_photon,
    map_source_to_photon,
    map_all_sources,
    readout_source,
)
from .mubgate import (
    CZ,
    phase_z,
    PairMeasurementBasis,
    CorrectionRecord,
    GateRound,
    GateTranscript,
    GateIncompleteError,
    LossModel,
    LossyGateOutcome,
    mub_pair_basis,
    encode_pair,
    pair_outcome_probabilities,
    measure_photon_pair,
    correction_for,
    apply_correction_inverse,
    rus_cz,
    rus_cz_lossy,
    expected_attempts,
)
from .mps import (
    CzSandwich,
    MpsRecipe,
    RecipeError,
    excitation_rotation,
    preset_recipe,
    prepare_mps,
    prepare_via_rus,
    save_recipe,
    load_recipe,
)
from .interference import (
    Direction,
    EmissionConfig,
    TwoAtomState,
    IntensityMap,
    StateError,
    dipole_amplitude,
    reset_operator,
    intensity,
    intensity_terms,
    bloch_generator,
    steady_state_single_atom,
    scan_pattern,
)

__version__ = "0.1.0"
