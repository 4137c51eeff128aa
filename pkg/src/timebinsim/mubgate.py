"""Entangling two sources through a photon-pair measurement.

Each round double-encodes the two gate qubits into a pair of time-bin
photons and measures the pair in a four-state basis that is mutually
unbiased with respect to the time-bin basis, so the outcome reveals nothing
about the stored amplitudes. Two of the outcomes herald completion of a
controlled-phase gate on the sources, up to local phase rotations; the
other two return the input, again up to local rotations. Rounds therefore
repeat without information loss until one of the heralding outcomes fires,
which happens with probability 1/2 per round.

A Bernoulli loss model covers finite photon creation and detection
efficiency: a missing click aborts the gate and invalidates the two qubits,
since the lost photon carried which-path information about them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .photonics import encode_qubit_to_photon
from .qstate import StateVector, LocalUnitary, apply_unitary, _measure, _check_basis

CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def phase_z(phi: float) -> np.ndarray:
    """Single-qubit phase gate diag(1, e^{-i phi})."""
    return np.diag([1.0, np.exp(-1j * phi)])


class GateIncompleteError(Exception):
    """Raised when the round budget runs out before a heralding outcome.

    Carries the still-valid corrected register (equal to the round input)
    and the transcript accumulated so far.
    """

    def __init__(self, state: StateVector, transcript: "GateTranscript"):
        super().__init__(f"no success within {transcript.rounds_used} rounds")
        self.state = state
        self.transcript = transcript


def _build_pair_states() -> np.ndarray:
    """The four pair states, rows in the (EE, EL, LE, LL) amplitude order."""
    e_plus = np.exp(1j * np.pi / 4)
    e_minus = np.exp(-1j * np.pi / 4)
    return np.array(
        [
            0.5 * e_plus * np.array([1, -1j, 1j, -1]),
            -0.5 * e_minus * np.array([1, 1j, -1j, -1]),
            0.5 * np.array([1, 1, 1, 1]),
            0.5j * np.array([1, -1, -1, 1]),
        ],
        dtype=complex,
    )


@dataclass(frozen=True, eq=False)
class PairMeasurementBasis:
    """Four orthonormal two-photon states; outcomes 1 and 2 herald success."""

    states: np.ndarray = field(default_factory=_build_pair_states)
    success_outcomes: tuple[int, int] = (1, 2)

    def __post_init__(self):
        m = np.array(self.states, dtype=complex)
        _check_basis(m, 2)
        m.flags.writeable = False
        object.__setattr__(self, "states", m)

    def classification(self, outcome: int) -> str:
        return "success" if outcome in self.success_outcomes else "repeat"


_PAIR_BASIS = PairMeasurementBasis()


def mub_pair_basis() -> PairMeasurementBasis:
    """The photon-pair measurement basis used by the entangling gate."""
    return _PAIR_BASIS


@dataclass(frozen=True)
class CorrectionRecord:
    """How a measured post-state relates to the gate's target state.

    The post-state equals global_phase * Z(phi) rotations * T * input,
    where T is the controlled-phase gate for net_effect "ucz_applied" and
    the identity for "identity". Undoing the local gates and the phase
    therefore yields T * input exactly.
    """

    outcome: int
    local_gates: tuple[tuple[int, float], ...]  # (qubit slot 1|2, phi)
    global_phase: complex
    net_effect: str  # "ucz_applied" | "identity"


_CORRECTIONS = {
    1: CorrectionRecord(1, ((1, np.pi / 2), (2, -np.pi / 2)), np.exp(-1j * np.pi / 4), "ucz_applied"),
    2: CorrectionRecord(2, ((1, -np.pi / 2), (2, np.pi / 2)), -np.exp(1j * np.pi / 4), "ucz_applied"),
    3: CorrectionRecord(3, (), 1.0 + 0.0j, "identity"),
    4: CorrectionRecord(4, ((1, np.pi), (2, np.pi)), -1.0j, "identity"),
}


def correction_for(outcome: int) -> CorrectionRecord:
    if outcome not in _CORRECTIONS:
        raise ValueError(f"outcome must be 1..4, got {outcome}")
    return _CORRECTIONS[outcome]


@dataclass(frozen=True, eq=False)
class LossModel:
    """Per-photon end-to-end click probability (creation times detection)."""

    eta: float
    failure_policy: str = "reinitialize"

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.failure_policy != "reinitialize":
            raise ValueError(f"unknown failure policy {self.failure_policy!r}")


@dataclass(frozen=True)
class GateRound:
    outcome: int
    probability: float
    correction: CorrectionRecord


@dataclass(frozen=True)
class GateTranscript:
    rounds: tuple[GateRound, ...]
    succeeded: bool

    @property
    def rounds_used(self) -> int:
        return len(self.rounds)


@dataclass(frozen=True, eq=False)
class LossyGateOutcome:
    """Result of a lossy gate: either a finished state or a hard failure."""

    succeeded: bool
    state: StateVector | None
    transcript: GateTranscript
    failed_round: int | None = None


def encode_pair(state: StateVector, src_a: str, src_b: str) -> tuple[StateVector, tuple[str, str]]:
    """Double-encode both gate qubits; returns the state and the photon ids."""
    state, rep_a = encode_qubit_to_photon(state, src_a)
    state, rep_b = encode_qubit_to_photon(state, src_b)
    return state, (rep_a.photon_id, rep_b.photon_id)


def pair_outcome_probabilities(state: StateVector, photon_a: str, photon_b: str) -> np.ndarray:
    """Analytic Born probabilities of the four pair outcomes (no sampling)."""
    axes = (state.layout.axis_of(photon_a), state.layout.axis_of(photon_b))
    flat_coeffs = _PAIR_BASIS.states.conj() @ _flatten_pair(state, axes)
    return (flat_coeffs.real**2 + flat_coeffs.imag**2).sum(axis=1)


def _flatten_pair(state, axes):
    n = state.num_active
    t = state.amplitudes.reshape([2] * n)
    t = np.moveaxis(t, axes, (0, 1))
    return t.reshape(4, -1)


def measure_photon_pair(
    state: StateVector, photon_a: str, photon_b: str, rng, force: int | None = None
) -> tuple[int, StateVector, float]:
    """Measure two photons in the pair basis; they leave the register.

    Returns the outcome (1..4), the normalized post-state of the remaining
    subsystems, and the outcome's probability.
    """
    record = _measure(
        state,
        (photon_a, photon_b),
        _PAIR_BASIS.states,
        rng,
        None if force is None else force - 1,
    )
    return record.outcome_index + 1, record.post_state, record.probability


def apply_correction_inverse(
    state: StateVector, src_a: str, src_b: str, record: CorrectionRecord
) -> StateVector:
    """Undo a round's local rotations and scalar, exposing the net gate."""
    slots = {1: src_a, 2: src_b}
    for slot, phi in record.local_gates:
        state = apply_unitary(state, LocalUnitary((slots[slot],), phase_z(-phi)))
    phase = record.global_phase
    scale = phase.conjugate() / abs(phase)
    return StateVector._trusted(state.layout, state.amplitudes * scale)


def _one_round(state, src_a, src_b, rng):
    encoded, (pa, pb) = encode_pair(state, src_a, src_b)
    outcome, post, prob = measure_photon_pair(encoded, pa, pb, rng)
    record = correction_for(outcome)
    corrected = apply_correction_inverse(post, src_a, src_b, record)
    return outcome, prob, record, corrected


def rus_cz(
    state: StateVector, src_a: str, src_b: str, rng, max_rounds: int = 64
) -> tuple[StateVector, GateTranscript]:
    """Run encode / measure / correct rounds until a heralding outcome.

    On success the returned state equals the controlled-phase gate applied
    to the input (exactly, since the scalar is also unwound); the round
    count is geometric with success probability 1/2.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    rounds = []
    for _ in range(max_rounds):
        outcome, prob, record, state = _one_round(state, src_a, src_b, rng)
        rounds.append(GateRound(outcome, prob, record))
        if outcome in _PAIR_BASIS.success_outcomes:
            return state, GateTranscript(tuple(rounds), True)
    raise GateIncompleteError(state, GateTranscript(tuple(rounds), False))


def rus_cz_lossy(
    state: StateVector,
    src_a: str,
    src_b: str,
    loss: LossModel,
    rng,
    max_rounds: int = 64,
) -> LossyGateOutcome:
    """Like rus_cz, but each photon clicks only with probability eta.

    A missing click is a hard failure: the round's photons are gone, the
    two gate qubits are invalid, and the caller must reinitialize them. At
    eta = 1 the behavior (and random stream use) is identical to rus_cz.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    rounds = []
    for r in range(1, max_rounds + 1):
        if loss.eta < 1.0:
            # detection draws precede the outcome draw; a miss skips the
            # round's quantum work entirely
            clicks = rng.random(2) < loss.eta
            if not clicks.all():
                return LossyGateOutcome(False, None, GateTranscript(tuple(rounds), False), r)
        outcome, prob, record, state = _one_round(state, src_a, src_b, rng)
        rounds.append(GateRound(outcome, prob, record))
        if outcome in _PAIR_BASIS.success_outcomes:
            return LossyGateOutcome(True, state, GateTranscript(tuple(rounds), True), None)
    raise GateIncompleteError(state, GateTranscript(tuple(rounds), False))


def expected_attempts(loss: LossModel) -> float:
    """Mean rounds to a conclusive success when failed rounds are retried."""
    if loss.eta <= 0.0:
        raise ValueError("expected attempts diverge at eta = 0")
    return 1.0 / (loss.eta**2 * 0.5)
