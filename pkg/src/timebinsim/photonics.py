"""Photon generation from source qubits.

Two maps are provided. Double encoding appends a fresh photon whose time
bin copies the source's computational value, leaving the source active and
perfectly correlated with it:

    a|0> + b|1>  ->  a|0;E> + b|1;L>

Mapping transfers the qubit onto the photon outright; the source ends up
in its shelved level (parked) and the photon inherits the coefficients:

    a|0> + b|1>  ->  parked (x) (a|E> + b|L>)

An optional Bernoulli loss model covers imperfect emission: a failed call
leaves the state untouched and emits no photon; readout of the parked flag
heralds whether the photon was actually produced.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qstate import (
    PHOTON,
    SOURCE,
    StateVector,
    Subsystem,
    TargetError,
    LocalUnitary,
    apply_unitary,
    discard_parked,
)

# control is the first target
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class EmissionReport:
    source_id: str
    photon_id: str | None
    mode: str  # "encode" | "map"
    succeeded: bool


def _require_active_source(state: StateVector, source_id: str) -> None:
    if state.layout.entry(source_id).kind != SOURCE:
        raise TargetError(f"{source_id!r} is not a source")
    if source_id in state.layout.parked:
        raise TargetError(f"source {source_id!r} is parked")


def _fresh_photon_id(state: StateVector, source_id: str) -> str:
    taken = {e.id for e in state.layout.entries}
    k = 0
    while f"{source_id}.ph{k}" in taken:
        k += 1
    return f"{source_id}.ph{k}"


def _emission_fails(efficiency: float, rng) -> bool:
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")
    if efficiency >= 1.0:
        return False
    if rng is None:
        raise ValueError("a random generator is required when efficiency < 1")
    return rng.random() >= efficiency


@lru_cache(maxsize=256)
def _copy_positions_cached(n: int, axis: int) -> np.ndarray:
    i = np.arange(1 << n)
    positions = 2 * i + ((i >> (n - 1 - axis)) & 1)
    positions.flags.writeable = False
    return positions


def _copy_positions(n: int, axis: int) -> np.ndarray:
    """Flat indices placing amplitude i of an n-qubit register at the slot
    where a trailing photon qubit repeats the bit of the given axis."""
    if n <= 14:  # cached index tables stay small
        return _copy_positions_cached(n, axis)
    i = np.arange(1 << n)
    return 2 * i + ((i >> (n - 1 - axis)) & 1)


def _append_correlated_photon(state: StateVector, source_id: str, photon_id: str) -> StateVector:
    axis = state.layout.axis_of(source_id)
    n = state.num_active
    out = np.zeros(2 << n, dtype=complex)
    out[_copy_positions(n, axis)] = state.amplitudes
    layout = state.layout.with_appended(Subsystem(photon_id, PHOTON))
    return StateVector._trusted(layout, out)


def encode_qubit_to_photon(
    state: StateVector,
    source_id: str,
    *,
    photon_id: str | None = None,
    efficiency: float = 1.0,
    rng=None,
) -> tuple[StateVector, EmissionReport]:
    """Double-encode a source qubit into a new time-bin photon.

    The photon subsystem is appended at the end of the layout, in the state
    |E> on the source's |0> branch and |L> on its |1> branch.
    """
    _require_active_source(state, source_id)
    if _emission_fails(efficiency, rng):
        return state, EmissionReport(source_id, None, "encode", False)
    pid = photon_id or _fresh_photon_id(state, source_id)
    return _append_correlated_photon(state, source_id, pid), EmissionReport(
        source_id, pid, "encode", True
    )


def map_source_to_photon(
    state: StateVector,
    source_id: str,
    *,
    photon_id: str | None = None,
    efficiency: float = 1.0,
    rng=None,
) -> tuple[StateVector, EmissionReport]:
    """Move a source qubit onto a new photon and park the source.

    Realized as double encoding followed by a photon-controlled flip that
    resets the source, after which the source factorizes exactly and is
    parked. The photon carries the source's coefficients unchanged.
    """
    _require_active_source(state, source_id)
    if _emission_fails(efficiency, rng):
        return state, EmissionReport(source_id, None, "map", False)
    pid = photon_id or _fresh_photon_id(state, source_id)
    out = _append_correlated_photon(state, source_id, pid)
    out = apply_unitary(out, LocalUnitary((pid, source_id), _CNOT))
    out = discard_parked(out, source_id)
    return out, EmissionReport(source_id, pid, "map", True)


def map_all_sources(
    state: StateVector, *, efficiency: float = 1.0, rng=None
) -> tuple[StateVector, list[EmissionReport]]:
    """Map every active source onto a photon, in layout order.

    With ideal emission the photon register carries exactly the source
    coefficients with 0 -> E and 1 -> L, and every source reads out parked.
    """
    active_sources = [
        e.id for e in state.layout.entries
        if e.kind == SOURCE and e.id not in state.layout.parked
    ]
    if not active_sources:
        raise TargetError("no active sources to map")
    reports = []
    for sid in active_sources:
        state, report = map_source_to_photon(state, sid, efficiency=efficiency, rng=rng)
        reports.append(report)
    return state, reports


def readout_source(state: StateVector, source_id: str) -> bool:
    """Herald whether the source has fired, i.e. sits in its parked level."""
    if state.layout.entry(source_id).kind != SOURCE:
        raise TargetError(f"{source_id!r} is not a source")
    return source_id in state.layout.parked
