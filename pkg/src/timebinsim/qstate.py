"""Complex state-vector engine over labelled two-level subsystems.

A register mixes two kinds of subsystems: emitter qubits ("sources",
computational basis |0>, |1>) and time-bin photon qubits ("photons",
basis |E>, |L> for early/late emission slots). Amplitudes are stored
big-endian over the active subsystems in layout order, so the first active
entry is the most significant bit of the vector index.

A source that has fired its final photon is shelved in a side level that
carries no amplitude. Such an entry stays in the layout, flagged as parked,
and the amplitude vector shrinks by a factor of two. Parking is only legal
when the source factorizes exactly out of the register, which is checked.

All values here are immutable; every operation returns fresh objects.
States can therefore be shared freely across threads, and Monte Carlo
trials parallelize by giving each trial its own random generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12      # unitarity / normalization of inputs
CHECK_TOL = 1e-10     # accumulated numerical checks (bases, product tests)
SAMPLE_FLOOR = 1e-14  # probabilities below this are never sampled
MAX_ACTIVE = 24       # dense vectors beyond this are a usage bug

SOURCE = "source"
PHOTON = "photon"

_BASIS_CHARS = {SOURCE: "01", PHOTON: "EL"}


class QStateError(Exception):
    """Base class for register-level failures."""


class LayoutError(QStateError):
    """Subsystem bookkeeping does not match the amplitude data."""


class TargetError(QStateError):
    """An operation addressed an unknown, parked or wrong-kind subsystem."""


class BasisError(QStateError):
    """A measurement basis is not orthonormal and complete."""


class ProjectionError(QStateError):
    """A forced measurement outcome has zero probability."""


class EntanglementError(QStateError):
    """A source was asked to factor out of the register but is entangled."""


@dataclass(frozen=True)
class Subsystem:
    id: str
    kind: str

    def __post_init__(self):
        if self.kind not in (SOURCE, PHOTON):
            raise LayoutError(f"unknown subsystem kind {self.kind!r}")


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered registry of subsystems plus the per-source parked flags.

    Active subsystems (everything not parked) carry amplitude degrees of
    freedom; the register dimension is 2 ** len(active).
    """

    entries: tuple[Subsystem, ...]
    parked: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "parked", frozenset(self.parked))
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise LayoutError("subsystem ids must be unique")
        by_id = {e.id: e for e in self.entries}
        for sid in self.parked:
            if sid not in by_id:
                raise LayoutError(f"parked id {sid!r} is not in the layout")
            if by_id[sid].kind != SOURCE:
                raise LayoutError(f"only sources can be parked, got {sid!r}")
        active = tuple(e for e in self.entries if e.id not in self.parked)
        if len(active) > MAX_ACTIVE:
            raise LayoutError(f"more than {MAX_ACTIVE} active subsystems")
        object.__setattr__(self, "_active", active)
        object.__setattr__(self, "_axis", {e.id: i for i, e in enumerate(active)})

    @property
    def active(self) -> tuple[Subsystem, ...]:
        return self._active

    @property
    def dim(self) -> int:
        return 1 << len(self._active)

    def entry(self, sid: str) -> Subsystem:
        for e in self.entries:
            if e.id == sid:
                return e
        raise TargetError(f"unknown subsystem id {sid!r}")

    def axis_of(self, sid: str) -> int:
        """Position of an active subsystem among the vector's tensor axes."""
        self.entry(sid)
        if sid in self.parked:
            raise TargetError(f"subsystem {sid!r} is parked")
        return self._axis[sid]

    def _derive(self, key, build) -> "SubsystemLayout":
        # repeated append/measure cycles (the RUS hot loop) walk the same
        # layout transitions over and over; memoize them on the instance
        cache = self.__dict__.get("_derived")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_derived", cache)
        layout = cache.get(key)
        if layout is None:
            layout = cache[key] = build()
        return layout

    def with_appended(self, subsystem: Subsystem) -> "SubsystemLayout":
        return self._derive(
            ("app", subsystem.id, subsystem.kind),
            lambda: SubsystemLayout(self.entries + (subsystem,), self.parked),
        )

    def with_parked(self, sid: str) -> "SubsystemLayout":
        if self.entry(sid).kind != SOURCE:
            raise TargetError(f"cannot park non-source {sid!r}")
        return self._derive(
            ("park", sid), lambda: SubsystemLayout(self.entries, self.parked | {sid})
        )

    def without(self, sids) -> "SubsystemLayout":
        sids = tuple(sids)

        def build():
            gone = set(sids)
            for sid in gone:
                self.entry(sid)
            return SubsystemLayout(
                tuple(e for e in self.entries if e.id not in gone),
                frozenset(s for s in self.parked if s not in gone),
            )

        return self._derive(("wo", sids), build)


def source_register(n: int, prefix: str = "s") -> SubsystemLayout:
    """Layout of n source qubits named s0, s1, ..."""
    return SubsystemLayout(tuple(Subsystem(f"{prefix}{i}", SOURCE) for i in range(n)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over the layout's active subsystems."""

    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != self.layout.dim:
            raise LayoutError(
                f"amplitude vector has length {amps.shape}, layout needs {self.layout.dim}"
            )
        norm = math.sqrt(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise LayoutError(f"state vector norm {norm!r} is not 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def _trusted(cls, layout: SubsystemLayout, amps: np.ndarray) -> "StateVector":
        # internal fast path: amps must be a fresh complex buffer whose norm
        # is guaranteed by construction (unitary image, explicit division)
        self = object.__new__(cls)
        amps.flags.writeable = False
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)
        return self

    @property
    def num_active(self) -> int:
        return len(self.layout.active)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def basis_labels(self) -> list[str]:
        """One label per amplitude, '0'/'1' for sources and 'E'/'L' for photons."""
        kinds = [e.kind for e in self.layout.active]
        n = len(kinds)
        return [
            "".join(_BASIS_CHARS[k][(i >> (n - 1 - j)) & 1] for j, k in enumerate(kinds))
            for i in range(self.dim)
        ]


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """A unitary acting on an ordered subset of subsystems.

    targets[0] indexes the most significant bit of the matrix.
    """

    targets: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        m = np.array(self.matrix, dtype=complex)
        dim = 1 << len(self.targets)
        if m.shape != (dim, dim):
            raise LayoutError(f"matrix shape {m.shape} does not fit {len(self.targets)} targets")
        if np.abs(m.conj().T @ m - np.eye(dim)).max() > NORM_TOL:
            raise ValueError("matrix is not unitary")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    outcome_index: int
    probability: float
    post_state: StateVector


def product_state(layout: SubsystemLayout, locals_: Sequence[np.ndarray]) -> StateVector:
    """Tensor product of per-subsystem 2-vectors, in layout (active) order."""
    active = layout.active
    if len(locals_) != len(active):
        raise LayoutError(f"{len(locals_)} local states for {len(active)} active subsystems")
    amps = np.ones(1, dtype=complex)
    for vec in locals_:
        v = np.asarray(vec, dtype=complex)
        if v.shape != (2,):
            raise LayoutError(f"local state has shape {v.shape}, expected (2,)")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise LayoutError("local state is not normalized")
        amps = np.kron(amps, v)
    return StateVector(layout, amps)


def _front_perm(n: int, axes: list[int]) -> list[int]:
    lead = set(axes)
    return list(axes) + [i for i in range(n) if i not in lead]


def _front_axes(amps: np.ndarray, n: int, axes: list[int]) -> np.ndarray:
    """View amplitudes as (2**k, rest) with the given axes moved to front."""
    t = amps.reshape([2] * n)
    if axes != list(range(len(axes))):
        t = t.transpose(_front_perm(n, axes))
    return t.reshape(1 << len(axes), -1)


def apply_unitary(state: StateVector, u: LocalUnitary) -> StateVector:
    """Apply u on its target subsystems, identity elsewhere."""
    layout = state.layout
    axes = [layout.axis_of(t) for t in u.targets]
    if len(set(axes)) != len(axes):
        raise TargetError("duplicate targets")
    n = state.num_active
    flat = u.matrix @ _front_axes(state.amplitudes, n, axes)
    t = flat.reshape([2] * n)
    if axes != list(range(len(axes))):
        perm = _front_perm(n, axes)
        inverse = [0] * n
        for i, p in enumerate(perm):
            inverse[p] = i
        t = t.transpose(inverse)
    return StateVector._trusted(layout, np.ascontiguousarray(t).reshape(-1))


def _check_basis(basis: np.ndarray, k: int) -> None:
    dim = 1 << k
    if basis.ndim != 2 or basis.shape[1] != dim:
        raise BasisError(f"basis states must have dimension {dim}")
    if basis.shape[0] != dim:
        raise BasisError(f"basis has {basis.shape[0]} states, subspace needs {dim}")
    gram = basis.conj() @ basis.T
    if np.abs(gram - np.eye(dim)).max() > CHECK_TOL:
        raise BasisError("basis is not orthonormal")


def _born_probabilities(state: StateVector, targets, basis: np.ndarray):
    axes = [state.layout.axis_of(t) for t in targets]
    if len(set(axes)) != len(axes):
        raise TargetError("duplicate targets")
    flat = _front_axes(state.amplitudes, state.num_active, axes)
    coeffs = basis.conj() @ flat            # (outcomes, rest)
    probs = (coeffs.real**2 + coeffs.imag**2).sum(axis=1)
    return probs, coeffs


def measurement_probabilities(state: StateVector, targets, basis) -> np.ndarray:
    """Analytic Born probabilities of each basis outcome (no sampling)."""
    b = np.asarray(basis, dtype=complex)
    _check_basis(b, len(tuple(targets)))
    probs, _ = _born_probabilities(state, tuple(targets), b)
    return probs


def _measure(state, targets, basis, rng, force=None) -> MeasurementRecord:
    probs, coeffs = _born_probabilities(state, targets, basis)
    if force is None:
        p = np.where(probs < SAMPLE_FLOOR, 0.0, probs)
        cdf = np.cumsum(p)
        cdf /= cdf[-1]
        outcome = int(np.searchsorted(cdf, rng.random(), side="right"))
    else:
        outcome = int(force)
        if not 0 <= outcome < len(basis):
            raise ProjectionError(f"outcome {outcome} out of range")
        if probs[outcome] < SAMPLE_FLOOR:
            raise ProjectionError(f"forced outcome {outcome} has zero probability")
    post = coeffs[outcome] / math.sqrt(probs[outcome])
    new_layout = state.layout.without(targets)
    return MeasurementRecord(
        outcome, float(probs[outcome]), StateVector._trusted(new_layout, post)
    )


def measure_in_basis(state: StateVector, targets, basis, rng, force: int | None = None) -> MeasurementRecord:
    """Projective measurement of the target subsystems in the given basis.

    The basis is a complete orthonormal set on the target subspace (rows of
    a 2**k x 2**k array, targets[0] being the most significant bit). The
    outcome is Born-sampled from rng unless force is given; the measured
    subsystems are removed from the returned state's layout.
    """
    targets = tuple(targets)
    b = np.asarray(basis, dtype=complex)
    _check_basis(b, len(targets))
    return _measure(state, targets, b, rng, force)


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>| in [0, 1]; 1 exactly when the states agree up to a global phase.

    Overlaps within the input tolerance of 1 are snapped to exactly 1.0 so
    the equality test is not at the mercy of the last floating-point ulp.
    """
    if a.layout.entries != b.layout.entries or a.layout.parked != b.layout.parked:
        raise LayoutError("states live on different layouts")
    f = float(abs(np.vdot(a.amplitudes, b.amplitudes)))
    return 1.0 if abs(f - 1.0) <= NORM_TOL else f


def discard_parked(state: StateVector, source_id: str) -> StateVector:
    """Factor an exactly-product source out of the register and park it.

    The source axis is split off and checked for a rank-one (product)
    structure; anything entangled raises, since parking an entangled source
    would silently corrupt the remaining state.
    """
    layout = state.layout
    if layout.entry(source_id).kind != SOURCE:
        raise TargetError(f"{source_id!r} is not a source")
    axis = layout.axis_of(source_id)
    n = state.num_active
    m = _front_axes(state.amplitudes, n, [axis])
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[-1] > CHECK_TOL:
        raise EntanglementError(
            f"source {source_id!r} does not factorize (residual {s[-1]:.2e})"
        )
    left = u[:, 0]
    j = int(np.argmax(np.abs(left)))
    left = left * (left[j].conjugate() / abs(left[j]))
    rest = left.conjugate() @ m
    rest = rest / np.linalg.norm(rest)
    return StateVector(layout.with_parked(source_id), rest)
