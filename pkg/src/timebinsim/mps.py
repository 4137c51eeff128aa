"""Chain preparation of source registers.

States reachable here are the bond-dimension-two matrix-product family: an
ordered chain of two-qubit gates V_1 ... V_{N-1}, gate k acting on the
neighbouring qubits (k, k+1), applied to a product input. GHZ, W and 1-D
cluster presets are included.

Each gate is given either as a raw 4x4 unitary, or decomposed into layers
of single-qubit gates around controlled-phase gates so the chain can also
be executed through the repeat-until-success gate. One such layer (a "CZ
sandwich") suffices for the cluster and GHZ chains; the W chain's
excitation-splitting rotations need two layers each, as they lie outside
the single-CZ equivalence class.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mubgate import CZ, GateTranscript, rus_cz
from .qstate import (
    NORM_TOL,
    LocalUnitary,
    StateVector,
    apply_unitary,
    product_state,
    source_register,
)

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1.0, 1.0j]).astype(complex)

PRESETS = ("ghz", "w", "cluster1d")


def rotation_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rotation_z(angle: float) -> np.ndarray:
    return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])


class RecipeError(Exception):
    """A chain recipe is malformed or unusable for the requested execution."""


@dataclass(frozen=True, eq=False)
class CzSandwich:
    """Local gates around one controlled-phase gate on a neighbour pair."""

    pre: tuple[np.ndarray, np.ndarray]
    post: tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        mats = []
        for m in (*self.pre, *self.post):
            m = np.array(m, dtype=complex)
            if m.shape != (2, 2) or np.abs(m.conj().T @ m - I2).max() > NORM_TOL:
                raise RecipeError("sandwich locals must be 2x2 unitaries")
            m.flags.writeable = False
            mats.append(m)
        object.__setattr__(self, "pre", (mats[0], mats[1]))
        object.__setattr__(self, "post", (mats[2], mats[3]))

    def matrix(self) -> np.ndarray:
        return np.kron(*self.post) @ CZ @ np.kron(*self.pre)


def _as_sandwiches(gate) -> tuple[CzSandwich, ...] | None:
    if isinstance(gate, CzSandwich):
        return (gate,)
    if isinstance(gate, (tuple, list)) and gate and all(isinstance(g, CzSandwich) for g in gate):
        return tuple(gate)
    return None


def _gate_matrix(gate) -> np.ndarray:
    units = _as_sandwiches(gate)
    if units is not None:
        m = np.eye(4, dtype=complex)
        for unit in units:
            m = unit.matrix() @ m
        return m
    m = np.asarray(gate, dtype=complex)
    if m.shape != (4, 4):
        raise RecipeError(f"gate matrix has shape {m.shape}, expected (4, 4)")
    if np.abs(m.conj().T @ m - np.eye(4)).max() > NORM_TOL:
        raise RecipeError("gate matrix is not unitary")
    return m


@dataclass(frozen=True, eq=False)
class MpsRecipe:
    """Product input |i_1 ... i_N> plus neighbour gates V_1 ... V_{N-1}.

    gates[k] acts on qubits (k, k+1) in 0-based numbering and is either a
    raw 4x4 unitary, a CzSandwich, or a tuple of CzSandwich layers applied
    left to right.
    """

    n: int
    initial: tuple[np.ndarray, ...]
    gates: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain needs n >= 2 qubits, got {self.n}")
        initial = []
        for vec in self.initial:
            v = np.array(vec, dtype=complex)
            if v.shape != (2,) or abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
                raise RecipeError("initial kets must be normalized 2-vectors")
            v.flags.writeable = False
            initial.append(v)
        if len(initial) != self.n:
            raise RecipeError(f"{len(initial)} initial kets for n = {self.n}")
        object.__setattr__(self, "initial", tuple(initial))
        gates = tuple(self.gates)
        if len(gates) != self.n - 1:
            raise RecipeError(f"{len(gates)} gates for n = {self.n}, expected {self.n - 1}")
        for g in gates:
            _gate_matrix(g)  # raises RecipeError on anything malformed
        object.__setattr__(self, "gates", gates)

    def gate_matrix(self, k: int) -> np.ndarray:
        return _gate_matrix(self.gates[k])

    def decomposed_gate(self, k: int) -> tuple[CzSandwich, ...]:
        units = _as_sandwiches(self.gates[k])
        if units is None:
            raise RecipeError(
                f"gate {k} is a raw matrix; the repeat-until-success path needs "
                "a controlled-phase decomposition"
            )
        return units


def prepare_mps(recipe: MpsRecipe) -> StateVector:
    """Apply the chain with ideal gates; sources are named s0 ... s{n-1}."""
    layout = source_register(recipe.n)
    state = product_state(layout, recipe.initial)
    for k in range(recipe.n - 1):
        u = LocalUnitary((f"s{k}", f"s{k + 1}"), recipe.gate_matrix(k))
        state = apply_unitary(state, u)
    return state


def prepare_via_rus(
    recipe: MpsRecipe, rng, max_rounds: int = 64
) -> tuple[StateVector, list[GateTranscript]]:
    """Apply the chain with every controlled-phase gate run as a RUS gate.

    Requires every gate in decomposed form. Returns the final state and one
    transcript per controlled-phase gate executed.
    """
    units_per_gate = [recipe.decomposed_gate(k) for k in range(recipe.n - 1)]
    layout = source_register(recipe.n)
    state = product_state(layout, recipe.initial)
    transcripts = []
    for k, units in enumerate(units_per_gate):
        a, b = f"s{k}", f"s{k + 1}"
        for unit in units:
            state = apply_unitary(state, LocalUnitary((a,), unit.pre[0]))
            state = apply_unitary(state, LocalUnitary((b,), unit.pre[1]))
            state, transcript = rus_cz(state, a, b, rng, max_rounds)
            transcripts.append(transcript)
            state = apply_unitary(state, LocalUnitary((a,), unit.post[0]))
            state = apply_unitary(state, LocalUnitary((b,), unit.post[1]))
    return state, transcripts


def excitation_rotation(theta: float) -> np.ndarray:
    """Rotation by theta in the {|10>, |01>} block, identity on |00>, |11>.

    Maps |10> to cos(theta)|10> + sin(theta)|01>: the excitation-sharing
    step of the W chain.
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [[1, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1]], dtype=complex
    )


def _excitation_sandwiches(theta: float) -> tuple[CzSandwich, CzSandwich]:
    """Two-layer controlled-phase decomposition of excitation_rotation.

    Built from the exact identity
        G(t) = (Sdg Rx(-pi/2) x Rx(-pi/2)) CX (Rx(t) x Rz(t)) CX (Rx(pi/2) S x Rx(pi/2))
    with CX = (I x H) CZ (I x H). One layer cannot work: G(t) for generic t
    lies outside the single-CZ local-equivalence class.
    """
    first = CzSandwich(
        pre=(rotation_x(np.pi / 2) @ S, H @ rotation_x(np.pi / 2)),
        post=(I2, H),
    )
    second = CzSandwich(
        pre=(rotation_x(theta), H @ rotation_z(theta)),
        post=(S.conj().T @ rotation_x(-np.pi / 2), rotation_x(-np.pi / 2) @ H),
    )
    return first, second


def preset_recipe(kind: str, n: int) -> MpsRecipe:
    """Recipe whose chain output is the canonical GHZ, W or cluster state."""
    if n < 2:
        raise ValueError(f"presets need n >= 2, got {n}")
    ket0 = np.array([1.0, 0.0])
    ket1 = np.array([0.0, 1.0])
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    if kind == "cluster1d":
        identity_sandwich = CzSandwich(pre=(I2, I2), post=(I2, I2))
        return MpsRecipe(n, (plus,) * n, (identity_sandwich,) * (n - 1))
    if kind == "ghz":
        cnot = CzSandwich(pre=(I2, H), post=(I2, H))
        return MpsRecipe(n, (plus,) + (ket0,) * (n - 1), (cnot,) * (n - 1))
    if kind == "w":
        # qubit 0 holds the excitation; gate k leaves sin^2 of it behind and
        # passes the rest on, so every basis state ends at amplitude 1/sqrt(n)
        gates = tuple(
            _excitation_sandwiches(np.arccos(np.sqrt(1.0 / (n - k))))
            for k in range(n - 1)
        )
        return MpsRecipe(n, (ket1,) + (ket0,) * (n - 1), gates)
    raise ValueError(f"unknown preset {kind!r}, expected one of {PRESETS}")


def _c2j(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _j2c(pair) -> complex:
    return complex(pair[0], pair[1])


def _matrix_to_json(m: np.ndarray) -> list:
    return [[_c2j(z) for z in row] for row in np.asarray(m)]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[_j2c(z) for z in row] for row in rows], dtype=complex)


def _gate_to_json(gate):
    units = _as_sandwiches(gate)
    if units is None:
        return _matrix_to_json(gate)
    payload = [
        {
            "pre": [_matrix_to_json(u.pre[0]), _matrix_to_json(u.pre[1])],
            "post": [_matrix_to_json(u.post[0]), _matrix_to_json(u.post[1])],
            "cz": True,
        }
        for u in units
    ]
    return payload[0] if len(payload) == 1 else payload


def _gate_from_json(entry):
    if isinstance(entry, dict):
        entry = [entry]
    if isinstance(entry, list) and entry and isinstance(entry[0], dict):
        units = []
        for u in entry:
            if not u.get("cz"):
                raise RecipeError("decomposed gate entries must set cz = true")
            units.append(
                CzSandwich(
                    pre=(_matrix_from_json(u["pre"][0]), _matrix_from_json(u["pre"][1])),
                    post=(_matrix_from_json(u["post"][0]), _matrix_from_json(u["post"][1])),
                )
            )
        return units[0] if len(units) == 1 else tuple(units)
    return _matrix_from_json(entry)


def save_recipe(recipe: MpsRecipe, path) -> None:
    doc = {
        "n": recipe.n,
        "initial": [[_c2j(z) for z in ket] for ket in recipe.initial],
        "gates": [_gate_to_json(g) for g in recipe.gates],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_recipe(path) -> MpsRecipe:
    with open(path) as f:
        doc = json.load(f)
    try:
        n = int(doc["n"])
        initial = tuple(np.array([_j2c(z) for z in ket]) for ket in doc["initial"])
        gates = tuple(_gate_from_json(g) for g in doc["gates"])
    except (KeyError, TypeError, IndexError) as exc:
        raise RecipeError(f"malformed recipe file: {exc}") from exc
    return MpsRecipe(n, initial, gates)
