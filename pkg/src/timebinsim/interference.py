"""Two continuously driven atoms as a microscopic double slit.

A photon click in direction k projects the pair onto the image of a reset
operator that is the sum of the two single-atom reset operators, each
carrying the phase of its atom's position. The click probability density is
the squared norm of that image, and splitting the operator per atom splits
the density into two single-atom terms plus an interference term. Scanning
directions with the atoms held in the driven steady state reproduces the
double-slit fringe pattern of resonance fluorescence.

Positions are in units of the inverse wavenumber scale; rates are relative,
fixed only up to the common emission constant (the dipole pattern is
normalized so its square integrates to 8 pi / 3 over the sphere).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|, basis (g, e)


class StateError(Exception):
    """A two-atom state fails its normalization or positivity checks."""


@dataclass(frozen=True)
class Direction:
    """Spherical angles of an emission direction, theta from the z axis."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi must be in [0, 2 pi), got {self.phi}")

    @property
    def unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True, eq=False)
class EmissionConfig:
    """Geometry and drive of the two-atom emitter pair.

    r1, r2 are the atom positions, k0 the transition wavenumber, dipole the
    common (unit) dipole orientation; gamma, omega, delta are the decay
    rate, Rabi frequency and laser detuning of the independent drives.
    """

    r1: np.ndarray
    r2: np.ndarray
    k0: float
    dipole: np.ndarray
    gamma: float = 1.0
    omega: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r2", "dipole"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            v.flags.writeable = False
            object.__setattr__(self, name, v)
        if abs(np.linalg.norm(self.dipole) - 1.0) > 1e-12:
            raise ValueError("dipole must be a unit vector")
        if self.k0 <= 0:
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def default(cls, k0r: float = 6 * np.pi, gamma: float = 1.0,
                omega: float = 1.0, delta: float = 0.0) -> "EmissionConfig":
        """Atoms on the x axis a distance k0r / k0 apart, dipole along z."""
        k0 = 2 * np.pi
        half = 0.5 * k0r / k0
        return cls(
            r1=np.array([half, 0.0, 0.0]),
            r2=np.array([-half, 0.0, 0.0]),
            k0=k0,
            dipole=np.array([0.0, 0.0, 1.0]),
            gamma=gamma,
            omega=omega,
            delta=delta,
        )

    @property
    def separation(self) -> np.ndarray:
        return self.r1 - self.r2


@dataclass(frozen=True, eq=False)
class TwoAtomState:
    """Pure 4-vector over {gg, ge, eg, ee} or a 4x4 density matrix."""

    array: np.ndarray

    def __post_init__(self):
        a = np.array(self.array, dtype=complex)
        if a.shape == (4,):
            if abs(np.linalg.norm(a) - 1.0) > 1e-12:
                raise StateError("pure state is not normalized")
        elif a.shape == (4, 4):
            if np.abs(a - a.conj().T).max() > PSD_TOL:
                raise StateError("density matrix is not Hermitian")
            if abs(np.trace(a).real - 1.0) > PSD_TOL:
                raise StateError("density matrix trace is not 1")
            if np.linalg.eigvalsh(a).min() < -PSD_TOL:
                raise StateError("density matrix is not positive semidefinite")
        else:
            raise StateError(f"state has shape {a.shape}, expected (4,) or (4, 4)")
        a.flags.writeable = False
        object.__setattr__(self, "array", a)

    @property
    def is_pure(self) -> bool:
        return self.array.ndim == 1

    def as_density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.array, self.array.conj())
        return self.array

    @classmethod
    def pure(cls, vec) -> "TwoAtomState":
        return cls(np.asarray(vec, dtype=complex))

    @classmethod
    def density(cls, mat) -> "TwoAtomState":
        return cls(np.asarray(mat, dtype=complex))

    @classmethod
    def ground(cls) -> "TwoAtomState":
        return cls.pure([1, 0, 0, 0])

    @classmethod
    def symmetric(cls) -> "TwoAtomState":
        """Single shared excitation, symmetric combination (eg + ge)."""
        return cls.pure(np.array([0, 1, 1, 0]) / np.sqrt(2))

    @classmethod
    def antisymmetric(cls) -> "TwoAtomState":
        return cls.pure(np.array([0, 1, -1, 0]) / np.sqrt(2))

    @classmethod
    def product_density(cls, rho1, rho2) -> "TwoAtomState":
        return cls.density(np.kron(np.asarray(rho1), np.asarray(rho2)))


def dipole_amplitude(config: EmissionConfig, unit_k: np.ndarray) -> float:
    """sin of the angle between the emission direction and the dipole axis."""
    c = float(np.dot(unit_k, config.dipole))
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def _reset_pair(config: EmissionConfig, direction: Direction):
    k = direction.unit_vector
    d = dipole_amplitude(config, k)
    f1 = d * np.exp(-1j * config.k0 * np.dot(k, config.r1))
    f2 = d * np.exp(-1j * config.k0 * np.dot(k, config.r2))
    return f1 * np.kron(SIGMA_MINUS, I2), f2 * np.kron(I2, SIGMA_MINUS)


def reset_operator(config: EmissionConfig, direction: Direction) -> np.ndarray:
    """Conditional de-excitation operator for a click in the given direction.

    The sum of the two single-atom operators; its additivity is what makes
    the emission pattern interfere.
    """
    r1, r2 = _reset_pair(config, direction)
    return r1 + r2


def intensity(config: EmissionConfig, state: TwoAtomState, direction: Direction) -> float:
    """Relative emission rate into a direction for the given atomic state."""
    r = reset_operator(config, direction)
    if state.is_pure:
        return float(np.linalg.norm(r @ state.array) ** 2)
    return float(np.trace(r @ state.array @ r.conj().T).real)


def intensity_terms(
    config: EmissionConfig, state: TwoAtomState, direction: Direction
) -> tuple[float, float, float]:
    """Per-atom rates plus the cross term; the three sum to intensity."""
    r1, r2 = _reset_pair(config, direction)
    rho = state.as_density()
    i1 = float(np.trace(r1 @ rho @ r1.conj().T).real)
    i2 = float(np.trace(r2 @ rho @ r2.conj().T).real)
    cross = 2.0 * float(np.trace(r2 @ rho @ r1.conj().T).real)
    return i1, i2, cross


def bloch_generator(gamma: float, omega: float, delta: float):
    """Linear generator of the driven, damped single-atom dynamics.

    State vector x = (Re <g|rho|e>, Im <g|rho|e>, rho_ee), evolving as
    dx/dt = A x + b.
    """
    a = np.array(
        [
            [-gamma / 2.0, delta, 0.0],
            [-delta, -gamma / 2.0, -omega],
            [0.0, omega, -gamma],
        ]
    )
    b = np.array([0.0, omega / 2.0, 0.0])
    return a, b


def steady_state_single_atom(gamma: float, omega: float, delta: float) -> np.ndarray:
    """Stationary 2x2 density matrix of a driven two-level atom, basis (g, e)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    a, b = bloch_generator(gamma, omega, delta)
    x = np.linalg.solve(a, -b)
    coherence = x[0] + 1j * x[1]
    pe = x[2]
    return np.array([[1.0 - pe, coherence], [coherence.conjugate(), pe]])


@dataclass(frozen=True, eq=False)
class IntensityMap:
    """Sampled emission rates on a (theta, phi) grid."""

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        phis = np.asarray(self.phis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (thetas.size, phis.size):
            raise ValueError("values grid does not match the angle axes")
        if values.min() < -1e-12:
            raise ValueError("intensities must be non-negative")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "values", values)

    def to_csv(self, path) -> None:
        """Row-major theta,phi,intensity rows with full double precision."""
        with open(path, "w") as f:
            f.write("theta,phi,intensity\n")
            for i, theta in enumerate(self.thetas):
                row = self.values[i]
                for j, phi in enumerate(self.phis):
                    f.write(f"{theta:.15g},{phi:.15g},{row[j]:.15g}\n")


def _lowering_correlations(rho: np.ndarray):
    """m[i][j] = tr(sigma-_i rho sigma+_j) for atoms i, j in {1, 2}."""
    s1 = np.kron(SIGMA_MINUS, I2)
    s2 = np.kron(I2, SIGMA_MINUS)
    m11 = np.trace(s1 @ rho @ s1.conj().T).real
    m22 = np.trace(s2 @ rho @ s2.conj().T).real
    m12 = np.trace(s1 @ rho @ s2.conj().T)
    return m11, m22, m12


def scan_pattern(
    config: EmissionConfig,
    state: "TwoAtomState | str" = "steady",
    n_theta: int = 181,
    n_phi: int = 360,
) -> IntensityMap:
    """Evaluate the emission rate over the full sphere of directions.

    state may be an explicit TwoAtomState or "steady", which uses the
    product of the per-atom driven stationary states.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid resolutions must be at least 2")
    if state == "steady":
        rho1 = steady_state_single_atom(config.gamma, config.omega, config.delta)
        state = TwoAtomState.product_density(rho1, rho1)
    if not isinstance(state, TwoAtomState):
        raise TypeError("state must be a TwoAtomState or 'steady'")
    m11, m22, m12 = _lowering_correlations(state.as_density())

    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    st, ct = np.sin(thetas)[:, None], np.cos(thetas)[:, None]
    kx = st * np.cos(phis)[None, :]
    ky = st * np.sin(phis)[None, :]
    kz = ct * np.ones_like(phis)[None, :]

    d = config.dipole
    d2 = 1.0 - (kx * d[0] + ky * d[1] + kz * d[2]) ** 2
    np.clip(d2, 0.0, None, out=d2)
    dr = config.separation
    dphi = config.k0 * (kx * dr[0] + ky * dr[1] + kz * dr[2])
    values = d2 * (m11 + m22 + 2.0 * (np.cos(dphi) * m12.real + np.sin(dphi) * m12.imag))
    np.clip(values, 0.0, None, out=values)
    return IntensityMap(thetas, phis, values)
