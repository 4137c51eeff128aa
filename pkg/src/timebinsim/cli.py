"""Command-line front end.

Subcommands: prepare (build a source register), map (also emit the photon
register), rus (single entangling-gate demo), stats (Monte Carlo round
statistics under loss), interfere (angular emission scan to CSV). Flags may
be combined with a JSON config file; flags win. Reports are JSON and
byte-identical for identical config and seed.

Exit codes: 0 success, 1 simulation error, 2 config error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .interference import EmissionConfig, TwoAtomState, scan_pattern
from .mps import MpsRecipe, RecipeError, load_recipe, prepare_mps, prepare_via_rus, preset_recipe
from .mubgate import GateIncompleteError, LossModel, expected_attempts, rus_cz, rus_cz_lossy
from .photonics import map_all_sources
from .qstate import QStateError, StateVector, product_state, source_register

OUTDIR_ENV = "TIMEBINSIM_OUTDIR"
COMMANDS = ("rus", "prepare", "map", "interfere", "stats")
MAX_REPORTED_QUBITS = 12


class ConfigError(Exception):
    """A config file or flag value is malformed or out of range."""


_DEFAULTS = {
    "seed": 0,
    "trials": 1,
    "n": 3,
    "preset": "cluster1d",
    "recipe": None,
    "via": "ideal",
    "eta": 1.0,
    "max_rounds": 64,
    "n_theta": 181,
    "n_phi": 360,
    "state": "symmetric",
    "k0r": 6 * np.pi,
    "gamma": 1.0,
    "omega": 1.0,
    "delta": 0.0,
    "out": None,
    "csv": None,
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    trials: int = 1
    n: int = 3
    preset: str = "cluster1d"
    recipe: str | None = None
    via: str = "ideal"
    eta: float = 1.0
    max_rounds: int = 64
    n_theta: int = 181
    n_phi: int = 360
    state: str = "symmetric"
    k0r: float = 6 * np.pi
    gamma: float = 1.0
    omega: float = 1.0
    delta: float = 0.0
    out: str | None = None
    csv: str | None = None

    def validate(self) -> "RunConfig":
        def bad(field, msg):
            raise ConfigError(f"config field {field!r}: {msg}")

        if self.command not in COMMANDS:
            bad("command", f"must be one of {COMMANDS}, got {self.command!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            bad("seed", f"must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            bad("trials", f"must be an integer >= 1, got {self.trials!r}")
        if not 0.0 <= self.eta <= 1.0:
            bad("eta", f"must be in [0, 1], got {self.eta!r}")
        if self.command == "stats" and self.eta == 0.0:
            bad("eta", "stats needs eta > 0, no round can ever complete at 0")
        if self.max_rounds < 1:
            bad("max_rounds", f"must be >= 1, got {self.max_rounds!r}")
        if self.command in ("prepare", "map"):
            if not isinstance(self.n, int) or not 2 <= self.n <= 20:
                bad("n", f"must be an integer in [2, 20], got {self.n!r}")
            if self.recipe is None and self.preset not in ("ghz", "w", "cluster1d"):
                bad("preset", f"must be ghz, w or cluster1d, got {self.preset!r}")
            if self.recipe is not None and not os.path.exists(self.recipe):
                bad("recipe", f"file not found: {self.recipe!r}")
        if self.via not in ("ideal", "rus"):
            bad("via", f"must be ideal or rus, got {self.via!r}")
        if self.command == "interfere":
            if self.n_theta < 2 or self.n_phi < 2:
                bad("n_theta/n_phi", "grid resolutions must be at least 2")
            if self.state not in ("symmetric", "antisymmetric", "ground", "steady"):
                bad("state", f"unknown interference state {self.state!r}")
            if self.k0r <= 0:
                bad("k0r", f"must be positive, got {self.k0r!r}")
            if self.gamma <= 0:
                bad("gamma", f"must be positive, got {self.gamma!r}")
            if self.omega < 0:
                bad("omega", f"must be non-negative, got {self.omega!r}")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        for key in doc:
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
        if "command" not in doc:
            raise ConfigError("config field 'command': missing")
        try:
            cfg = cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg.validate()


def load_config(command: str, file_path: str | None, flags: dict) -> RunConfig:
    """Merge defaults, config-file values and flags (flags win)."""
    merged = dict(_DEFAULTS)
    if file_path is not None:
        try:
            with open(file_path) as f:
                doc = json.load(f)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        file_command = doc.pop("command", None)
        if file_command is not None and file_command != command:
            raise ConfigError(
                f"config field 'command': file says {file_command!r}, "
                f"command line says {command!r}"
            )
        merged.update(doc)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    return RunConfig.from_dict(merged)


@dataclass(frozen=True)
class RunReport:
    config: RunConfig
    outputs: dict
    wall_time_s: float


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _state_payload(state: StateVector) -> dict:
    payload = {
        "subsystems": [
            {"id": e.id, "kind": e.kind, "parked": e.id in state.layout.parked}
            for e in state.layout.entries
        ],
        "num_active": state.num_active,
    }
    if state.num_active <= MAX_REPORTED_QUBITS:
        payload["basis"] = state.basis_labels()
        payload["amplitudes"] = [_pair(z) for z in state.amplitudes]
    else:
        probs = np.abs(state.amplitudes) ** 2
        payload["summary"] = {
            "nonzero_amplitudes": int(np.count_nonzero(probs > 1e-24)),
            "max_probability": float(probs.max()),
        }
    return payload


def _transcript_payload(transcript) -> dict:
    return {
        "rounds": [
            {
                "outcome": r.outcome,
                "probability": float(r.probability),
                "correction": {
                    "local_gates": [[slot, float(phi)] for slot, phi in r.correction.local_gates],
                    "global_phase": _pair(r.correction.global_phase),
                    "net_effect": r.correction.net_effect,
                },
            }
            for r in transcript.rounds
        ],
        "rounds_used": transcript.rounds_used,
        "succeeded": transcript.succeeded,
    }


def _resolve_path(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _recipe_for(config: RunConfig) -> MpsRecipe:
    if config.recipe is not None:
        return load_recipe(config.recipe)
    return preset_recipe(config.preset, config.n)


def _build_register(config: RunConfig, rng) -> tuple[StateVector, list]:
    recipe = _recipe_for(config)
    if config.via == "rus":
        state, transcripts = prepare_via_rus(recipe, rng, config.max_rounds)
    else:
        state, transcripts = prepare_mps(recipe), []
    return state, transcripts


def _run_prepare(config: RunConfig, rng) -> dict:
    state, transcripts = _build_register(config, rng)
    return {
        "state": _state_payload(state),
        "transcripts": [_transcript_payload(t) for t in transcripts],
        "total_rounds": int(sum(t.rounds_used for t in transcripts)),
    }


def _run_map(config: RunConfig, rng) -> dict:
    state, transcripts = _build_register(config, rng)
    photon_state, reports = map_all_sources(state)
    return {
        "source_state": _state_payload(state),
        "photon_state": _state_payload(photon_state),
        "reports": [dataclasses.asdict(r) for r in reports],
        "transcripts": [_transcript_payload(t) for t in transcripts],
    }


def _run_rus(config: RunConfig, rng) -> dict:
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    state = product_state(source_register(2), [plus, plus])
    out, transcript = rus_cz(state, "s0", "s1", rng, config.max_rounds)
    return {
        "input_state": _state_payload(state),
        "output_state": _state_payload(out),
        "transcript": _transcript_payload(transcript),
    }


def _run_stats(config: RunConfig) -> dict:
    loss = LossModel(eta=config.eta)
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    base = product_state(source_register(2), [plus, plus])
    counts = np.empty(config.trials, dtype=np.int64)
    for i in range(config.trials):
        rng = Generator(Philox(key=config.seed ^ i))
        total = 0
        while True:
            result = rus_cz_lossy(base, "s0", "s1", loss, rng, config.max_rounds)
            if result.succeeded:
                total += result.transcript.rounds_used
                break
            total += result.failed_round
        counts[i] = total
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / np.sqrt(config.trials)) if config.trials > 1 else 0.0
    return {
        "trials": config.trials,
        "eta": config.eta,
        "mean_rounds": mean,
        "stderr_rounds": stderr,
        "total_rounds": int(counts.sum()),
        "completion_frequency": float(config.trials / counts.sum()),
        "expected_attempts": expected_attempts(loss),
    }


def _run_interfere(config: RunConfig) -> dict:
    emission = EmissionConfig.default(
        k0r=config.k0r, gamma=config.gamma, omega=config.omega, delta=config.delta
    )
    states = {
        "symmetric": TwoAtomState.symmetric,
        "antisymmetric": TwoAtomState.antisymmetric,
        "ground": TwoAtomState.ground,
    }
    state = states[config.state]() if config.state in states else "steady"
    pattern = scan_pattern(emission, state, config.n_theta, config.n_phi)
    csv_path = _resolve_path(config.csv or "intensity_map.csv")
    pattern.to_csv(csv_path)
    return {
        "csv_path": csv_path,
        "n_theta": config.n_theta,
        "n_phi": config.n_phi,
        "state": config.state,
        "k0r": config.k0r,
        "min_intensity": float(pattern.values.min()),
        "max_intensity": float(pattern.values.max()),
    }


def run(config: RunConfig) -> RunReport:
    """Execute a validated config and collect the command's payload."""
    start = time.perf_counter()
    rng = Generator(Philox(key=config.seed))
    if config.command == "prepare":
        outputs = _run_prepare(config, rng)
    elif config.command == "map":
        outputs = _run_map(config, rng)
    elif config.command == "rus":
        outputs = _run_rus(config, rng)
    elif config.command == "stats":
        outputs = _run_stats(config)
    elif config.command == "interfere":
        outputs = _run_interfere(config)
    else:  # defensive; validate() already rejects
        raise ConfigError(f"unknown command {config.command!r}")
    return RunReport(config, outputs, time.perf_counter() - start)


def report_document(report: RunReport) -> str:
    """Deterministic JSON rendering of config echo plus outputs.

    Wall time is deliberately left out so identical config and seed give
    byte-identical documents; it goes to stderr instead.
    """
    doc = {"config": report.config.to_dict(), "outputs": report.outputs}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_report(report: RunReport, path: str | None) -> None:
    text = report_document(report)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(_resolve_path(path), "w") as f:
            f.write(text)
    print(f"wall_time_s={report.wall_time_s:.3f}", file=sys.stderr)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--seed", type=int, help="base random seed (default 0)")
    p.add_argument("--trials", type=int, help="Monte Carlo trial count (default 1)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timebinsim",
        description="Simulate on-demand multi-photon time-bin entanglement.",
        epilog=f"Relative output paths resolve under ${OUTDIR_ENV} when it is set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="prepare a source register in a chain state")
    _add_common(p)
    p.add_argument("--preset", choices=("ghz", "w", "cluster1d"))
    p.add_argument("--recipe", help="JSON chain recipe file (overrides --preset)")
    p.add_argument("--n", type=int, help="number of sources (default 3)")
    p.add_argument("--via", choices=("ideal", "rus"), help="gate execution (default ideal)")
    p.add_argument("--max-rounds", dest="max_rounds", type=int)

    p = sub.add_parser("map", help="prepare, then map the register onto photons")
    _add_common(p)
    p.add_argument("--preset", choices=("ghz", "w", "cluster1d"))
    p.add_argument("--recipe")
    p.add_argument("--n", type=int)
    p.add_argument("--via", choices=("ideal", "rus"))
    p.add_argument("--max-rounds", dest="max_rounds", type=int)

    p = sub.add_parser("rus", help="single repeat-until-success gate demo on |+>|+>")
    _add_common(p)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)

    p = sub.add_parser("stats", help="Monte Carlo rounds-to-success under loss")
    _add_common(p)
    p.add_argument("--eta", type=float, help="per-photon click probability (default 1.0)")
    p.add_argument("--max-rounds", dest="max_rounds", type=int)

    p = sub.add_parser("interfere", help="angular emission scan written as CSV")
    _add_common(p)
    p.add_argument("--state", choices=("symmetric", "antisymmetric", "ground", "steady"))
    p.add_argument("--k0r", type=float, help="wavenumber times atom separation (default 6 pi)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n-theta", dest="n_theta", type=int, help="polar grid points (default 181)")
    p.add_argument("--n-phi", dest="n_phi", type=int, help="azimuthal grid points (default 360)")
    p.add_argument("--csv", help="intensity CSV path (default intensity_map.csv)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        config = load_config(command, config_path, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(config)
        write_report(report, config.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except (QStateError, RecipeError, GateIncompleteError, ValueError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
