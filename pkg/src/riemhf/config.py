"""Flat key=value run configuration with validated defaults."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .optimize import CgParams, LineSearchParams, StopCriteria

__all__ = ["RunConfig", "ConfigError", "parse_config"]


class ConfigError(ValueError):
    """Unknown key, type mismatch or constraint violation in a config."""


@dataclass(frozen=True)
class RunConfig:
    molecule_path: str
    box_length: float
    points_per_axis: int
    n_orbitals: int
    softening: float | None = None  # defaults to one grid spacing
    solver: str = "cg"
    manifold: str = "stiefel"
    guess: str = "random"
    seed: int = 0
    guess_center_box: float = 4.0
    atomic_width: float = 1.0
    line_search: LineSearchParams = LineSearchParams(alpha0=1.0)
    cg: CgParams = CgParams()
    stop: StopCriteria = StopCriteria()
    out_dir: str = "."
    dump_orbitals: bool = False


_FLOAT_KEYS = {
    "box_length",
    "softening",
    "guess_center_box",
    "atomic_width",
    "r",
    "r_bar",
    "tau",
    "gamma",
    "alpha_max",
    "alpha0",
    "beta_max",
    "eta_powell",
    "update_tol",
}
_INT_KEYS = {"points_per_axis", "n_orbitals", "seed", "restart_cooldown", "max_iterations"}
_BOOL_KEYS = {"restart_on_reject", "dump_orbitals"}
_STR_KEYS = {"molecule", "solver", "manifold", "guess", "out_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS
_REQUIRED = ("molecule", "box_length", "points_per_axis", "n_orbitals")

_SOLVERS = ("steepest", "cg", "scf")
_MANIFOLDS = ("stiefel", "grassmann")
_GUESSES = ("random", "atomic")


def _coerce(key: str, raw: str):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            lowered = raw.lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse value {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse 'key = value' lines (# comments) into a validated RunConfig."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw)

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")

    def check_choice(key, choices):
        if key in values and values[key] not in choices:
            raise ConfigError(f"key {key!r}: must be one of {choices}, got {values[key]!r}")

    check_choice("solver", _SOLVERS)
    check_choice("manifold", _MANIFOLDS)
    check_choice("guess", _GUESSES)

    solver = values.get("solver", "cg")
    default_alpha0 = 0.5 if solver == "steepest" else 1.0
    try:
        ls = LineSearchParams(
            r=values.get("r", 1e-4),
            r_bar=values.get("r_bar", 0.7),
            tau=values.get("tau", 0.5),
            gamma=values.get("gamma", 1.4),
            alpha_max=values.get("alpha_max", 10.0),
            alpha0=values.get("alpha0", default_alpha0),
        )
        cg = CgParams(
            beta_max=values.get("beta_max", 5.0),
            eta_powell=values.get("eta_powell", 0.3),
            restart_cooldown=values.get("restart_cooldown", 4),
            restart_on_reject=values.get("restart_on_reject", False),
            manifold=values.get("manifold", "stiefel"),
        )
        stop = StopCriteria(
            update_tol_l2=values.get("update_tol", 1e-4),
            max_iterations=values.get("max_iterations", 200),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from None

    if values["box_length"] <= 0:
        raise ConfigError("key 'box_length': must be positive")
    n = values["points_per_axis"]
    if n % 2 != 0 or n < 8:
        raise ConfigError("key 'points_per_axis': must be even and >= 8")
    if values["n_orbitals"] < 1:
        raise ConfigError("key 'n_orbitals': must be at least 1")
    if "softening" in values and values["softening"] <= 0:
        raise ConfigError("key 'softening': must be positive")

    return RunConfig(
        molecule_path=values["molecule"],
        box_length=values["box_length"],
        points_per_axis=n,
        n_orbitals=values["n_orbitals"],
        softening=values.get("softening"),
        solver=solver,
        manifold=values.get("manifold", "stiefel"),
        guess=values.get("guess", "random"),
        seed=values.get("seed", 0),
        guess_center_box=values.get("guess_center_box", 4.0),
        atomic_width=values.get("atomic_width", 1.0),
        line_search=ls,
        cg=cg,
        stop=stop,
        out_dir=values.get("out_dir", "."),
        dump_orbitals=values.get("dump_orbitals", False),
    )


def with_overrides(config: RunConfig, seed: int | None = None, out_dir: str | None = None) -> RunConfig:
    if seed is not None:
        config = replace(config, seed=seed)
    if out_dir is not None:
        config = replace(config, out_dir=out_dir)
    return config
