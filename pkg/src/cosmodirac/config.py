"""Run configuration: YAML schema, validation, and object construction.

One config file describes one reproducible experiment: lattice, scale
factor, preparation, evolution, the list of analyses, and output options.
Validation errors name the offending field path so a broken config fails
before any computation starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .lattice import (
    DeSitterProfile,
    ExponentialProfile,
    LatticeSpec,
    QuenchProfile,
    StaticProfile,
    TabulatedProfile,
)

PROFILE_KINDS = ("static", "exponential", "quench", "de_sitter", "tabulated")
PREPARATION_KINDS = ("vacuum", "mass_quench")
ANALYSIS_KINDS = ("entropy", "contour", "spectrum", "qp", "condensates", "symmetry")
EVOLUTION_METHODS = ("rk4", "adaptive")
SPINOR_MODES = ("split", "summed", "zigzag")
REFERENCE_MODES = ("bare", "dressed")


class ConfigError(ValueError):
    """Invalid or missing configuration field; ``path`` names the field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require(mapping, key, path, types=None):
    if not isinstance(mapping, dict):
        raise ConfigError(path, f"expected a mapping, got {type(mapping).__name__}")
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing required field")
    val = mapping[key]
    if types is not None and not isinstance(val, types):
        raise ConfigError(
            f"{path}.{key}",
            f"expected {' or '.join(t.__name__ for t in types)}, "
            f"got {type(val).__name__}",
        )
    return val


def _optional(mapping, key, default, path, types=None):
    if not isinstance(mapping, dict):
        raise ConfigError(path, f"expected a mapping, got {type(mapping).__name__}")
    if key not in mapping or mapping[key] is None:
        return default
    return _require(mapping, key, path, types)


def _check_choice(value, choices, path):
    if value not in choices:
        raise ConfigError(path, f"must be one of {choices}, got {value!r}")
    return value


@dataclass
class AnalysisSpec:
    """One requested analysis; ``options`` carries kind-specific keys."""

    kind: str
    options: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    """Validated experiment description.

    ``raw`` keeps the parsed YAML mapping verbatim for the manifest
    snapshot, so a run can be reproduced from its own output directory.
    """

    lattice: LatticeSpec
    profile: object
    preparation: dict
    evolution: dict
    analyses: list
    output: dict
    raw: dict

    @property
    def eta_span(self):
        return tuple(self.evolution["eta_span"])


def _build_lattice(section) -> LatticeSpec:
    path = "lattice"
    n = _require(section, "num_sites", path, (int,))
    spacing = float(_optional(section, "spacing", 1.0, path, (int, float)))
    mass = float(_optional(section, "mass", 0.0, path, (int, float)))
    coupling = float(_optional(section, "coupling", 0.0, path, (int, float)))
    if coupling < 0:
        raise ConfigError("lattice.coupling", "must be nonnegative")
    try:
        return LatticeSpec(num_sites=n, spacing=spacing, mass=mass, coupling=coupling)
    except ValueError as exc:
        raise ConfigError("lattice", str(exc)) from exc


def _build_profile(section):
    path = "profile"
    kind = _check_choice(_require(section, "kind", path, (str,)), PROFILE_KINDS, f"{path}.kind")
    try:
        if kind == "static":
            return StaticProfile(a_val=float(_require(section, "a_val", path, (int, float))))
        if kind == "exponential":
            return ExponentialProfile(
                a_0=float(_require(section, "a_0", path, (int, float))),
                a_f=float(_require(section, "a_f", path, (int, float))),
                hubble=float(_require(section, "hubble", path, (int, float))),
            )
        if kind == "quench":
            return QuenchProfile(
                a_0=float(_require(section, "a_0", path, (int, float))),
                a_f=float(_require(section, "a_f", path, (int, float))),
                eta_switch=float(_optional(section, "eta_switch", 0.0, path, (int, float))),
            )
        if kind == "de_sitter":
            eta_max = _optional(section, "eta_max", None, path, (int, float))
            return DeSitterProfile(
                hubble=float(_require(section, "hubble", path, (int, float))),
                eta_0=float(_require(section, "eta_0", path, (int, float))),
                eta_max=None if eta_max is None else float(eta_max),
            )
        samples = _require(section, "samples", path, (list,))
        try:
            etas, values = zip(*samples)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.samples", "expected [eta, a] pairs") from exc
        return TabulatedProfile(etas=tuple(map(float, etas)),
                                values=tuple(map(float, values)))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_preparation(section) -> dict:
    path = "preparation"
    if section is None:
        return {"kind": "vacuum"}
    kind = _check_choice(_require(section, "kind", path, (str,)),
                         PREPARATION_KINDS, f"{path}.kind")
    out = {"kind": kind}
    if kind == "mass_quench":
        out["m_pre"] = float(_require(section, "m_pre", path, (int, float)))
    coupling_pre = _optional(section, "coupling_pre", None, path, (int, float))
    if coupling_pre is not None:
        if coupling_pre < 0:
            raise ConfigError(f"{path}.coupling_pre", "must be nonnegative")
        # prepare in a different interaction strength than the evolution
        # (e.g. parity-broken vacuum released into free dynamics)
        out["coupling_pre"] = float(coupling_pre)
    return out


def _build_evolution(section) -> dict:
    path = "evolution"
    span = _require(section, "eta_span", path, (list,))
    if len(span) != 2 or not all(isinstance(x, (int, float)) for x in span):
        raise ConfigError(f"{path}.eta_span", "expected [eta_start, eta_end]")
    if not float(span[1]) > float(span[0]):
        raise ConfigError(f"{path}.eta_span", "eta_end must exceed eta_start")
    method = _check_choice(_optional(section, "method", "rk4", path, (str,)),
                           EVOLUTION_METHODS, f"{path}.method")
    out = {"eta_span": (float(span[0]), float(span[1])), "method": method}
    if method == "rk4":
        deta = float(_require(section, "deta", path, (int, float)))
        if deta <= 0:
            raise ConfigError(f"{path}.deta", "must be positive")
        out["deta"] = deta
        out["sample_every"] = int(_optional(section, "sample_every", 1, path, (int,)))
        if out["sample_every"] < 1:
            raise ConfigError(f"{path}.sample_every", "must be >= 1")
    else:
        out["n_samples"] = int(_optional(section, "n_samples", 201, path, (int,)))
        out["rtol"] = float(_optional(section, "rtol", 1e-10, path, (int, float)))
        if out["n_samples"] < 2:
            raise ConfigError(f"{path}.n_samples", "must be >= 2")
    return out


def _build_block(section, num_sites, path):
    length = _require(section, "length", path, (int,))
    if not (1 <= length <= num_sites):
        raise ConfigError(f"{path}.length", f"must lie in [1, {num_sites}]")
    start = _optional(section, "start", (num_sites - length) // 2, path, (int,))
    if not (0 <= start and start + length <= num_sites):
        raise ConfigError(f"{path}.start", "block must lie within the chain")
    return {"start": start, "length": length}


def _build_analyses(section, lattice: LatticeSpec) -> list:
    if section is None:
        return []
    if not isinstance(section, list):
        raise ConfigError("analyses", "expected a list")
    out = []
    for i, entry in enumerate(section):
        path = f"analyses[{i}]"
        kind = _check_choice(_require(entry, "kind", path, (str,)),
                             ANALYSIS_KINDS, f"{path}.kind")
        opts = {}
        if kind in ("entropy", "contour", "qp"):
            opts["block"] = _build_block(
                _require(entry, "block", path, (dict,)), lattice.num_sites,
                f"{path}.block",
            )
        if kind == "contour":
            opts["spinor_mode"] = _check_choice(
                _optional(entry, "spinor_mode", "split", path, (str,)),
                SPINOR_MODES, f"{path}.spinor_mode",
            )
            opts["time_stride"] = int(_optional(entry, "time_stride", 1, path, (int,)))
        if kind in ("spectrum", "symmetry"):
            opts["reference_mode"] = _check_choice(
                _optional(entry, "reference_mode", "bare", path, (str,)),
                REFERENCE_MODES, f"{path}.reference_mode",
            )
        if kind == "qp":
            opts["window"] = _optional(entry, "window", None, path, (list,))
        if kind == "symmetry":
            hv = _require(entry, "hubble_values", path, (list,))
            if not hv or not all(isinstance(x, (int, float)) and x > 0 for x in hv):
                raise ConfigError(f"{path}.hubble_values",
                                  "expected a nonempty list of positive rates")
            opts["hubble_values"] = [float(x) for x in hv]
            opts["a_0"] = float(_require(entry, "a_0", path, (int, float)))
            opts["a_f"] = float(_require(entry, "a_f", path, (int, float)))
        out.append(AnalysisSpec(kind=kind, options=opts))
    return out


def _build_output(section) -> dict:
    path = "output"
    if section is None:
        section = {}
    directory = _optional(section, "directory", None, path, (str,))
    formats = _optional(section, "formats", ["csv"], path, (list,))
    for fmt in formats:
        if fmt not in ("csv", "npy"):
            raise ConfigError(f"{path}.formats", f"unknown format {fmt!r}")
    return {"directory": directory, "formats": list(formats),
            "binary": bool(_optional(section, "binary", False, path, (bool,)))}


def load_config(source) -> RunConfig:
    """Parse and validate a config from a YAML file path or string."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        source = str(source)
        if "\n" in source:
            text = source
        else:
            with open(source, "r") as fh:
                text = fh.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<file>", "top level must be a mapping")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    """Validate an already-parsed mapping into a RunConfig."""
    known = {"lattice", "profile", "preparation", "evolution", "analyses", "output"}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown top-level section")
    lattice = _build_lattice(_require(raw, "lattice", "<file>", (dict,)))
    profile = _build_profile(_require(raw, "profile", "<file>", (dict,)))
    preparation = _build_preparation(raw.get("preparation"))
    evolution = _build_evolution(_require(raw, "evolution", "<file>", (dict,)))
    analyses = _build_analyses(raw.get("analyses"), lattice)
    output = _build_output(raw.get("output"))
    span = evolution["eta_span"]
    # profile-domain check up front so runs fail in validation, not mid-flight
    for eta in span:
        try:
            profile.scale_factor(eta)
        except Exception as exc:
            raise ConfigError("evolution.eta_span",
                              f"eta = {eta} outside profile domain: {exc}") from exc
    return RunConfig(lattice=lattice, profile=profile, preparation=preparation,
                     evolution=evolution, analyses=analyses, output=output, raw=raw)
