"""Scenario configuration files (TOML).

A complete example::

    schema_version = 1
    model = "inefficient"          # or "false-count"
    seed = 20240611

    [grid]                         # either e_min/e_max or center/bandwidth
    n_modes = 801
    e_min = -20.0
    e_max = 21.0

    [state]
    preset = "entangled"           # or explicit blocks rho_ee, rho_eg, rho_gg

    [detectors.de]
    eps_e = 1.0
    eps_g = 0.0
    rate_e = 1.0                   # golden-rule rate; or coupling_e = <per-mode v>
    time = 1.6

    [detectors.dg]
    rate_g = 1.0
    time = 0.7

    [sweep]
    parameter = "time"
    start = 0.0
    stop = 3.0
    steps = 61

Matrices are nested lists of reals, or tables ``{re = [[...]], im = [[...]]}``.
An ``[efficiencies]`` table (``p_e``, ``p_g``) replaces the detector dynamics
for the inefficient model.
"""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..core import PRESETS, AtomCavityState, make_state, mixed_populations
from ..errors import CQEDError, ConfigError
from ..spectral import ContinuumGrid, DetectorSpec, Zone, coupling_for_rate

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA_VERSION = 1
DEFAULT_SEED = 0
DEFAULT_GRID = {"n_modes": 2001, "bandwidth": 200.0}
DEFAULT_FIG1_TRACES = (0.01, 0.5, 0.99)

_TOP_KEYS = {"schema_version", "model", "seed", "output", "grid", "state", "detectors",
             "efficiencies", "sweep", "fig1", "sample"}


class Model(enum.Enum):
    INEFFICIENT = "inefficient"
    FALSE_COUNT = "false-count"


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigError("sweep.steps must be >= 2")
        if not self.stop > self.start:
            raise ConfigError("sweep range is empty (need stop > start)")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    model: Model = Model.INEFFICIENT
    grid: Optional[ContinuumGrid] = None
    de: Optional[DetectorSpec] = None
    dg: Optional[DetectorSpec] = None
    efficiencies: Optional[tuple[float, float]] = None
    state: Optional[AtomCavityState] = None
    state_label: str = "entangled"
    sweep: Optional[Sweep] = None
    seed: int = DEFAULT_SEED
    output: Optional[str] = None
    fig1_traces: tuple = DEFAULT_FIG1_TRACES
    fig1_p_g: float = 1.0
    n_atoms: int = 1000
    schema_version: int = SCHEMA_VERSION
    raw: dict = field(default_factory=dict)

    @property
    def dynamical(self) -> bool:
        return self.grid is not None and self.de is not None and self.dg is not None

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=_seed(seed))

    def metadata(self) -> dict:
        meta: dict[str, Any] = {"schema_version": self.schema_version, "model": self.model.value,
                                "seed": self.seed, "state": self.state_label}
        if self.grid is not None:
            meta.update(n_modes=self.grid.n_modes, e_min=self.grid.e_min, e_max=self.grid.e_max)
        for name, spec in (("de", self.de), ("dg", self.dg)):
            if spec is not None:
                meta[f"{name}.coupling_e"] = spec.coupling_e
                meta[f"{name}.coupling_g"] = spec.coupling_g
                meta[f"{name}.time"] = spec.interaction_time
        if self.efficiencies is not None:
            meta["p_e"], meta["p_g"] = self.efficiencies
        return meta


def _seed(value) -> int:
    try:
        seed = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return seed


def _float(table: dict, key: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return float(default)
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}")
    return float(value)


def _matrix(value, name: str) -> np.ndarray:
    try:
        if isinstance(value, dict):
            re = np.asarray(value.get("re", 0.0), dtype=float)
            im = np.asarray(value.get("im", np.zeros_like(re)), dtype=float)
            return re + 1j * im
        return np.asarray(value, dtype=float).astype(complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"state.{name} is not a numeric matrix: {exc}") from None


def _grid(table: Optional[dict], center: float) -> ContinuumGrid:
    table = dict(DEFAULT_GRID) if table is None else table
    try:
        n = int(table.get("n_modes", DEFAULT_GRID["n_modes"]))
        if "e_min" in table or "e_max" in table:
            return ContinuumGrid(n, _float(table, "e_min"), _float(table, "e_max"))
        return ContinuumGrid.centered(_float(table, "center", center),
                                      _float(table, "bandwidth", DEFAULT_GRID["bandwidth"]), n)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _detector(table: dict, zone: Zone, grid: ContinuumGrid, model: Model) -> DetectorSpec:
    known = {"eps_e", "eps_g", "coupling_e", "coupling_g", "rate_e", "rate_g", "time"}
    unknown = set(table) - known
    if unknown:
        raise ConfigError(f"detectors.{zone.value.lower()}: unknown keys {sorted(unknown)}")
    couplings = []
    for level in ("e", "g"):
        if f"coupling_{level}" in table and f"rate_{level}" in table:
            raise ConfigError(f"give either coupling_{level} or rate_{level}, not both")
        if f"rate_{level}" in table:
            couplings.append(coupling_for_rate(_float(table, f"rate_{level}"), grid))
        else:
            couplings.append(_float(table, f"coupling_{level}", 0.0))
    try:
        spec = DetectorSpec(_float(table, "eps_e", 1.0), _float(table, "eps_g", 0.0),
                            couplings[0], couplings[1], zone, _float(table, "time", 0.0))
    except ValueError as exc:
        raise ConfigError(f"detectors.{zone.value.lower()}: {exc}") from None
    if model is Model.INEFFICIENT and not spec.is_single_level:
        raise ConfigError(f"detectors.{zone.value.lower()}: the inefficient model couples only "
                          f"the zone's own level")
    return spec


def _state(table: Optional[dict]) -> tuple[AtomCavityState, str]:
    table = {"preset": "entangled"} if table is None else table
    try:
        if "preset" in table:
            name = table["preset"]
            if name == "mixed":
                return mixed_populations(_float(table, "p_gg"), int(table.get("dim", 2))), "mixed"
            if name not in PRESETS:
                raise ConfigError(f"unknown state preset {name!r}; known: "
                                  f"{sorted(PRESETS) + ['mixed']}")
            return PRESETS[name](int(table.get("dim", 2))), name
        blocks = [_matrix(table[k], k) for k in ("rho_ee", "rho_eg", "rho_gg")]
    except KeyError as exc:
        raise ConfigError(f"state: missing {exc}") from None
    normalize = bool(table.get("normalize", False))
    try:
        state = make_state(*blocks, normalize=normalize)
    except CQEDError as exc:
        raise ConfigError(f"state: {exc}") from None
    if abs(state.trace - 1.0) > 1e-10:
        raise ConfigError(f"state: trace is {state.trace:.12g}; fix the blocks or set normalize = true")
    return state, "explicit"


def parse_config(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    try:
        model = Model(data.get("model", Model.INEFFICIENT.value))
    except ValueError:
        raise ConfigError(f"model must be one of {[m.value for m in Model]}") from None

    cfg: dict[str, Any] = {"model": model, "seed": _seed(data.get("seed", DEFAULT_SEED)),
                           "output": data.get("output"), "raw": data}
    cfg["state"], cfg["state_label"] = _state(data.get("state"))

    detectors = data.get("detectors")
    if detectors is not None:
        if set(detectors) != {"de", "dg"}:
            raise ConfigError("detectors must define exactly the tables 'de' and 'dg'")
        center = _float(detectors["de"], "eps_e", 1.0)
        grid = _grid(data.get("grid"), center)
        cfg["grid"] = grid
        cfg["de"] = _detector(detectors["de"], Zone.DE, grid, model)
        cfg["dg"] = _detector(detectors["dg"], Zone.DG, grid, model)
    elif "grid" in data:
        raise ConfigError("a grid without detectors has nothing to drive")

    eff = data.get("efficiencies")
    if eff is not None:
        if model is not Model.INEFFICIENT:
            raise ConfigError("efficiencies are only meaningful for the inefficient model")
        p_e, p_g = _float(eff, "p_e"), _float(eff, "p_g")
        if not (0 <= p_e <= 1 and 0 <= p_g <= 1):
            raise ConfigError("efficiencies must lie in [0, 1]")
        cfg["efficiencies"] = (p_e, p_g)

    sweep = data.get("sweep")
    if sweep is not None:
        try:
            cfg["sweep"] = Sweep(str(sweep["parameter"]), _float(sweep, "start"),
                                 _float(sweep, "stop"), int(sweep["steps"]))
        except KeyError as exc:
            raise ConfigError(f"sweep: missing {exc}") from None

    fig1 = data.get("fig1", {})
    traces = tuple(float(x) for x in fig1.get("traces", DEFAULT_FIG1_TRACES))
    if not traces or any(not 0 < x <= 1 for x in traces):
        raise ConfigError("fig1.traces must be a non-empty list of values in (0, 1]")
    cfg["fig1_traces"] = traces
    cfg["fig1_p_g"] = _float(fig1, "p_g", 1.0)
    if not 0 < cfg["fig1_p_g"] <= 1:
        raise ConfigError("fig1.p_g must lie in (0, 1]")

    n_atoms = data.get("sample", {}).get("n_atoms", 1000)
    if isinstance(n_atoms, bool) or not isinstance(n_atoms, int) or n_atoms < 1:
        raise ConfigError("sample.n_atoms must be a positive integer")
    cfg["n_atoms"] = n_atoms
    return ScenarioConfig(**cfg)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data)


def loads_config(text: str) -> ScenarioConfig:
    try:
        return parse_config(tomllib.loads(text))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from None
