"""Batch scenarios driven by a :class:`ScenarioConfig`."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .. import bruteforce, detect_false, detect_ineff, metrics, spectral
from ..core import RECORDS, ClickRecord, mixed_populations
from ..detect_ineff import ChainDistribution
from ..errors import ConfigError
from .config import Model, ScenarioConfig, Sweep
from .output import Table

DEFAULT_DECAY_SWEEP = Sweep("time", 0.0, 3.0, 61)
DEFAULT_FIG1_SWEEP = Sweep("p_e", 0.0, 1.0, 101)


def _sweep(cfg: ScenarioConfig, default: Sweep, allowed=None) -> Sweep:
    sweep = cfg.sweep or default
    if allowed is not None and sweep.parameter not in allowed:
        raise ConfigError(f"this scenario sweeps {sorted(allowed)}, not {sweep.parameter!r}")
    return sweep


def _require_dynamics(cfg: ScenarioConfig, what: str) -> None:
    if not cfg.dynamical:
        raise ConfigError(f"{what} needs [grid] and [detectors.de]/[detectors.dg]")


def _meta(cfg: ScenarioConfig, scenario: str, **extra) -> dict:
    meta = {"scenario": scenario}
    meta.update(cfg.metadata())
    meta.update(extra)
    return meta


# decay ----------------------------------------------------------------------

def run_decay_scan(cfg: ScenarioConfig) -> Table:
    """Survival of the D_e target level: numerical propagation vs ``exp(-Gamma t)``."""
    if cfg.model is not Model.INEFFICIENT:
        raise ConfigError("the decay scan uses the inefficient model")
    _require_dynamics(cfg, "decay")
    sweep = _sweep(cfg, DEFAULT_DECAY_SWEEP, {"time"})
    if sweep.start < 0:
        raise ConfigError("times must be non-negative")
    spec, grid = cfg.de, cfg.grid
    times = sweep.values
    eig = spectral.eigensystem(grid, spec)
    numeric = np.abs(spectral.survival_amplitude(eig, spec.zone.target, times)) ** 2
    rate = spectral.golden_rule_rate(spec.target_coupling, grid)
    analytic = np.exp(-rate * times)
    table = Table(["t", "survival_numeric", "survival_analytic", "relative_error"],
                  metadata=_meta(cfg, "decay", rate=rate, recurrence_time=grid.recurrence_time))
    for t, n, a in zip(times, numeric, analytic):
        table.add(float(t), float(n), float(a), float(abs(n - a) / a))
    return table


# fig1 -----------------------------------------------------------------------

def run_fig1_scan(cfg: ScenarioConfig) -> Table:
    """D_g click probability over its efficiency, against the D_e efficiency."""
    if cfg.model is not Model.INEFFICIENT:
        raise ConfigError("the fig1 scan uses the inefficient model")
    sweep = _sweep(cfg, DEFAULT_FIG1_SWEEP, {"p_e"})
    if sweep.start < 0 or sweep.stop > 1:
        raise ConfigError("p_e sweep must stay inside [0, 1]")
    p_g = cfg.fig1_p_g
    table = Table(["p_e", "trace_gg", "ratio"], metadata=_meta(cfg, "fig1", p_g=p_g))
    for trace_gg in cfg.fig1_traces:
        state = mixed_populations(trace_gg)
        for p_e in sweep.values:
            ratio = detect_ineff.click_probability_dg(state, float(p_e), p_g) / p_g
            table.add(float(p_e), trace_gg, float(ratio))
    return table


# chain ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChainReport:
    closed: ChainDistribution
    reference: bruteforce.ReferenceChain | None

    def deltas(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-outcome probability and max-abs cavity-state differences (NaN without a reference)."""
        if self.reference is None:
            return np.full(3, np.nan), np.full(3, np.nan)
        dp = np.abs(self.closed.probabilities - self.reference.probabilities)
        ds = []
        for outcome, ref in zip(self.closed, self.reference.cavity_states):
            mine = outcome.cavity_state
            if mine is None and ref is None:
                ds.append(0.0)
            elif mine is None or ref is None:
                ds.append(np.inf)
            else:
                ds.append(float(np.abs(mine - ref).max()))
        return dp, np.array(ds)


def chain_distribution(cfg: ScenarioConfig, state=None) -> ChainDistribution:
    state = cfg.state if state is None else state
    if cfg.model is Model.FALSE_COUNT:
        _require_dynamics(cfg, "the false-count chain")
        return detect_false.chain_false(state, cfg.grid, cfg.de, cfg.dg, warn_threshold=None)
    if cfg.efficiencies is not None:
        return detect_ineff.chain_from_efficiencies(state, *cfg.efficiencies)
    _require_dynamics(cfg, "the chain")
    return detect_ineff.run_chain(state, cfg.grid, cfg.de, cfg.dg)


def chain_report(cfg: ScenarioConfig) -> ChainReport:
    closed = chain_distribution(cfg)
    reference = None
    if cfg.dynamical and not (cfg.model is Model.INEFFICIENT and cfg.efficiencies is not None):
        reference = bruteforce.reference_chain(cfg.state, cfg.grid, cfg.de, cfg.dg)
    return ChainReport(closed, reference)


def run_chain_scenario(cfg: ScenarioConfig) -> Table:
    report = chain_report(cfg)
    dim = cfg.state.dim
    entries = [f"rho_{i}{j}_{part}" for i in range(dim) for j in range(dim) for part in ("re", "im")]
    table = Table(["outcome", "probability", "reference_probability", "probability_delta",
                   "state_delta", *entries], metadata=_meta(cfg, "chain"))
    dp, ds = report.deltas()
    ref_p = (report.reference.probabilities if report.reference is not None
             else np.full(3, np.nan))
    for i, outcome in enumerate(report.closed):
        rho = outcome.cavity_state
        if rho is None:
            dump = [float("nan")] * len(entries)
        else:
            dump = [float(getattr(rho[a, b], part))
                    for a in range(dim) for b in range(dim) for part in ("real", "imag")]
        table.add(outcome.record.label, float(outcome.probability), float(ref_p[i]),
                  float(dp[i]), float(ds[i]), *dump)
    return table


# fidelity -------------------------------------------------------------------

def _set_param(cfg: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    try:
        zone, key = name.split(".")
    except ValueError:
        raise ConfigError(f"fidelity sweeps take 'de.<key>' or 'dg.<key>', got {name!r}") from None
    fields = {"coupling_e": "coupling_e", "coupling_g": "coupling_g", "time": "interaction_time",
              "eps_e": "eps_e", "eps_g": "eps_g"}
    if zone not in ("de", "dg") or key not in fields:
        raise ConfigError(f"cannot sweep {name!r}; keys: {sorted(fields)}")
    spec = getattr(cfg, zone)
    try:
        return replace(cfg, **{zone: replace(spec, **{fields[key]: float(value)})})
    except ValueError as exc:
        raise ConfigError(f"{name}={value}: {exc}") from None


def _ideal_counterpart(cfg: ScenarioConfig) -> ScenarioConfig:
    """Same detectors with the wrong-level couplings switched off."""
    de = replace(cfg.de, coupling_g=0.0)
    dg = replace(cfg.dg, coupling_e=0.0)
    return replace(cfg, model=Model.INEFFICIENT, de=de, dg=dg, efficiencies=None)


def fidelity_point(cfg: ScenarioConfig) -> dict:
    t_de = detect_false.q_table(cfg.grid, cfg.de)
    t_dg = detect_false.q_table(cfg.grid, cfg.dg)
    real = detect_false.chain_from_tables(cfg.state, t_de, t_dg)
    ideal = chain_distribution(_ideal_counterpart(cfg))
    row = {"cross_weight": t_de.cross_transition_weight,
           "wrong_weight_de": float(t_de.ionization_weights[1]),
           "wrong_weight_dg": float(t_dg.ionization_weights[0]),
           "f1_closed": metrics.fidelity_first_zone(t_de).value,
           "f1_states": metrics.fidelity(ideal[0].cavity_state, real[0].cavity_state).value}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        row["f2_closed"] = metrics.fidelity_second_zone(t_de, t_dg, strict=False).value
    row["f2_general"] = metrics.fidelity_second_zone_general(t_de, t_dg).value
    row["f2_states"] = metrics.fidelity(ideal[1].cavity_state, real[1].cavity_state).value
    return row


def run_fidelity_scan(cfg: ScenarioConfig) -> Table:
    if cfg.model is not Model.FALSE_COUNT:
        raise ConfigError("the fidelity scan compares false-count detectors to ideal ones; "
                          "set model = \"false-count\"")
    _require_dynamics(cfg, "fidelity")
    if cfg.sweep is None:
        raise ConfigError("fidelity needs a [sweep] over a detector parameter, e.g. de.coupling_g")
    cols = ["cross_weight", "wrong_weight_de", "wrong_weight_dg", "f1_closed", "f1_states",
            "f2_closed", "f2_general", "f2_states"]
    table = Table([cfg.sweep.parameter, *cols], metadata=_meta(cfg, "fidelity"))
    for value in cfg.sweep.values:
        row = fidelity_point(_set_param(cfg, cfg.sweep.parameter, value))
        table.add(float(value), *(float(row[c]) for c in cols))
    return table


# sampling -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RecordEnsemble:
    n_atoms: int
    probabilities: np.ndarray
    indices: np.ndarray  # into core.RECORDS, one per atom

    @property
    def counts(self) -> dict:
        c = np.bincount(self.indices, minlength=len(RECORDS))
        return {r.label: int(n) for r, n in zip(RECORDS, c)}

    @property
    def frequencies(self) -> dict:
        return {k: v / self.n_atoms for k, v in self.counts.items()}

    @property
    def records(self) -> list[ClickRecord]:
        return [RECORDS[i] for i in self.indices]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed))


def sample_records(cfg: ScenarioConfig, probabilities=None) -> RecordEnsemble:
    if probabilities is None:
        probabilities = chain_distribution(cfg).probabilities
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    p = p / p.sum()
    rng = make_rng(cfg.seed)
    idx = rng.choice(len(RECORDS), size=cfg.n_atoms, p=p)
    return RecordEnsemble(cfg.n_atoms, p, idx.astype(np.int64))


def run_sample(cfg: ScenarioConfig) -> Table:
    ens = sample_records(cfg)
    table = Table(["outcome", "count", "frequency", "probability", "sigma", "z_score"],
                  metadata=_meta(cfg, "sample", n_atoms=cfg.n_atoms))
    counts = ens.counts
    for record, p in zip(RECORDS, ens.probabilities):
        n = counts[record.label]
        sigma = float(np.sqrt(p * (1 - p) / cfg.n_atoms))
        freq = n / cfg.n_atoms
        z = (freq - p) / sigma if sigma > 0 else (0.0 if freq == p else float("inf"))
        table.add(record.label, n, freq, float(p), sigma, float(z))
    return table


SCENARIOS = {
    "decay": run_decay_scan,
    "fig1": run_fig1_scan,
    "chain": run_chain_scenario,
    "fidelity": run_fidelity_scan,
    "sample": run_sample,
}
