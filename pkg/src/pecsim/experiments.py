"""Configuration-driven experiment harness.

Three studies at desk scale: bias of noisy cancellation versus circuit
depth for the separate and direct strategies, bias of under- and
over-mitigated error models, and finite-shot invertibility of the noisy
gate map. Every random draw is keyed by (master seed, scenario seed,
stream), so identical configurations reproduce byte-identical tables.
Scenario seeds can run in parallel (PEC_SIM_THREADS caps the workers,
0 = auto) and are merged in sorted order either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from .bias import BiasReport, bias_report, exact_bias, implementability_distance, mitigation_bias_bound
from .channels import (
    PauliChannel,
    compose_power,
    is_cptp,
    lindblad_channel,
    random_pauli_lindblad,
)
from .implementability import p_pauli
from .noise_map import (
    NoiseMap,
    invertibility_criterion,
    noise_map_from_gate_noises,
    simulate_estimation,
)
from .pauli import PauliString

TABLE_FIELDS = (
    "method",
    "regime",
    "layer",
    "seed",
    "pauli",
    "bias",
    "p_distance",
    "p_canceled",
    "cptp",
    "bound_name",
    "bound_value",
)

INVERTIBILITY_FIELDS = (
    "shots",
    "seed",
    "frobenius_norm",
    "threshold",
    "passes",
    "failure_bound",
)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 2
    layers: int = 20
    rate: float = 0.05
    residual: float = 0.05
    seeds: int = 20
    master_seed: int = 0
    method: str = "both"
    out: str | None = None
    fmt: str = "csv"
    shot_grid: tuple[int, ...] = (100, 1000, 10000)
    failure: float = 0.01
    plot: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("qubit count must be >= 1")
        if self.layers < 1:
            raise ValueError("layer count must be >= 1")
        if self.rate < 0 or self.residual < 0:
            raise ValueError("error rates must be nonnegative")
        if self.seeds < 1:
            raise ValueError("seed count must be >= 1")
        if self.method not in ("separate", "direct", "both"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.fmt!r}")
        if not 0.0 < self.failure < 1.0:
            raise ValueError("failure probability must be in (0, 1)")
        if any(s < 1 for s in self.shot_grid):
            raise ValueError("shot grid entries must be >= 1")

    @property
    def methods(self) -> tuple[str, ...]:
        return ("separate", "direct") if self.method == "both" else (self.method,)


def scenario_seed(config: ExperimentConfig, seed: int, stream: int) -> np.random.SeedSequence:
    """Counter-style seed for one random draw of one scenario."""
    return np.random.SeedSequence((config.master_seed, seed, stream))


def sample_error_and_gate_noises(
    config: ExperimentConfig, seed: int
) -> tuple[PauliChannel, NoiseMap]:
    """One scenario's single-layer error and noisy gate map.

    Stream 0 drives the error model; streams 1..4^n drive the per-gate
    noise models. Every gate, the identity included, gets an independent
    random model at the configured rate.
    """
    e0 = lindblad_channel(
        random_pauli_lindblad(config.n, config.rate, scenario_seed(config, seed, 0))
    )
    noises = [
        lindblad_channel(
            random_pauli_lindblad(config.n, config.rate, scenario_seed(config, seed, 1 + i))
        )
        for i in range(4**config.n)
    ]
    return e0, noise_map_from_gate_noises(noises)


def _thread_count(num_tasks: int) -> int:
    raw = os.environ.get("PEC_SIM_THREADS", "0")
    try:
        requested = int(raw)
    except ValueError:
        raise ValueError(f"PEC_SIM_THREADS must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError(f"PEC_SIM_THREADS must be >= 0, got {requested}")
    if requested == 0:
        return 1  # auto: desk-scale scenarios run serially
    return max(1, min(requested, num_tasks))


def _map_seeds(fn: Callable, config: ExperimentConfig) -> list:
    tasks = [(config, seed) for seed in range(config.seeds)]
    workers = _thread_count(len(tasks))
    if workers == 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _fig3_seed(task: tuple[ExperimentConfig, int]) -> list[dict]:
    config, seed = task
    e0, theta = sample_error_and_gate_noises(config, seed)
    rows: list[dict] = []
    for layer in range(1, config.layers + 1):
        for method in config.methods:
            report: BiasReport = bias_report(e0, theta, layer, method)
            rows.extend(report.records(seed=seed, regime=""))
    return rows


def run_fig3(config: ExperimentConfig) -> list[dict]:
    """Noisy-cancellation bias table over (seed, layer, method, Pauli)."""
    rows = [row for rows in _map_seeds(_fig3_seed, config) for row in rows]
    rows.sort(key=_row_key)
    return rows


def _fig4_seed(task: tuple[ExperimentConfig, int]) -> list[dict]:
    config, seed = task
    model = random_pauli_lindblad(config.n, config.residual, scenario_seed(config, seed, 0))
    rows: list[dict] = []
    labels = [PauliString.from_index(config.n, k).label() for k in range(4**config.n)]
    for regime, sign in (("under", 1.0), ("over", -1.0)):
        single = lindblad_channel(model.scaled(sign))
        rates = np.array([rate * sign for _p, rate in model.generators])
        for layer in range(1, config.layers + 1):
            mitigated = compose_power(single, layer)
            biases = exact_bias(mitigated)
            dist = implementability_distance(mitigated)
            p_canc = p_pauli(mitigated)
            flag = is_cptp(mitigated)
            bound = mitigation_bias_bound(layer * rates)
            for label, bias_val in zip(labels, biases):
                rows.append(
                    {
                        "method": "",
                        "regime": regime,
                        "layer": layer,
                        "seed": seed,
                        "pauli": label,
                        "bias": float(bias_val),
                        "p_distance": dist,
                        "p_canceled": p_canc,
                        "cptp": flag,
                        "bound_name": regime,
                        "bound_value": bound,
                    }
                )
    return rows


def run_fig4(config: ExperimentConfig) -> list[dict]:
    """Mitigation-residual bias table over (seed, layer, regime, Pauli)."""
    rows = [row for rows in _map_seeds(_fig4_seed, config) for row in rows]
    rows.sort(key=_row_key)
    return rows


def _invertibility_seed(task: tuple[ExperimentConfig, int]) -> list[dict]:
    config, seed = task
    noises = [
        lindblad_channel(
            random_pauli_lindblad(config.n, config.rate, scenario_seed(config, seed, 1 + i))
        )
        for i in range(4**config.n)
    ]
    true_map = noise_map_from_gate_noises(noises)
    rows = []
    for shots in config.shot_grid:
        estimate = simulate_estimation(
            true_map, shots, np.random.SeedSequence((config.master_seed, seed, 0, shots))
        )
        result = invertibility_criterion(estimate, shots, config.failure)
        rows.append(
            {
                "shots": shots,
                "seed": seed,
                "frobenius_norm": result.frobenius_norm,
                "threshold": result.threshold,
                "passes": result.passes,
                "failure_bound": result.failure_bound,
            }
        )
    return rows


def run_invertibility_study(config: ExperimentConfig) -> list[dict]:
    """Finite-shot invertibility table over (shots, seed)."""
    rows = [row for rows in _map_seeds(_invertibility_seed, config) for row in rows]
    rows.sort(key=lambda r: (r["shots"], r["seed"]))
    return rows


def _row_key(row: dict) -> tuple:
    return (
        row["method"],
        row["regime"],
        row["layer"],
        row["seed"],
        PauliString.from_label(row["pauli"]).index,
    )


def metadata(config: ExperimentConfig, experiment: str) -> dict:
    """Deterministic sidecar describing how the table was produced."""
    return {
        "experiment": experiment,
        "config": asdict(config),
        "rate_sampling": "symmetric Dirichlet(1) over non-identity Paulis, scaled to the total rate",
        "identity_gate_noise": "independent random model at the same rate as every other gate",
        "estimation_model": "per-row multinomial resampling",
        "float_format": "9 significant digits",
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a structured-text object, rejecting unknown keys."""
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    if "shot_grid" in data:
        data = dict(data)
        data["shot_grid"] = tuple(int(s) for s in data["shot_grid"])
    return replace(ExperimentConfig(), **data)
