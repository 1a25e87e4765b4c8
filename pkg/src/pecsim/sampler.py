"""Signed Monte Carlo execution of a quasiprobability program.

Per shot: draw a program entry with probability |x_i|/Z, apply the
realized gate followed by the residual error to the observable (a pure
eigenvalue rescaling for Pauli observables under Pauli-diagonal maps),
draw a +-1 measurement outcome with the resulting mean, and accumulate the
entry's sign times the outcome. The estimate is Z times the signed sample
mean, which is unbiased for the mitigated expectation with variance at
most Z^2 / shots.

Randomness comes from a Philox counter-based stream keyed by the seed:
every shot owns two fixed counter positions (entry draw, outcome draw), so
the result does not depend on how shots would be partitioned across
workers. Signed outcomes are +-1, so aggregation reduces to exact integer
counts; no floating-point accumulation error enters the mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import PauliChannel, eigenvalues
from .implementability import QuasiProgram
from .noise_map import NoiseMap
from .pauli import PauliString, fast_symplectic_transform, sign_vector


@dataclass(frozen=True)
class PecEstimate:
    """One mitigated-expectation estimate with its sampling-cost context."""

    observable: PauliString
    mean: float
    stderr: float
    shots: int
    cost: float
    seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError(f"shot count must be >= 1, got {self.shots}")
        if self.stderr > self.cost / np.sqrt(self.shots) + 1e-12:
            raise ValueError("standard error exceeds the bounded-outcome limit")

    def record(self) -> dict:
        return {
            "observable": self.observable.label(),
            "mean": self.mean,
            "stderr": self.stderr,
            "shots": self.shots,
            "cost": self.cost,
            "seed": self.seed,
        }


def variance_prediction(cost: float, shots: int) -> float:
    """Upper bound Z^2 / N on the estimator variance for +-1 outcomes."""
    if cost < 1.0:
        raise ValueError(f"sampling cost must be >= 1, got {cost}")
    if shots < 1:
        raise ValueError(f"shot count must be >= 1, got {shots}")
    return cost**2 / shots


def run_pec(
    program: QuasiProgram,
    realized_gates: NoiseMap | None,
    error: PauliChannel,
    ideal_expectations,
    observable: PauliString,
    shots: int,
    seed: int,
) -> PecEstimate:
    """Estimate the mitigated expectation of one Pauli observable.

    `realized_gates` maps each program entry to the gate actually applied
    (None means ideal Pauli gates). `ideal_expectations` holds the
    noise-free expectation of every Pauli, indexed conventionally; only the
    observable's entry is consumed. Deterministic per seed.
    """
    if len(program.indices) == 0:
        raise ValueError("empty sampling program")
    if shots < 1:
        raise ValueError(f"shot count must be >= 1, got {shots}")
    if program.n != error.n or program.n != observable.n:
        raise ValueError("program, error, and observable must share the qubit count")
    ideal = np.asarray(ideal_expectations, dtype=float)
    if ideal.shape != (4**program.n,):
        raise ValueError(f"expected {4**program.n} ideal expectations, got {ideal.shape}")
    if np.max(np.abs(ideal)) > 1.0 + 1e-12:
        raise ValueError("ideal expectations must lie in [-1, 1]")

    k = observable.index
    chi_error_k = eigenvalues(error)[k]
    # Per entry: the eigenvalue of (gate o error) at the observable.
    entry_chi = np.empty(len(program.indices))
    for pos, gate_index in enumerate(program.indices):
        if realized_gates is None:
            gate_chi_k = float(sign_vector(PauliString.from_index(program.n, gate_index))[k])
        else:
            gate_chi_k = fast_symplectic_transform(
                realized_gates.theta[gate_index], program.n
            )[k]
        entry_chi[pos] = gate_chi_k * chi_error_k

    means = entry_chi * ideal[k]
    if np.max(np.abs(means)) > 1.0 + 1e-9:
        raise ValueError("per-entry outcome mean falls outside [-1, 1]; gates must be physical")
    means = np.clip(means, -1.0, 1.0)
    signs = program.signs
    # Probability that the signed outcome is +1.
    p_plus = np.where(signs > 0, 0.5 * (1.0 + means), 0.5 * (1.0 - means))

    # Shot s consumes counter positions 2s (entry) and 2s + 1 (outcome).
    rng = np.random.Generator(np.random.Philox(key=seed))
    uniforms = rng.random(2 * shots)
    cdf = np.cumsum(program.weights)
    cdf[-1] = 1.0
    drawn = np.searchsorted(cdf, uniforms[0::2], side="right")
    n_plus = int(np.count_nonzero(uniforms[1::2] < p_plus[drawn]))

    cost = program.cost
    signed_mean = (2 * n_plus - shots) / shots
    stderr = cost * np.sqrt(max(1.0 - signed_mean**2, 0.0) / shots)
    return PecEstimate(
        observable=observable,
        mean=cost * signed_mean,
        stderr=float(stderr),
        shots=shots,
        cost=cost,
        seed=seed,
    )
