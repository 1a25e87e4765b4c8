"""The noisy-gate map: ideal Pauli gates to their noisy realizations.

The map is a D x D real matrix (D = 4^n) whose row i holds the Pauli
coefficients of the noisy gate realizing the conjugation by P_i. Physical
maps are row-stochastic: nonnegative rows summing to 1. Inverting the map
is what turns a quasiprobability program over ideal gates into one over
the noisy gates that realizes the ideal target exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .channels import PauliChannel, compose, pauli_conjugation
from .pauli import MAX_QUBITS, PauliString

ROW_SUM_TOL = 1e-9
PHYSICAL_TOL = 1e-9
PIVOT_TOL = 1e-12


class SingularMapError(Exception):
    """Gaussian elimination hit a pivot below tolerance."""

    def __init__(self, step: int, pivot: float):
        self.step = step
        self.pivot = pivot
        super().__init__(f"matrix is singular at elimination step {step} (pivot {pivot:.3e})")


@dataclass(frozen=True)
class NoiseMap:
    """Row i = Pauli coefficients of the noisy realization of gate P_i."""

    n: int
    theta: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        theta = np.asarray(self.theta, dtype=float)
        D = 4**self.n
        if theta.shape != (D, D):
            raise ValueError(f"expected a {D}x{D} matrix, got shape {theta.shape}")
        sums = theta.sum(axis=1)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > ROW_SUM_TOL:
            raise ValueError(
                f"row {worst} sums to {sums[worst]!r}; rows must sum to 1 (trace preservation)"
            )
        theta = theta.copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return bool(self.theta.min() >= -tol)

    def gate_row(self, i: int) -> PauliChannel:
        """The noisy gate realizing P_i, as a channel."""
        return PauliChannel(self.n, self.theta[i])


class InvertibilityResult(NamedTuple):
    passes: bool
    threshold: float
    frobenius_norm: float
    failure_bound: float | None


def identity_noise_map(n: int) -> NoiseMap:
    return NoiseMap(n, np.eye(4**n))


def noise_map_from_gate_noises(noises: Sequence[PauliChannel]) -> NoiseMap:
    """Build the map from one noise channel per gate: row i = noises[i] o P_i."""
    if not noises:
        raise ValueError("need one noise channel per Pauli gate")
    n = noises[0].n
    if len(noises) != 4**n:
        raise ValueError(f"expected {4**n} noise channels for n={n}, got {len(noises)}")
    rows = np.empty((4**n, 4**n))
    for i, noise in enumerate(noises):
        if noise.n != n:
            raise ValueError(f"noise {i} has qubit count {noise.n}, expected {n}")
        rows[i] = compose(noise, pauli_conjugation(PauliString.from_index(n, i))).coeffs
    return NoiseMap(n, rows)


def apply_noise(m: NoiseMap, c: PauliChannel) -> PauliChannel:
    """Replace every ideal gate by its noisy row: coefficients become theta^T nu."""
    if m.n != c.n:
        raise ValueError(f"mismatched qubit counts: map {m.n} vs channel {c.n}")
    return PauliChannel(c.n, m.theta.T @ c.coeffs)


def invert_noise_map(m: NoiseMap, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Matrix inverse by Gauss-Jordan elimination with partial row pivoting.

    Raises SingularMapError (with the elimination step) when the best
    available pivot falls below `pivot_tol`.
    """
    D = m.dim
    a = m.theta.copy()
    inv = np.eye(D)
    for k in range(D):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < pivot_tol:
            raise SingularMapError(k, float(abs(a[p, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            inv[[k, p]] = inv[[p, k]]
        scale = a[k, k]
        a[k] /= scale
        inv[k] /= scale
        for r in range(D):
            if r != k and a[r, k] != 0.0:
                factor = a[r, k]
                a[r] -= factor * a[k]
                inv[r] -= factor * inv[k]
    return inv


def modified_quasiprobability(m: NoiseMap, r) -> np.ndarray:
    """Quasiprobabilities over noisy gates realizing the ideal program `r`.

    q = (theta^T)^{-1} r, so that sum_i q_i K_i = sum_j r_j P_j exactly.
    Row-stochasticity preserves the normalization: sum q = sum r = 1.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (m.dim,):
        raise ValueError(f"expected {m.dim} quasiprobabilities, got shape {r.shape}")
    if abs(r.sum() - 1.0) > ROW_SUM_TOL:
        raise ValueError(f"input quasiprobabilities must sum to 1, got {r.sum()!r}")
    return invert_noise_map(m).T @ r


def p_over_noisy_gates(m: NoiseMap, c: PauliChannel) -> float:
    """Cancellation cost of `c` over the noisy gate set: sum_i |q_i|.

    Affine invariance makes this the cost over the noisy free set without
    any LP: pull the channel back through the inverse map and take the L1
    norm there.
    """
    return float(np.abs(modified_quasiprobability(m, c.coeffs)).sum())


def theta_lambda(m: NoiseMap) -> float:
    """Maximal gate-error probability: 1 - min_i theta_ii."""
    return float(1.0 - np.diagonal(m.theta).min())


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2)))


def invertibility_criterion(m: NoiseMap, shots: int, failure: float) -> InvertibilityResult:
    """Finite-shot invertibility check at confidence 1 - failure.

    The map counts as invertible when its Frobenius norm clears
    sqrt(2 D ln(1/failure) / shots). When the matrix actually inverts, the
    raw bound exp(-shots / (2 ||theta^-1||_F^2)) on the probability that the
    true map is singular is reported alongside.
    """
    if shots < 1:
        raise ValueError(f"shot count must be >= 1, got {shots}")
    if not 0.0 < failure < 1.0:
        raise ValueError(f"failure probability must be in (0, 1), got {failure}")
    threshold = math.sqrt(2.0 * m.dim * math.log(1.0 / failure) / shots)
    norm = frobenius_norm(m.theta)
    try:
        inv = invert_noise_map(m)
        failure_bound = math.exp(-shots / (2.0 * frobenius_norm(inv) ** 2))
    except SingularMapError:
        failure_bound = None
    return InvertibilityResult(norm >= threshold, threshold, norm, failure_bound)


def simulate_estimation(true_map: NoiseMap, shots: int, seed) -> NoiseMap:
    """Finite-shot calibration of a physical map.

    Each row is resampled as the empirical distribution of `shots`
    multinomial draws over its entries, which keeps rows normalized and the
    per-entry variance at most 1/(4 shots). Deterministic per seed.
    """
    if shots < 1:
        raise ValueError(f"shot count must be >= 1, got {shots}")
    if not true_map.is_physical():
        raise ValueError("estimation is modeled for physical (nonnegative) maps only")
    rng = np.random.default_rng(seed)
    rows = np.clip(true_map.theta, 0.0, None)
    rows /= rows.sum(axis=1, keepdims=True)
    estimate = np.empty_like(rows)
    for i in range(true_map.dim):
        estimate[i] = rng.multinomial(shots, rows[i]) / shots
    return NoiseMap(true_map.n, estimate)
