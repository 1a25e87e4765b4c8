"""Pauli-diagonal (quasi-)channels over the conjugation-map basis.

A channel is a real coefficient vector nu of length 4^n: the weight of each
conjugation map P_i(.)P_i. Trace preservation pins sum(nu) = 1; complete
positivity is equivalent to all coefficients being nonnegative. The
eigenvalue picture is the sign-sum transform of the coefficients, under
which composition is a pointwise product, which makes the algebra abelian
and inverses cheap when no eigenvalue vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .pauli import (
    MAX_QUBITS,
    PauliString,
    fast_symplectic_transform,
    sign_vector,
)

SUM_TOL = 1e-9
CPTP_TOL = 1e-9
INVERT_TOL = 1e-9
DENSE_MAX_QUBITS = 3


class NotInvertibleError(Exception):
    """A channel eigenvalue is too small to take a reciprocal."""

    def __init__(self, index: int, magnitude: float):
        self.index = index
        self.magnitude = magnitude
        super().__init__(
            f"channel eigenvalue {index} has magnitude {magnitude:.3e}, below tolerance"
        )


@dataclass(frozen=True)
class PauliChannel:
    """Trace-preserving Pauli-diagonal map; may have negative weights (HPTP)."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (4**self.n,):
            raise ValueError(
                f"expected {4**self.n} coefficients for n={self.n}, got shape {coeffs.shape}"
            )
        total = coeffs.sum()
        # Tolerance is relative to the L1 mass: steeply amplified inverses
        # cannot hold an absolute 1e-9 through float summation.
        if abs(total - 1.0) > SUM_TOL * max(1.0, np.abs(coeffs).sum()):
            raise ValueError(f"coefficients must sum to 1 (trace preservation), got {total!r}")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class LindbladModel:
    """Sparse generator list {(P_i, rate)} of a Pauli-Lindblad channel.

    The identity is excluded (its generator vanishes identically) and rates
    may be negative, which is how inverses and over-mitigation are built.
    """

    n: int
    generators: tuple[tuple[PauliString, float], ...]

    def __post_init__(self) -> None:
        seen = set()
        for pauli, _rate in self.generators:
            if pauli.n != self.n:
                raise ValueError(f"generator {pauli} has wrong qubit count for n={self.n}")
            if pauli.is_identity():
                raise ValueError("identity generator is not allowed")
            if pauli.digits in seen:
                raise ValueError(f"duplicate generator {pauli}")
            seen.add(pauli.digits)

    @property
    def total_rate(self) -> float:
        return float(sum(rate for _p, rate in self.generators))

    def scaled(self, factor: float) -> "LindbladModel":
        """Same generators with every rate multiplied by `factor`."""
        return LindbladModel(
            self.n, tuple((p, rate * factor) for p, rate in self.generators)
        )


def channel_from_coeffs(n: int, coeffs) -> PauliChannel:
    return PauliChannel(n, np.asarray(coeffs, dtype=float))


def identity_channel(n: int) -> PauliChannel:
    coeffs = np.zeros(4**n)
    coeffs[0] = 1.0
    return PauliChannel(n, coeffs)


def pauli_conjugation(p: PauliString) -> PauliChannel:
    """The channel rho -> P rho P for a single Pauli string."""
    coeffs = np.zeros(4**p.n)
    coeffs[p.index] = 1.0
    return PauliChannel(p.n, coeffs)


def depolarizing_channel(lam: float) -> PauliChannel:
    """Single-qubit depolarizing error: (1 - 3 lam/4) I + (lam/4)(X + Y + Z)."""
    return PauliChannel(1, np.array([1.0 - 0.75 * lam, lam / 4, lam / 4, lam / 4]))


def lindblad_channel(model: LindbladModel) -> PauliChannel:
    """Exponential of the generator list, as a left fold of two-term factors.

    Each generator contributes the factor omega I + (1 - omega) P with
    omega = (1 + exp(-2 rate)) / 2; for negative rates omega > 1 and the
    weight on P is negative, which reproduces the inverse channel. The fold
    is exact because Pauli-diagonal composition is abelian: each factor
    multiplies the eigenvalue vector by exp(-2 rate) on the Paulis that
    anticommute with its generator and leaves the rest untouched.
    """
    chi = np.ones(4**model.n)
    for pauli, rate in model.generators:
        factor = math.exp(-2.0 * rate)
        chi *= np.where(sign_vector(pauli) > 0, 1.0, factor)
    return from_eigenvalues(model.n, chi)


def eigenvalues(c: PauliChannel) -> np.ndarray:
    """Transfer eigenvalues chi_k = sum_i nu_i eps_ik; chi_0 is always 1."""
    return fast_symplectic_transform(c.coeffs, c.n)


def from_eigenvalues(n: int, chi) -> PauliChannel:
    """Inverse transform; requires chi_0 = 1 (trace preservation)."""
    chi = np.asarray(chi, dtype=float)
    if chi.shape != (4**n,):
        raise ValueError(f"expected {4**n} eigenvalues, got shape {chi.shape}")
    if abs(chi[0] - 1.0) > SUM_TOL * max(1.0, float(np.max(np.abs(chi)))):
        raise ValueError(f"eigenvalue 0 must be 1, got {chi[0]!r}")
    return PauliChannel(n, fast_symplectic_transform(chi, n) / 4**n)


def compose(a: PauliChannel, b: PauliChannel) -> PauliChannel:
    """Channel composition: eigenvalues multiply pointwise (commutative)."""
    if a.n != b.n:
        raise ValueError(f"mismatched qubit counts: {a.n} vs {b.n}")
    return from_eigenvalues(a.n, eigenvalues(a) * eigenvalues(b))


def compose_power(c: PauliChannel, k: int) -> PauliChannel:
    """k-fold self-composition via eigenvalue powers."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    if k == 0:
        return identity_channel(c.n)
    return from_eigenvalues(c.n, eigenvalues(c) ** k)


def inverse(c: PauliChannel, tol: float = INVERT_TOL) -> PauliChannel:
    """Pointwise reciprocal in the eigenvalue picture.

    Raises NotInvertibleError when any |chi_k| < tol; the inverse is HPTP in
    general (negative coefficients).
    """
    chi = eigenvalues(c)
    small = np.argmin(np.abs(chi))
    if abs(chi[small]) < tol:
        raise NotInvertibleError(int(small), float(abs(chi[small])))
    return from_eigenvalues(c.n, 1.0 / chi)


def is_cptp(c: PauliChannel, tol: float = CPTP_TOL) -> bool:
    """Pauli channel positivity: every coefficient >= -tol."""
    return bool(c.coeffs.min() >= -tol)


def identity_component(c: PauliChannel) -> float:
    """Weight nu_0 of the identity conjugation map."""
    return float(c.coeffs[0])


def twirl_diagonal(n: int, omega: np.ndarray) -> PauliChannel:
    """Project a general channel's Pauli-pair weight matrix onto its diagonal.

    Randomizing a channel over conjugation by all Pauli strings kills the
    off-diagonal weights, so the twirled channel is Pauli-diagonal with
    coefficients diag(omega).
    """
    omega = np.asarray(omega)
    if omega.shape != (4**n, 4**n):
        raise ValueError(f"expected a {4**n}x{4**n} weight matrix, got {omega.shape}")
    diag = np.real(np.diagonal(omega)).astype(float)
    if abs(diag.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"diagonal weights must sum to 1, got {diag.sum()!r}")
    return PauliChannel(n, diag)


_SINGLE = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@lru_cache(maxsize=8)
def pauli_matrices(n: int) -> np.ndarray:
    """(4^n, 2^n, 2^n) complex stack of Pauli matrices in index order."""
    if not 1 <= n <= DENSE_MAX_QUBITS:
        raise ValueError(f"dense Pauli matrices limited to n <= {DENSE_MAX_QUBITS}")
    mats = np.empty((4**n, 2**n, 2**n), dtype=complex)
    for k in range(4**n):
        p = PauliString.from_index(n, k)
        mats[k] = reduce(np.kron, (_SINGLE[d] for d in p.digits))
    mats.setflags(write=False)
    return mats


def apply_dense(c: PauliChannel, H: np.ndarray) -> np.ndarray:
    """Apply the channel to a Hermitian matrix: sum_i nu_i P_i H P_i.

    Dense path, capped at n <= 3. Preserves trace and Hermiticity; Pauli
    channels are unital, so the maximally mixed state is a fixed point.
    """
    if c.n > DENSE_MAX_QUBITS:
        raise ValueError(f"dense application limited to n <= {DENSE_MAX_QUBITS}")
    H = np.asarray(H, dtype=complex)
    dim = 2**c.n
    if H.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got {H.shape}")
    if not np.allclose(H, H.conj().T, atol=1e-10):
        raise ValueError("matrix is not Hermitian")
    mats = pauli_matrices(c.n)
    out = np.zeros((dim, dim), dtype=complex)
    for nu, P in zip(c.coeffs, mats):
        if nu != 0.0:
            out += nu * (P @ H @ P)
    return out


def tensor(a: PauliChannel, b: PauliChannel) -> PauliChannel:
    """Tensor product; coefficient outer product under the index convention."""
    if a.n + b.n > MAX_QUBITS:
        raise ValueError(f"tensor product exceeds the {MAX_QUBITS}-qubit cap")
    return PauliChannel(a.n + b.n, np.kron(a.coeffs, b.coeffs))


def random_pauli_lindblad(n: int, total_rate: float, seed) -> LindbladModel:
    """Random generator rates with a fixed total.

    Rates over all 4^n - 1 non-identity Paulis are drawn uniformly from the
    simplex (symmetric Dirichlet, weight 1) and scaled to sum to
    `total_rate`. Deterministic per seed.
    """
    if total_rate < 0:
        raise ValueError(f"total rate must be nonnegative, got {total_rate}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(4**n - 1))
    return LindbladModel(
        n,
        tuple(
            (PauliString.from_index(n, k + 1), float(w * total_rate))
            for k, w in enumerate(weights)
        ),
    )
