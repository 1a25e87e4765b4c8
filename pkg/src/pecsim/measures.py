"""Small dense-matrix measures: trace norm, negativity, purity, diamond bound.

Everything here runs on explicit matrices of at most three qubits. The
trace norm doubles as the cancellation cost of a quasi-state over all
density matrices, the log negativity is its logarithm after a partial
transpose, and the channel-level cost is lower-bounded by trace norms of
outputs on ancilla-extended pure inputs, with equality at the maximally
entangled input for Pauli-diagonal maps.
"""

from __future__ import annotations

import math

import numpy as np

from .channels import PauliChannel, apply_dense, pauli_matrices
from .implementability import p_pauli

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12


def _check_hermitian(H: np.ndarray, dim: int | None = None) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if dim is not None and H.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {H.shape}")
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    return H


def jacobi_eigenvalues(sym: np.ndarray, tol: float = JACOBI_TOL) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.

    Rotations repeat until the off-diagonal Frobenius mass drops below
    `tol` relative to the matrix norm. Small and bit-stable; intended for
    the dense dimensions used here.
    """
    a = np.asarray(sym, dtype=float).copy()
    d = a.shape[0]
    if d == 1:
        return a.reshape(1).copy()
    scale = max(float(np.sqrt(np.sum(a * a))), 1.0)
    for _sweep in range(60):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 0.1 * tol * scale / d:
                    continue
                # Stable rotation angle (Rutishauser).
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
    else:
        raise RuntimeError("Jacobi sweeps failed to converge")
    return np.diagonal(a).copy()


def hermitian_eigenvalues(H: np.ndarray) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix via its real embedding.

    The 2d x 2d real symmetric matrix [[Re, -Im], [Im, Re]] carries every
    eigenvalue of H twice.
    """
    H = _check_hermitian(H)
    embedded = np.block(
        [[H.real, -H.imag], [H.imag, H.real]]
    )
    eigs = np.sort(jacobi_eigenvalues(embedded))
    return eigs[::2].copy()


def trace_norm(H: np.ndarray) -> float:
    """Sum of absolute eigenvalues; equals the cancellation cost of a
    quasi-state over the free set of all density matrices."""
    return float(np.abs(hermitian_eigenvalues(H)).sum())


def partial_transpose(rho: np.ndarray, subsystem_b: tuple[int, ...] | list[int]) -> np.ndarray:
    """Transpose the indices of the given qubits; an involution."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    n = int(round(math.log2(dim)))
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"expected a 2^n x 2^n matrix, got shape {rho.shape}")
    qubits = tuple(subsystem_b)
    if len(qubits) == 0:
        raise ValueError("subsystem must contain at least one qubit")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"invalid qubit partition {qubits} for n={n}")
    t = rho.reshape((2,) * (2 * n))
    for q in qubits:
        t = np.swapaxes(t, q, n + q)
    return t.reshape(dim, dim)


def log_negativity(rho: np.ndarray, subsystem_b) -> float:
    """Natural log of the trace norm of the partial transpose."""
    rho = _check_hermitian(rho)
    return math.log(trace_norm(partial_transpose(rho, subsystem_b)))


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2)."""
    rho = _check_hermitian(rho)
    return float(np.trace(rho @ rho).real)


def frobenius_norm_matrix(H: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(H)) ** 2)))


def purity_ratio_bound(c: PauliChannel, sigma: np.ndarray) -> tuple[float, float]:
    """(||c(sigma)||_2 / ||sigma||_2, p) for a channel of unitary parts.

    Pauli conjugations are Frobenius isometries, so the ratio can never
    exceed the channel's cancellation cost; violation indicates a numerical
    fault and raises.
    """
    sigma = _check_hermitian(sigma, 2**c.n)
    denom = frobenius_norm_matrix(sigma)
    if denom == 0.0:
        raise ValueError("sigma must be nonzero")
    lhs = frobenius_norm_matrix(apply_dense(c, sigma)) / denom
    rhs = p_pauli(c)
    if lhs > rhs + 1e-9:
        raise RuntimeError(f"purity ratio {lhs} exceeded the cost bound {rhs}")
    return lhs, rhs


def maximally_entangled_state(n: int) -> np.ndarray:
    """|Phi><Phi| on a 2^n x 2^n bipartite system, ancilla first."""
    d = 2**n
    vec = np.zeros(d * d, dtype=complex)
    for j in range(d):
        vec[j * d + j] = 1.0 / math.sqrt(d)
    return np.outer(vec, vec.conj())


def diamond_lower_bound(c: PauliChannel, samples: int, seed) -> float:
    """Sampled lower bound on the channel cost via ancilla-extended inputs.

    Maximizes ||(id (x) c)(phi)||_1 over random pure states phi plus the
    maximally entangled input, for which the output is the Choi state and
    the bound is tight on Pauli-diagonal maps. Capped at two qubits.
    """
    if c.n > 2:
        raise ValueError("diamond lower bound limited to n <= 2")
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    d = 2**c.n
    extended = [np.kron(np.eye(d), P) for P in pauli_matrices(c.n)]
    rng = np.random.default_rng(seed)

    def output_trace_norm(phi: np.ndarray) -> float:
        out = np.zeros_like(phi)
        for nu, ext in zip(c.coeffs, extended):
            if nu != 0.0:
                out += nu * (ext @ phi @ ext.conj().T)
        return trace_norm(out)

    best = output_trace_norm(maximally_entangled_state(c.n))
    for _ in range(samples):
        vec = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
        vec /= np.linalg.norm(vec)
        best = max(best, output_trace_norm(np.outer(vec, vec.conj())))
    return best
