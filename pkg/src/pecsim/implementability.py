"""Implementability functions: cancellation cost over a free set.

For a Pauli-diagonal quasi-channel the cost over the free set of all CPTP
Pauli channels has the closed form p = sum_i |nu_i|. For a general finite
free set the cost is the minimum L1 norm over affine decompositions into
the extreme points, computed here by a dense two-phase primal simplex. The
cost equals 1 exactly on the free set and relates to robustness by
p = 2 R + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import PauliChannel

COEFF_EPS = 1e-12
SPAN_TOL = 1e-7
PIVOT_TOL = 1e-9


class TargetOutsideSpanError(Exception):
    """The target is not in the affine hull of the free set's points."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(
            f"target lies outside the affine hull (least-squares residual {residual:.3e})"
        )


@dataclass(frozen=True)
class FreeSet:
    """Finite list of extreme points of a convex free set, as row vectors.

    Every point must satisfy the affine normalization functional
    (normalizer . point = 1, component sum by default), which is what makes
    coefficient sums of decompositions equal 1 automatically.
    """

    points: np.ndarray
    normalizer: np.ndarray | None = None

    def __post_init__(self) -> None:
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.size == 0:
            raise ValueError("free set needs at least one point")
        w = (
            np.ones(points.shape[1])
            if self.normalizer is None
            else np.asarray(self.normalizer, dtype=float)
        )
        if w.shape != (points.shape[1],):
            raise ValueError("normalizer length does not match point dimension")
        norms = points @ w
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("every point must satisfy the affine normalization")
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if np.max(np.abs(points[i] - points[j])) <= 1e-12:
                    raise ValueError(f"duplicate extreme points at positions {i} and {j}")
        points = points.copy()
        points.setflags(write=False)
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "normalizer", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def num_points(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class QuasiProgram:
    """Signed sampling program for one quasi-channel.

    Entries pair Pauli indices with quasiprobabilities x_i that sum to 1;
    the cost Z = sum |x_i| >= 1 normalizes them into sampling weights.
    """

    n: int
    indices: tuple[int, ...]
    quasiprobabilities: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.quasiprobabilities, dtype=float)
        if x.shape != (len(self.indices),):
            raise ValueError("one quasiprobability per index required")
        if abs(x.sum() - 1.0) > 1e-9:
            raise ValueError(f"quasiprobabilities must sum to 1, got {x.sum()!r}")
        x = x.copy()
        x.setflags(write=False)
        object.__setattr__(self, "quasiprobabilities", x)

    @property
    def cost(self) -> float:
        """Sampling cost Z; the estimator variance scales as Z^2 / shots."""
        return float(np.abs(self.quasiprobabilities).sum())

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.quasiprobabilities) / self.cost

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.quasiprobabilities >= 0.0, 1, -1)


@dataclass(frozen=True)
class LpResult:
    p: float
    x: np.ndarray
    iterations: int


def p_pauli(c: PauliChannel) -> float:
    """Closed-form cost over CPTP Pauli channels: sum_i |nu_i|.

    Equals 1 exactly when the channel is CPTP (faithfulness).
    """
    return float(np.abs(c.coeffs).sum())


def quasi_program(c: PauliChannel, threshold: float = COEFF_EPS) -> QuasiProgram:
    """Sampling program from the nonzero coefficients of a quasi-channel."""
    keep = np.flatnonzero(np.abs(c.coeffs) > threshold)
    return QuasiProgram(c.n, tuple(int(k) for k in keep), c.coeffs[keep])


def pauli_channel_as_vector(c: PauliChannel) -> np.ndarray:
    """Coefficient vector view, for feeding channels to the LP solver."""
    return np.array(c.coeffs)


def pauli_conjugation_free_set(n: int) -> FreeSet:
    """The 4^n unit indicators: one extreme point per conjugation map."""
    return FreeSet(np.eye(4**n))


def robustness(p: float) -> float:
    """Mixing-weight reading of the cost: R = (p - 1) / 2."""
    if p < 1.0 - 1e-9:
        raise ValueError(f"cost must be >= 1, got {p}")
    return (p - 1.0) / 2.0


def implementability_lp(f: FreeSet, target) -> LpResult:
    """Minimum L1 decomposition of `target` over the free set's points.

    Solves min sum(x+ + x-) subject to sum_l (x+_l - x-_l) F_l = target with
    x+, x- >= 0. Because every point satisfies the normalization functional,
    the coefficient sum is pinned to normalizer . target: 1 on the affine
    hull, |a| for targets scaled by a (the Minkowski-gauge reading on the
    linear span). Raises TargetOutsideSpanError when the least-squares
    span residual exceeds 1e-7.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (f.dim,):
        raise ValueError(f"target must have dimension {f.dim}, got shape {target.shape}")
    A = f.points.T  # columns are extreme points
    sol, *_ = np.linalg.lstsq(A, target, rcond=None)
    residual = float(np.linalg.norm(A @ sol - target))
    if residual > SPAN_TOL:
        raise TargetOutsideSpanError(residual)

    m = f.num_points
    cost = np.ones(2 * m)
    M = np.hstack([A, -A])
    y, value, iterations = _simplex_min(cost, M, target)
    x = y[:m] - y[m:]
    return LpResult(float(value), x, iterations)


def two_point_decomposition(
    f: FreeSet, x
) -> tuple[float, np.ndarray, float, np.ndarray | None]:
    """Collapse an optimal decomposition to one positive and one negative point.

    Returns (n1, N_plus, n2, N_minus) with n1 - n2 = 1, n1 + n2 = p, and
    both averaged points inside the convex hull. N_minus is None when the
    decomposition has no negative part.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (f.num_points,):
        raise ValueError("one coefficient per extreme point required")
    if abs(x.sum() - 1.0) > 1e-9:
        raise ValueError(f"coefficients must sum to 1, got {x.sum()!r}")
    pos = np.clip(x, 0.0, None)
    neg = np.clip(-x, 0.0, None)
    n1 = float(pos.sum())
    n2 = float(neg.sum())
    n_plus = pos @ f.points / n1
    n_minus = neg @ f.points / n2 if n2 > 0.0 else None
    return n1, n_plus, n2, n_minus


def _simplex_min(cost, A, b, pivot_tol: float = PIVOT_TOL):
    """min cost.y over {A y = b, y >= 0}: two-phase dense tableau simplex.

    Bland's smallest-index rule for both the entering and leaving choice,
    which rules out cycling; determinism matters more than speed at this
    scale. Redundant constraint rows surviving phase 1 are dropped.

    Returns (y, objective, iterations). Raises ValueError when the
    constraints are infeasible (the callers' span pre-check should prevent
    that) or the problem is unbounded.
    """
    A = np.asarray(A, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    cost = np.asarray(cost, dtype=float)
    m, nvar = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial basis, minimize the artificials' total.
    T = np.zeros((m, nvar + m + 1))
    T[:, :nvar] = A
    T[:, nvar : nvar + m] = np.eye(m)
    T[:, -1] = b
    basis = list(range(nvar, nvar + m))
    c1 = np.zeros(nvar + m)
    c1[nvar:] = 1.0
    iterations = _simplex_iterate(T, basis, c1, nvar + m, pivot_tol)
    if float(c1[basis] @ T[:, -1]) > 1e-7:
        raise ValueError("linear program infeasible: internal inconsistency")

    # Drive leftover artificials out, dropping rows that turn out redundant.
    keep = []
    for r in range(len(basis)):
        if basis[r] < nvar:
            keep.append(r)
            continue
        cols = np.flatnonzero(np.abs(T[r, :nvar]) > pivot_tol)
        if cols.size:
            _pivot(T, r, int(cols[0]))
            basis[r] = int(cols[0])
            keep.append(r)
    T = T[keep][:, list(range(nvar)) + [-1]]
    basis = [basis[r] for r in keep]

    # Phase 2 on the feasible basis.
    iterations += _simplex_iterate(T, basis, cost, nvar, pivot_tol)
    y = np.zeros(nvar)
    y[basis] = T[:, -1]
    return y, float(cost @ y), iterations


def _simplex_iterate(T, basis, cost, ncols, pivot_tol) -> int:
    iterations = 0
    while True:
        reduced = cost[:ncols] - cost[basis] @ T[:, :ncols]
        reduced[basis] = 0.0
        entering = -1
        for j in range(ncols):  # Bland: smallest index with negative reduced cost
            if reduced[j] < -pivot_tol:
                entering = j
                break
        if entering < 0:
            return iterations
        col = T[:, entering]
        rows = np.flatnonzero(col > pivot_tol)
        if rows.size == 0:
            raise ValueError("linear program unbounded")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + pivot_tol]
        leaving = min(ties, key=lambda r: basis[r])  # Bland on the leaving variable
        _pivot(T, int(leaving), entering)
        basis[int(leaving)] = entering
        iterations += 1


def _pivot(T, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
