"""n-qubit Pauli labels, commutation signs, and the sign-sum transform.

A Pauli string on n qubits is encoded as a base-4 digit sequence over
{0: I, 1: X, 2: Y, 3: Z}. Qubit 0 is the leftmost character of a text label
and the most significant digit of the linear index:

    index(P) = sum_q digits[q] * 4**(n - 1 - q)

so "XZ" has digits (1, 3) and index 7. Everything here acts through
conjugation maps P(.)P, which are insensitive to global phase, so no phase
is tracked anywhere. All sign arithmetic is integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

MAX_QUBITS = 10

_CHARS = "IXYZ"
_DIGIT = {c: d for d, c in enumerate(_CHARS)}

# Single-qubit product modulo phase: equal digits cancel, I is neutral,
# two distinct non-identity digits give the third.
_PRODUCT = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
)

# Single-qubit commutation signs, rows/cols ordered I, X, Y, Z. This 4x4
# block is also the butterfly kernel of the transform below; applying it
# twice gives 4 times the identity.
_KERNEL_INT = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ],
    dtype=np.int64,
)
_KERNEL = _KERNEL_INT.astype(float)


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli label (1 <= n <= 10), immutable."""

    n: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        if len(self.digits) != self.n:
            raise ValueError(f"expected {self.n} digits, got {len(self.digits)}")
        if any(d not in (0, 1, 2, 3) for d in self.digits):
            raise ValueError(f"digits must be base-4, got {self.digits}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse an uppercase I/X/Y/Z label, qubit 0 leftmost."""
        if not label:
            raise ValueError("empty Pauli label")
        if len(label) > MAX_QUBITS:
            raise ValueError(f"label longer than {MAX_QUBITS} qubits: {label!r}")
        try:
            digits = tuple(_DIGIT[c] for c in label)
        except KeyError as exc:
            raise ValueError(f"invalid character {exc.args[0]!r} in Pauli label {label!r}") from None
        return cls(len(label), digits)

    @classmethod
    def from_index(cls, n: int, index: int) -> "PauliString":
        """Inverse of .index for a given qubit count."""
        if not 0 <= index < 4**n:
            raise ValueError(f"index {index} out of range for n={n}")
        digits = tuple((index >> (2 * (n - 1 - q))) & 3 for q in range(n))
        return cls(n, digits)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, (0,) * n)

    @property
    def index(self) -> int:
        i = 0
        for d in self.digits:
            i = (i << 2) | d
        return i

    def label(self) -> str:
        return "".join(_CHARS[d] for d in self.digits)

    def is_identity(self) -> bool:
        return all(d == 0 for d in self.digits)

    def __str__(self) -> str:
        return self.label()


def pauli_from_label(label: str) -> PauliString:
    return PauliString.from_label(label)


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ValueError(f"mismatched qubit counts: {a.n} vs {b.n}")


def commutation_sign(a: PauliString, b: PauliString) -> int:
    """+1 if the operators commute, -1 if they anticommute.

    Product over qubits of the single-qubit sign: +1 when either digit is
    the identity or both are equal, else -1. Symmetric in its arguments.
    """
    _check_same_n(a, b)
    s = 1
    for x, y in zip(a.digits, b.digits):
        s *= int(_KERNEL_INT[x, y])
    return s


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    """Group product modulo phase (XOR in the symplectic bit encoding)."""
    _check_same_n(a, b)
    return PauliString(a.n, tuple(_PRODUCT[x][y] for x, y in zip(a.digits, b.digits)))


def product_index(n: int, i: int, j: int) -> int:
    """pauli_product on linear indices, avoiding object construction."""
    out = 0
    for q in range(n):
        shift = 2 * (n - 1 - q)
        out |= _PRODUCT[(i >> shift) & 3][(j >> shift) & 3] << shift
    return out


def sign_vector(a: PauliString) -> np.ndarray:
    """Length-4^n int8 vector of commutation signs against every Pauli.

    Entry k equals commutation_sign(a, P_k); entry 0 is always +1.
    """
    rows = (_KERNEL_INT[d] for d in a.digits)
    return reduce(np.kron, rows).astype(np.int8)


def fast_symplectic_transform(v: np.ndarray, n: int) -> np.ndarray:
    """Sign-sum transform: out[k] = sum_i v[i] * commutation_sign(i, k).

    Runs as n butterfly passes with the 4x4 kernel, O(n 4^n). The transform
    is its own inverse up to the scale 4^n: applying it twice multiplies the
    input by 4^n. Maps channel coefficients to channel eigenvalues.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    v = np.asarray(v, dtype=float)
    if v.shape != (4**n,):
        raise ValueError(f"expected vector of length {4**n}, got shape {v.shape}")
    out = v.reshape((4,) * n)
    for axis in range(n):
        out = np.moveaxis(np.tensordot(_KERNEL, out, axes=(1, axis)), 0, axis)
    return out.reshape(-1)


def all_labels(n: int) -> list[str]:
    """Every n-qubit label in index order."""
    return [PauliString.from_index(n, k).label() for k in range(4**n)]
