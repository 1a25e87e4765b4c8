"""Exact biases of imperfect cancellation and their analytic upper bounds.

The canceled error of a mitigated circuit is itself a Pauli-diagonal
(quasi-)channel; its deviation from the identity gives per-observable
biases |1 - chi_k|, all dominated by the L1 distance sum_i |delta_i0 -
nu_i|. The bounds below need only quantities an experimenter actually has:
the maximal gate-error probability of the noisy gate map and per-layer
sampling costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import (
    PauliChannel,
    compose,
    compose_power,
    eigenvalues,
    inverse,
    is_cptp,
)
from .implementability import p_pauli
from .noise_map import NoiseMap, apply_noise, theta_lambda
from .pauli import PauliString


def exact_bias(canceled: PauliChannel) -> np.ndarray:
    """Per-Pauli expectation bias |1 - chi_k| of a canceled error."""
    out = np.abs(1.0 - eigenvalues(canceled))
    out[0] = 0.0  # trace preservation pins chi_0 = 1
    return out


def implementability_distance(canceled: PauliChannel) -> float:
    """L1 distance between the canceled error and the identity.

    Dominates every per-Pauli bias; for a CPTP canceled error it equals
    2 (1 - nu_0) exactly.
    """
    delta = -np.asarray(canceled.coeffs).copy()
    delta[0] += 1.0
    return float(np.abs(delta).sum())


def bound_direct(theta_lam: float, p_list: Sequence[float]) -> float:
    """Whole-circuit cancellation: 2 theta_lambda prod_i p_i."""
    _check_bound_inputs(theta_lam, p_list)
    return 2.0 * theta_lam * float(np.prod(p_list))


def bound_separate(theta_lam: float, p_list: Sequence[float]) -> float:
    """Per-layer cancellation: 2 theta_lambda sum_j prod_{i<=j} p_i."""
    _check_bound_inputs(theta_lam, p_list)
    return 2.0 * theta_lam * float(np.cumprod(p_list).sum())


def cptp_bound_direct(theta_lam: float) -> float:
    """When the canceled error stays CPTP the direct bias is at most 2 theta_lambda."""
    _check_theta_lambda(theta_lam)
    return 2.0 * theta_lam


def cptp_bound_separate(theta_lam: float, layers: int) -> float:
    """CPTP per-layer bound 2 [1 - (1 - 2 theta_lambda)^(L/2)]; capped at 2."""
    _check_theta_lambda(theta_lam)
    if layers < 1:
        raise ValueError(f"layer count must be >= 1, got {layers}")
    if theta_lam >= 0.5:
        raise ValueError(
            f"separate CPTP bound needs theta_lambda < 1/2, got {theta_lam}"
        )
    return 2.0 * (1.0 - (1.0 - 2.0 * theta_lam) ** (layers / 2.0))


def mitigation_bias_bound(delta_rates: Sequence[float]) -> float:
    """Bias bound for a mitigated error with generator-rate residuals.

    All residuals nonnegative (under-mitigated, CPTP): 2 (1 - e^{-total}).
    Otherwise (over-mitigated): e^{2 neg} - 2 e^{-max(total, 0)} + 1 with
    neg the total magnitude of the negative residuals.
    """
    rates = np.asarray(delta_rates, dtype=float)
    if not np.all(np.isfinite(rates)):
        raise ValueError("residual rates must be finite")
    total = float(rates.sum())
    neg = float(-rates[rates < 0.0].sum())
    if neg == 0.0:
        return 2.0 * (1.0 - math.exp(-total))
    return math.exp(2.0 * neg) - 2.0 * math.exp(-max(total, 0.0)) + 1.0


def model_violation_layer_terms(
    nu0: float, gamma: float, r_list: Sequence[float] | None
) -> tuple[float, float | None]:
    """Both per-layer forms of the inaccurate-model bias term.

    The first uses the identity component directly: |1 - nu0| + gamma - nu0.
    The second replaces the cost with a spread statistic of the measured to
    modeled fidelity ratios r_k: |1 - nu0| + T({r_k}); None when no ratios
    are given.
    """
    form_nu0 = abs(1.0 - nu0) + gamma - nu0
    if r_list is None:
        return form_nu0, None
    r = np.asarray(r_list, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("fidelity-ratio list must be a vector with at least 2 entries")
    if abs(r[0] - 1.0) > 1e-9:
        raise ValueError(f"identity fidelity ratio must be 1, got {r[0]!r}")
    d = r.size
    inner = float(np.sum(r * (r - (r.sum() - r) / (d - 1))))
    form_t = abs(1.0 - nu0) + (d - 1) / d * math.sqrt(max(inner, 0.0))
    return form_nu0, form_t


def model_violation_bias(
    nu0_list: Sequence[float],
    gamma_list: Sequence[float],
    r_lists: Sequence[Sequence[float] | None],
) -> float:
    """Total bias bound from an inaccurate error model over L layers.

    sum_j delta_j prod_{i<j} gamma_i, taking for each layer the smaller of
    the two available delta_j forms.
    """
    if not len(nu0_list) == len(gamma_list) == len(r_lists):
        raise ValueError("per-layer lists must have equal length")
    total = 0.0
    prefix = 1.0
    for nu0, gamma, r_list in zip(nu0_list, gamma_list, r_lists):
        form_nu0, form_t = model_violation_layer_terms(nu0, gamma, r_list)
        delta_j = form_nu0 if form_t is None else min(form_nu0, form_t)
        total += delta_j * prefix
        prefix *= gamma
    return total


def canceled_error_separate(e0: PauliChannel, theta: NoiseMap, layers: int) -> PauliChannel:
    """Per-layer noisy cancellation: [Theta(E0^-1) o E0]^L."""
    if layers < 1:
        raise ValueError(f"layer count must be >= 1, got {layers}")
    single = compose(apply_noise(theta, inverse(e0)), e0)
    return compose_power(single, layers)


def canceled_error_direct(e0: PauliChannel, theta: NoiseMap, layers: int) -> PauliChannel:
    """Whole-circuit noisy cancellation: Theta(E0^-L) o E0^L."""
    if layers < 1:
        raise ValueError(f"layer count must be >= 1, got {layers}")
    accumulated = compose_power(e0, layers)
    return compose(apply_noise(theta, inverse(accumulated)), accumulated)


@dataclass(frozen=True)
class BiasReport:
    """One cancellation scenario: costs, CPTP flag, bound, per-Pauli biases."""

    method: str
    layer: int
    p_canceled: float
    p_distance: float
    cptp: bool
    bound_name: str
    bound_value: float
    biases: dict[str, float]

    def to_dict(self) -> dict:
        """Structured-text form: scalar fields plus biases keyed by label."""
        return {
            "layer": self.layer,
            "method": self.method,
            "p_canceled": self.p_canceled,
            "p_distance": self.p_distance,
            "cptp": self.cptp,
            "bound_name": self.bound_name,
            "bound_value": self.bound_value,
            "biases": dict(self.biases),
        }

    def records(self, seed: int | None = None, regime: str = "") -> list[dict]:
        """Flatten to one record per Pauli, in index order."""
        rows = []
        for label, bias in self.biases.items():
            row = {
                "method": self.method,
                "regime": regime,
                "layer": self.layer,
                "seed": seed,
                "pauli": label,
                "bias": bias,
                "p_distance": self.p_distance,
                "p_canceled": self.p_canceled,
                "cptp": self.cptp,
                "bound_name": self.bound_name,
                "bound_value": self.bound_value,
            }
            rows.append(row)
        return rows


def bias_report(
    e0: PauliChannel, theta: NoiseMap, layers: int, method: str
) -> BiasReport:
    """Evaluate one noisy-cancellation scenario.

    The bound is chosen from what the experimenter can measure: the CPTP
    form when the canceled error is CPTP (and, for the separate method, the
    gate-error probability is below 1/2), otherwise the general product
    form built from per-layer sampling costs.
    """
    if method == "separate":
        canceled = canceled_error_separate(e0, theta, layers)
    elif method == "direct":
        canceled = canceled_error_direct(e0, theta, layers)
    else:
        raise ValueError(f"unknown cancellation method {method!r}")

    t_lam = theta_lambda(theta)
    p_layer = p_pauli(inverse(e0))
    p_list = [p_layer] * layers
    cptp = is_cptp(canceled)
    if cptp and method == "direct":
        bound_name, bound_value = "cptp_direct", cptp_bound_direct(t_lam)
    elif cptp and t_lam < 0.5:
        bound_name, bound_value = "cptp_separate", cptp_bound_separate(t_lam, layers)
    elif method == "direct":
        bound_name, bound_value = "general_direct", bound_direct(t_lam, p_list)
    else:
        bound_name, bound_value = "general_separate", bound_separate(t_lam, p_list)

    biases = exact_bias(canceled)
    labels = [PauliString.from_index(e0.n, k).label() for k in range(len(biases))]
    return BiasReport(
        method=method,
        layer=layers,
        p_canceled=p_pauli(canceled),
        p_distance=implementability_distance(canceled),
        cptp=cptp,
        bound_name=bound_name,
        bound_value=bound_value,
        biases=dict(zip(labels, (float(b) for b in biases))),
    )


def _check_theta_lambda(theta_lam: float) -> None:
    if not 0.0 <= theta_lam <= 1.0:
        raise ValueError(f"gate-error probability must be in [0, 1], got {theta_lam}")


def _check_bound_inputs(theta_lam: float, p_list: Sequence[float]) -> None:
    _check_theta_lambda(theta_lam)
    if len(p_list) < 1:
        raise ValueError("need at least one per-layer cost")
    if any(p < 1.0 - 1e-9 for p in p_list):
        raise ValueError("per-layer costs must be >= 1")
