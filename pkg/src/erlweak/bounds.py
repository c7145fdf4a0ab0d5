"""Validity margins for the first-order (weak) regime.

"Much less than" is operationalized as ratio thresholds: deep_weak < 0.01,
weak < 0.1, marginal < 1, strong >= 1. The thresholds are conventions,
validated empirically: in the `weak` band the first-order pointer shift
stays within 10% of the exact value on the sweep grids used in the tests.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

from .states import Quadrature

CLASS_THRESHOLDS = ((0.01, "deep_weak"), (0.1, "weak"), (1.0, "marginal"))


def _classify(ratio: float) -> str:
    for threshold, name in CLASS_THRESHOLDS:
        if ratio < threshold:
            return name
    return "strong"


@dataclasses.dataclass(frozen=True)
class RegimeMargin:
    lhs: float  # g^2 delta_P^2
    rhs: float  # bound; +inf when vacuous
    ratio: float
    classification: str


def _margin(lhs: float, rhs: float) -> RegimeMargin:
    ratio = 0.0 if math.isinf(rhs) else lhs / rhs
    return RegimeMargin(lhs, rhs, ratio, _classify(ratio))


def gaussian_regime_margin(
    g: float,
    delta_P: float,
    sigma: float,
    theta_A: Quadrature,
    theta_B: Quadrature,
) -> RegimeMargin:
    """Gaussian-state bound: g^2 delta_P^2 must be well below
    (4 sigma^4 cos^2(theta_B) + sin^2(theta_B)) / (4 sigma^2 sin^2(theta_A - theta_B)).

    The bound is vacuous (+inf) when the measured and postselected
    quadratures coincide.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    cb, sb = math.cos(theta_B.theta), math.sin(theta_B.theta)
    sd = math.sin(theta_A.theta - theta_B.theta)
    lhs = g**2 * delta_P**2
    if sd == 0.0:
        return _margin(lhs, math.inf)
    rhs = (4.0 * sigma**4 * cb**2 + sb**2) / (4.0 * sigma**2 * sd**2)
    return _margin(lhs, rhs)


def discrete_regime_margin(
    g: float, delta_P: float, eigenvalues: Sequence[float]
) -> RegimeMargin:
    """Discrete-spectrum bound: g^2 delta_P^2 well below 1 / max_gap^2 over
    all eigenvalue pairs. Vacuous for fewer than two distinct eigenvalues."""
    lhs = g**2 * delta_P**2
    values = [float(a) for a in eigenvalues]
    if not values:
        raise ValueError("eigenvalues must be nonempty")
    max_gap = max(values) - min(values)
    if max_gap == 0.0:
        return _margin(lhs, math.inf)
    return _margin(lhs, 1.0 / max_gap**2)
