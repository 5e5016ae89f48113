"""Accuracy and FLOP-efficiency metrics.

Normalized MSE is the mean of squared relative errors, with a tiny floor on
the denominator so near-cancelling integrals cannot produce infinities.
The efficiency figure alpha = |F_nn - F_qm| / F_nn compares the operation
count of the trained network against the cheapest classical rule that
reaches the same accuracy; alpha folds direction away, so results also
carry the ratio F_qm / F_nn ("gain") to keep the sign of the comparison
unambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from .errors import EmptyInput, LengthMismatch, TargetUnreachable
from .integrands import IntegrandFamily

__all__ = [
    "Method",
    "MethodCurve",
    "AlphaResult",
    "normalized_mse",
    "alpha",
    "flops_at_accuracy",
    "best_quadrature_flops",
    "alpha_vs_oscillatoriness",
    "OscPoint",
]


class Method(Enum):
    NEURAL_NET = "nn"
    TRAPEZOID = "trapezoid"
    MIDPOINT = "midpoint"
    SIMPSON = "simpson"


QUADRATURE_METHODS = (Method.TRAPEZOID, Method.MIDPOINT, Method.SIMPSON)


@dataclass(frozen=True)
class MethodCurve:
    """Accuracy-vs-cost points of one method, sorted by FLOPs ascending."""

    method: Method
    points: Tuple[Tuple[int, int, float], ...]  # (n_q, flops, nmse)

    def __post_init__(self):
        pts = tuple(
            (int(n), int(f), float(e)) for n, f, e in self.points
        )
        if any(e < 0 or not math.isfinite(e) for _, _, e in pts):
            raise ValueError("nmse values must be finite and >= 0")
        object.__setattr__(self, "points", tuple(sorted(pts, key=lambda p: p[1])))

    @property
    def flops(self) -> np.ndarray:
        return np.array([f for _, f, _ in self.points])

    @property
    def nmse(self) -> np.ndarray:
        return np.array([e for _, _, e in self.points])


@dataclass(frozen=True)
class AlphaResult:
    family: IntegrandFamily
    target_nmse: float
    flops_nn: int
    flops_qm: int
    alpha: float
    gain: float  # flops_qm / flops_nn; > 1 means the network is cheaper

    @staticmethod
    def build(family, target_nmse, flops_nn, flops_qm) -> "AlphaResult":
        return AlphaResult(
            family=family,
            target_nmse=float(target_nmse),
            flops_nn=int(flops_nn),
            flops_qm=int(flops_qm),
            alpha=alpha(flops_nn, flops_qm),
            gain=flops_qm / flops_nn,
        )


def normalized_mse(predictions, truths) -> float:
    """Mean of (I - I_hat)^2 / I^2 with a floored denominator."""
    p = np.asarray(predictions, dtype=float).ravel()
    t = np.asarray(truths, dtype=float).ravel()
    if p.size != t.size:
        raise LengthMismatch(f"{p.size} predictions vs {t.size} truths")
    if p.size == 0:
        raise EmptyInput("need at least one prediction")
    floor = 1e-12 * (1.0 + np.abs(t))
    denom = np.maximum(t * t, floor * floor)
    return float(np.mean((t - p) ** 2 / denom))


def alpha(flops_nn: int, flops_qm: int) -> float:
    """Normalized FLOP-gain ratio |F_nn - F_qm| / F_nn."""
    flops_nn = int(flops_nn)
    if flops_nn < 1:
        raise ValueError(f"need flops_nn >= 1, got {flops_nn}")
    return abs(flops_nn - int(flops_qm)) / flops_nn


def flops_at_accuracy(curve: MethodCurve, target_nmse: float) -> int:
    """Smallest FLOP budget on the curve reaching nmse <= target.

    Between the bracketing sweep points the curve is interpolated linearly
    in log-log space (both axes span decades); the result rounds up.
    Raises TargetUnreachable when no swept point attains the target.
    """
    if len(curve.points) < 2:
        raise ValueError("curve needs at least two points")
    if target_nmse <= 0:
        raise TargetUnreachable(f"{curve.method.value}: nonpositive target")
    pts = curve.points
    hit = next((i for i, (_, _, e) in enumerate(pts) if e <= target_nmse), None)
    if hit is None:
        raise TargetUnreachable(
            f"{curve.method.value}: min nmse {min(e for _, _, e in pts):.3e} "
            f"never reaches {target_nmse:.3e} within the swept budget"
        )
    if hit == 0:
        return pts[0][1]
    _, f_lo, e_lo = pts[hit - 1]
    _, f_hi, e_hi = pts[hit]
    e_lo = max(e_lo, 1e-300)
    e_hi = max(e_hi, 1e-300)
    if e_lo <= e_hi or f_lo == f_hi:
        return f_hi
    frac = (math.log(e_lo) - math.log(target_nmse)) / (math.log(e_lo) - math.log(e_hi))
    frac = min(max(frac, 0.0), 1.0)
    f_star = math.exp(math.log(f_lo) + frac * (math.log(f_hi) - math.log(f_lo)))
    return min(int(math.ceil(f_star)), f_hi)


def best_quadrature_flops(
    curves: Sequence[MethodCurve], target_nmse: float
) -> Tuple[int, Method]:
    """Cheapest budget among the classical rules reaching the target."""
    best: Tuple[int, Method] | None = None
    errors = []
    for curve in curves:
        try:
            flops = flops_at_accuracy(curve, target_nmse)
        except TargetUnreachable as exc:
            errors.append(str(exc))
            continue
        if best is None or flops < best[0]:
            best = (flops, curve.method)
    if best is None:
        raise TargetUnreachable("; ".join(errors))
    return best


@dataclass(frozen=True)
class OscPoint:
    """One oscillatoriness level: parameter value and its alpha (if reachable)."""

    parameter: float
    alpha: float | None
    flops_nn: int | None
    flops_qm: int | None
    note: str = ""

    @property
    def reachable(self) -> bool:
        return self.alpha is not None


def alpha_vs_oscillatoriness(
    family: IntegrandFamily,
    parameter_grid: Sequence[float],
    target_nmse: float,
    config=None,
    seed: int = 0,
) -> List[OscPoint]:
    """Alpha at each oscillatoriness level of a one-parameter family.

    Each grid value defines a parameter band of the family's original width
    centered on it; a fresh model is trained per band and compared against
    the best classical rule on the same test samples.  Unreachable cells are
    flagged rather than aborting the sweep.  Training configuration comes
    from ``config`` (an ``oscint.harness.ExperimentConfig``); the import is
    deferred because the harness builds on these metrics.
    """
    from .harness import ExperimentConfig, oscillatoriness_cell

    cfg = config if config is not None else ExperimentConfig()
    points = []
    for value in parameter_grid:
        points.append(oscillatoriness_cell(family, float(value), target_nmse, cfg, seed))
    return points
