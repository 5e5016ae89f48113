"""The six parametric integrand families and their parameter spaces.

Five families are closed-form; the sixth is the bubble-radius trajectory
R(t) from the Rayleigh-Plesset solver, rescaled so that any evaluation
domain [s1, s2] maps linearly onto the solve horizon [0, T].  Oscillation
strength grows with the family parameters, which is what makes the harder
families expensive for fixed-weight quadrature.
"""

from __future__ import annotations

import dataclasses
import math
import threading
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from .bessel import bessel_j0
from .errors import OutOfDomain, ParamOutOfSpace
from .rayleigh_plesset import RpConfig, RpTrajectory, rp_solve

__all__ = [
    "IntegrandFamily",
    "PARAM_SPACES",
    "param_space",
    "eval_family",
    "sample_params",
    "family_scale",
    "most_oscillatory_params",
]


class IntegrandFamily(Enum):
    BESSEL = "bessel"            # cos(k x) * J0(nu x)
    EVAN_WEBSTER_1 = "ew1"       # cos(k1 x^2) * sin(k2 x)
    RAYLEIGH_PLESSET = "rp"      # bubble radius trajectory R(t)
    EVAN_WEBSTER_2 = "ew2"       # exp(x) * sin(k cosh x)
    SINE = "sine"                # sin(k x)
    EXPONENTIAL = "exp"          # exp(k x)


# parameter name -> (low, high); all ranges sampled uniformly, high exclusive
PARAM_SPACES: Dict[IntegrandFamily, Tuple[Tuple[str, float, float], ...]] = {
    IntegrandFamily.BESSEL: (("k", 75.0, 125.0), ("nu", 125.0, 175.0)),
    IntegrandFamily.EVAN_WEBSTER_1: (("k1", 5.0, 15.0), ("k2", 25.0, 75.0)),
    IntegrandFamily.RAYLEIGH_PLESSET: (("rho", 500.0, 1000.0),),
    IntegrandFamily.EVAN_WEBSTER_2: (("k", 25.0, 75.0),),
    IntegrandFamily.SINE: (("k", 5.0, 15.0),),
    IntegrandFamily.EXPONENTIAL: (("k", 1.0, 5.0),),
}


def param_space(family: IntegrandFamily) -> Tuple[Tuple[float, float], ...]:
    """Per-parameter (low, high) bounds, in the family's parameter order."""
    return tuple((lo, hi) for _, lo, hi in PARAM_SPACES[family])


def _check_params(
    family: IntegrandFamily, params: Sequence[float], strict: bool = True
) -> Tuple[float, ...]:
    space = PARAM_SPACES[family]
    values = tuple(float(p) for p in np.atleast_1d(np.asarray(params, dtype=float)))
    if len(values) != len(space):
        raise ParamOutOfSpace(
            f"{family.value} takes {len(space)} parameter(s), got {len(values)}"
        )
    if not strict:
        return values
    for value, (name, lo, hi) in zip(values, space):
        if not (lo <= value <= hi) or (family is IntegrandFamily.RAYLEIGH_PLESSET and value >= hi):
            raise ParamOutOfSpace(
                f"{family.value}: {name}={value} outside [{lo}, {hi}"
                + (")" if family is IntegrandFamily.RAYLEIGH_PLESSET else "]")
            )
    return values


# Rayleigh-Plesset trajectories are expensive; cache one per (rho, config)
_RP_CACHE: Dict[tuple, RpTrajectory] = {}
_RP_LOCK = threading.Lock()


def _rp_trajectory(rho: float, config: RpConfig) -> RpTrajectory:
    key = (rho,) + tuple(
        getattr(config, f) for f in (
            "R0", "T", "delta_p", "surface_tension", "viscosity",
            "polytropic_k", "drive_amplitude", "drive_angular_frequency",
            "rtol", "atol",
        )
    )
    with _RP_LOCK:
        cached = _RP_CACHE.get(key)
    if cached is not None:
        return cached
    trajectory = rp_solve(dataclasses.replace(config, rho=rho))
    with _RP_LOCK:
        _RP_CACHE.setdefault(key, trajectory)
        return _RP_CACHE[key]


def clear_rp_cache() -> None:
    with _RP_LOCK:
        _RP_CACHE.clear()


def eval_family(
    family: IntegrandFamily,
    params: Sequence[float],
    x,
    domain: Tuple[float, float] = (0.0, 1.0),
    rp_config: RpConfig | None = None,
    strict: bool = True,
):
    """Integrand value(s) at ``x``; scalar in, scalar out.

    The closed-form families are total functions of x; the trajectory family
    requires x inside ``domain``, which is mapped linearly onto the solve
    horizon.  ``rp_config`` supplies every bubble parameter except rho, which
    comes from ``params``.  ``strict=False`` skips the parameter-space bound
    check, which oscillatoriness sweeps need when they push parameters past
    the standard boxes.
    """
    values = _check_params(family, params, strict=strict)
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)

    if family is IntegrandFamily.BESSEL:
        k, nu = values
        out = np.cos(k * xs) * bessel_j0(nu * xs)
    elif family is IntegrandFamily.EVAN_WEBSTER_1:
        k1, k2 = values
        out = np.cos(k1 * xs**2) * np.sin(k2 * xs)
    elif family is IntegrandFamily.EVAN_WEBSTER_2:
        (k,) = values
        out = np.exp(xs) * np.sin(k * np.cosh(xs))
    elif family is IntegrandFamily.SINE:
        (k,) = values
        out = np.sin(k * xs)
    elif family is IntegrandFamily.EXPONENTIAL:
        (k,) = values
        out = np.exp(k * xs)
    else:
        (rho,) = values
        s1, s2 = domain
        if s1 >= s2:
            raise OutOfDomain(f"invalid domain [{s1}, {s2}]")
        span = s2 - s1
        if np.any(xs < s1 - 1e-12 * span) or np.any(xs > s2 + 1e-12 * span):
            raise OutOfDomain(f"x outside [{s1}, {s2}]")
        config = rp_config if rp_config is not None else RpConfig()
        trajectory = _rp_trajectory(rho, config)
        t = (np.clip(xs, s1, s2) - s1) / span * config.T
        out = trajectory.radius_at(t)

    return float(out[0]) if scalar else out


def sample_params(family: IntegrandFamily, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the family's parameter box."""
    space = PARAM_SPACES[family]
    return np.array([rng.uniform(lo, hi) for _, lo, hi in space])


def family_scale(family: IntegrandFamily, domain: Tuple[float, float] = (0.0, 1.0)) -> float:
    """Rough magnitude of max |f| on the domain, used for truth floors."""
    s1, s2 = domain
    hi = max(abs(s1), abs(s2))
    if family is IntegrandFamily.EVAN_WEBSTER_2:
        return math.exp(max(s1, s2))
    if family is IntegrandFamily.EXPONENTIAL:
        k_hi = PARAM_SPACES[family][0][2]
        return math.exp(k_hi * hi)
    if family is IntegrandFamily.RAYLEIGH_PLESSET:
        return RpConfig().R0
    return 1.0


def most_oscillatory_params(family: IntegrandFamily) -> np.ndarray:
    """Upper corner of the parameter box (high-side exclusive for rho)."""
    if family is IntegrandFamily.RAYLEIGH_PLESSET:
        lo, hi = param_space(family)[0]
        return np.array([hi * (1.0 - 1e-9)])
    return np.array([hi for _, hi in param_space(family)])
