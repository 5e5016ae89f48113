"""Experiment configuration and its TOML file format.

Sections: [family] (names + per-family overrides), [domain], [sweep],
[train], [rp].  Every key is optional; defaults reproduce the standard
benchmark setup.  OSCINT_WORKERS in the environment overrides the worker
count for sweep cells.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .dataset import DEFAULT_TRUTH_FLOOR_REL
from .integrands import IntegrandFamily
from .mlp import FlopMode, TrainConfig
from .rayleigh_plesset import RpConfig

__all__ = ["ExperimentConfig", "load_config", "worker_count"]

ALL_FAMILIES = tuple(IntegrandFamily)
DEFAULT_N_Q_SWEEP = tuple(2**p for p in range(14))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep, search or benchmark run needs.

    The grid fields mirror the standard hyperparameter search space:
    hidden layers {1..5}, neurons {1..7}, sample counts {1e2, 1e3, 1e4},
    learning rates {1e-5, 1e-4, 1e-3}, holdout fractions {0.1, 0.15, 0.2}.
    """

    families: Tuple[IntegrandFamily, ...] = ALL_FAMILIES
    domain: Tuple[float, float] = (0.0, 1.0)
    family_domains: Dict[IntegrandFamily, Tuple[float, float]] = field(default_factory=dict)
    param_overrides: Dict[IntegrandFamily, Tuple[Tuple[float, float], ...]] = field(
        default_factory=dict
    )

    n_q_sweep: Tuple[int, ...] = DEFAULT_N_Q_SWEEP
    # classical rules are cheap to sweep; their range is independent of the
    # network's input cap so budget extraction never starves the comparison
    quad_n_q_sweep: Tuple[int, ...] = DEFAULT_N_Q_SWEEP
    hidden_grid: Tuple[int, ...] = (1, 2, 3, 4, 5)
    neuron_grid: Tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)
    sample_grid: Tuple[int, ...] = (100, 1000, 10000)
    learning_rate_grid: Tuple[float, ...] = (1e-5, 1e-4, 1e-3)
    holdout_grid: Tuple[float, ...] = (0.1, 0.15, 0.2)

    arch_hidden: int = 3
    arch_neurons: int = 5
    samples: int = 10_000
    rp_samples: int = 1_000
    search_n_in: int = 16
    # tiny ReLU nets fall into dead-unit optima for some inits; each sweep
    # cell trains this many seeds and keeps the best validation NMSE
    restarts: int = 3
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    target_nmse: float = 1e-3
    truth_floor_rel: float = DEFAULT_TRUTH_FLOOR_REL
    flop_mode: FlopMode = FlopMode.EXACT
    train: TrainConfig = field(default_factory=TrainConfig)
    rp: RpConfig = field(default_factory=RpConfig)
    seed: int = 0
    out_dir: str = "."

    def domain_for(self, family: IntegrandFamily) -> Tuple[float, float]:
        return self.family_domains.get(family, self.domain)

    def samples_for(self, family: IntegrandFamily) -> int:
        if family is IntegrandFamily.RAYLEIGH_PLESSET:
            return min(self.samples, self.rp_samples)
        return self.samples

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)


def _pair(value, key) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValueError(f"{key} must be a two-element list, got {value!r}")
    lo, hi = float(value[0]), float(value[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"{key} needs lo < hi, got {value!r}")
    return lo, hi


def _family(name: str) -> IntegrandFamily:
    try:
        return IntegrandFamily(str(name))
    except ValueError:
        valid = ", ".join(f.value for f in IntegrandFamily)
        raise ValueError(f"unknown family {name!r} (valid: {valid})") from None


def load_config(path: Optional[str] = None, seed: Optional[int] = None,
                out_dir: Optional[str] = None) -> ExperimentConfig:
    """Config from a TOML file plus command-line seed/out overrides."""
    cfg = ExperimentConfig()
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        cfg = _apply(cfg, raw)
    if seed is not None:
        cfg = cfg.replace(seed=int(seed))
    if out_dir is not None:
        cfg = cfg.replace(out_dir=str(out_dir))
    return cfg


def _apply(cfg: ExperimentConfig, raw: dict) -> ExperimentConfig:
    fam = raw.get("family", {})
    if "names" in fam:
        cfg = cfg.replace(families=tuple(_family(n) for n in fam["names"]))
    family_domains = dict(cfg.family_domains)
    param_overrides = dict(cfg.param_overrides)
    for key, table in fam.items():
        if key == "names":
            continue
        family = _family(key)
        if not isinstance(table, dict):
            raise ValueError(f"[family.{key}] must be a table")
        if "domain" in table:
            family_domains[family] = _pair(table["domain"], f"family.{key}.domain")
        params = [v for k, v in sorted(table.items()) if k.startswith("param_")]
        if params:
            param_overrides[family] = tuple(
                _pair(p, f"family.{key}.param") for p in params
            )
    cfg = cfg.replace(family_domains=family_domains, param_overrides=param_overrides)

    dom = raw.get("domain", {})
    if dom:
        s1 = float(dom.get("s1", cfg.domain[0]))
        s2 = float(dom.get("s2", cfg.domain[1]))
        cfg = cfg.replace(domain=_pair((s1, s2), "domain"))

    sweep = raw.get("sweep", {})
    scalar_keys = {
        "samples": int, "rp_samples": int, "arch_hidden": int, "arch_neurons": int,
        "search_n_in": int, "restarts": int, "target_nmse": float,
        "truth_floor_rel": float, "seed": int, "out_dir": str,
    }
    updates = {}
    for key, cast in scalar_keys.items():
        if key in sweep:
            updates[key] = cast(sweep[key])
    if "n_q" in sweep:
        updates["n_q_sweep"] = tuple(int(v) for v in sweep["n_q"])
    if "quad_n_q" in sweep:
        updates["quad_n_q_sweep"] = tuple(int(v) for v in sweep["quad_n_q"])
    if "hidden" in sweep:
        updates["hidden_grid"] = tuple(int(v) for v in sweep["hidden"])
    if "neurons" in sweep:
        updates["neuron_grid"] = tuple(int(v) for v in sweep["neurons"])
    if "split" in sweep:
        ratios = tuple(float(v) for v in sweep["split"])
        if len(ratios) != 3:
            raise ValueError(f"sweep.split needs three ratios, got {sweep['split']!r}")
        updates["split_ratios"] = ratios
    if "flop_mode" in sweep:
        updates["flop_mode"] = FlopMode(str(sweep["flop_mode"]))
    if updates:
        cfg = cfg.replace(**updates)

    tr = raw.get("train", {})
    if tr:
        train_kwargs = {}
        for key in ("learning_rate", "stagnation_rel_tol"):
            if key in tr:
                train_kwargs[key] = float(tr[key])
        for key in ("batch_size", "max_epochs", "stagnation_window", "seed"):
            if key in tr:
                train_kwargs[key] = int(tr[key])
        cfg = cfg.replace(train=dataclasses.replace(cfg.train, **train_kwargs))

    rp = raw.get("rp", {})
    if rp:
        mapping = {
            "rho": "rho", "r0": "R0", "horizon_s": "T", "rtol": "rtol", "atol": "atol",
            "drive_amplitude_pa": "drive_amplitude", "delta_p_pa": "delta_p",
            "sigma": "surface_tension", "mu": "viscosity", "polytropic_k": "polytropic_k",
        }
        rp_kwargs = {}
        for key, attr in mapping.items():
            if key in rp:
                rp_kwargs[attr] = float(rp[key])
        if "drive_freq_hz" in rp:
            rp_kwargs["drive_angular_frequency"] = 2.0 * math.pi * float(rp["drive_freq_hz"])
        unknown = set(rp) - set(mapping) - {"drive_freq_hz"}
        if unknown:
            raise ValueError(f"unknown [rp] keys: {sorted(unknown)}")
        cfg = cfg.replace(rp=dataclasses.replace(cfg.rp, **rp_kwargs))
    return cfg


def worker_count(default: int = 1) -> int:
    """Sweep-cell parallelism; OSCINT_WORKERS environment variable wins."""
    raw = os.environ.get("OSCINT_WORKERS")
    if raw is None:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"OSCINT_WORKERS must be an integer, got {raw!r}") from None
    return max(1, n)
