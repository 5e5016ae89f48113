"""Dataset generation: function values at fixed abscissae paired with a
surrogate-truth integral.

Inputs are the integrand sampled at the ``n_in`` midpoint-convention nodes
``x_i = s1 + (i - 1/2) * (s2 - s1) / n_in``; the target is the trapezoid
integral on 2^13 panels of the same domain, computed through the quadrature
module so that datasets and quadrature baselines agree bit for bit.

Each sample owns a counter-derived random stream, so a dataset is fully
determined by (family, m, n_in, domain, seed) and the parameter draws do
not depend on n_in.  Parameter sets whose integral nearly cancels are
redrawn: squared-relative-error metrics divide by the truth, and truths
below ``truth_floor_rel * (s2 - s1) * family_scale`` would dominate every
comparison with noise.  The redraw count is kept on the dataset.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Tuple

import numpy as np

from .errors import EmptySplit, MalformedFile, SchemaMismatch, TruthNotConverged
from .integrands import (
    PARAM_SPACES,
    IntegrandFamily,
    eval_family,
    family_scale,
    sample_params,
)
from .quadrature import QuadratureRule, integrate, make_grid
from .rayleigh_plesset import RpConfig

__all__ = [
    "TRUTH_PANELS",
    "DEFAULT_TRUTH_FLOOR_REL",
    "Sample",
    "Dataset",
    "SplitDataset",
    "input_abscissae",
    "surrogate_truth",
    "truth_refinement_check",
    "build_dataset",
    "with_n_in",
    "split",
    "write_csv",
    "read_csv",
]

log = logging.getLogger(__name__)

TRUTH_PANELS = 2**13
# Truths below this fraction of (s2-s1)*max|f| are redrawn: squared-relative
# metrics put ~(abs_err/truth)^2 weight on each sample, and integrals that
# nearly cancel turn the mean into a lottery for every method at once.
DEFAULT_TRUTH_FLOOR_REL = 3e-3
_MAX_REDRAWS = 200


@dataclass(frozen=True)
class Sample:
    params: np.ndarray
    inputs: np.ndarray
    truth: float


@dataclass
class Dataset:
    family: IntegrandFamily
    domain: Tuple[float, float]
    n_in: int
    seed: int
    params: np.ndarray          # (m, n_params)
    inputs: np.ndarray          # (m, n_in)
    truths: np.ndarray          # (m,)
    resample_count: int = field(default=0, compare=False)
    # set when the draws came from a non-standard parameter box
    param_box: Tuple[Tuple[float, float], ...] | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return self.truths.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.family is other.family
            and self.domain == other.domain
            and self.n_in == other.n_in
            and self.seed == other.seed
            and np.array_equal(self.params, other.params)
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.truths, other.truths)
        )

    @property
    def samples(self) -> Iterator[Sample]:
        for i in range(len(self)):
            yield Sample(self.params[i], self.inputs[i], float(self.truths[i]))


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    val: Dataset
    test: Dataset


def input_abscissae(n_in: int, domain: Tuple[float, float]) -> np.ndarray:
    """The n_in fixed midpoint-convention nodes shared by every sample."""
    s1, s2 = domain
    return s1 + (np.arange(int(n_in)) + 0.5) * ((s2 - s1) / int(n_in))


def _trap_truth(family, params, domain, n_q, rp_config, strict=True):
    grid = make_grid(QuadratureRule.TRAPEZOID, domain[0], domain[1], n_q)
    values = eval_family(
        family, params, grid.abscissae, domain=domain, rp_config=rp_config, strict=strict
    )
    return integrate(QuadratureRule.TRAPEZOID, values, grid.dx)


def surrogate_truth(
    family: IntegrandFamily,
    params,
    domain: Tuple[float, float],
    rp_config: RpConfig | None = None,
    strict: bool = True,
) -> float:
    """Reference integral: trapezoid rule on exactly 2^13 panels."""
    return _trap_truth(family, params, domain, TRUTH_PANELS, rp_config, strict=strict)


def truth_refinement_check(
    family: IntegrandFamily,
    params,
    domain: Tuple[float, float],
    rp_config: RpConfig | None = None,
    rel_tol: float = 1e-6,
) -> Tuple[float, float, float]:
    """Surrogate truth at 2^12, 2^13 and 2^14 panels.

    Raises TruthNotConverged when the 2^13 -> 2^14 drift exceeds ``rel_tol``
    relative, which signals that 2^13 panels cannot serve as truth for these
    parameters on this domain.
    """
    i12, i13, i14 = (
        _trap_truth(family, params, domain, n, rp_config)
        for n in (TRUTH_PANELS // 2, TRUTH_PANELS, TRUTH_PANELS * 2)
    )
    drift = abs(i13 - i14) / max(abs(i14), 1e-300)
    if drift > rel_tol:
        raise TruthNotConverged(
            f"{family.value} at params={np.asarray(params).tolist()}: "
            f"2^13->2^14 drift {drift:.3e} exceeds {rel_tol:.1e}"
        )
    return i12, i13, i14


def _sample_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _draw_params(family, rng, param_box):
    if param_box is None:
        return sample_params(family, rng)
    return np.array([rng.uniform(lo, hi) for lo, hi in param_box])


def build_dataset(
    family: IntegrandFamily,
    m: int,
    n_in: int,
    domain: Tuple[float, float],
    seed: int,
    rp_config: RpConfig | None = None,
    truth_floor_rel: float = DEFAULT_TRUTH_FLOOR_REL,
    param_box: Tuple[Tuple[float, float], ...] | None = None,
) -> Dataset:
    """Draw ``m`` parameter sets, evaluate inputs and surrogate truths.

    ``param_box`` replaces the family's standard parameter ranges (used by
    oscillatoriness sweeps and per-family config overrides); bound checks
    are skipped for such datasets.
    """
    m = int(m)
    n_in = int(n_in)
    if m < 1 or n_in < 1:
        raise ValueError(f"need m >= 1 and n_in >= 1, got m={m}, n_in={n_in}")
    s1, s2 = domain
    strict = param_box is None
    floor = truth_floor_rel * (s2 - s1) * family_scale(family, domain)
    streams = [_sample_stream(seed, i) for i in range(m)]
    params = np.array([_draw_params(family, g, param_box) for g in streams])
    truths = np.empty(m)
    pending = np.arange(m)
    resamples = 0
    for round_no in range(_MAX_REDRAWS):
        for i in pending:
            truths[i] = surrogate_truth(family, params[i], domain, rp_config, strict=strict)
        bad = pending[np.abs(truths[pending]) < floor]
        if bad.size == 0:
            break
        if round_no == _MAX_REDRAWS - 1:
            raise RuntimeError(
                f"{family.value}: could not draw params with |truth| >= {floor:.3e} "
                f"after {_MAX_REDRAWS} rounds"
            )
        for i in bad:
            params[i] = _draw_params(family, streams[i], param_box)
        resamples += bad.size
        pending = bad
    if resamples:
        log.debug("%s: resampled %d near-cancelling parameter draws", family.value, resamples)
    if not np.all(np.isfinite(truths)):
        raise ValueError(f"{family.value}: non-finite surrogate truth")

    nodes = input_abscissae(n_in, domain)
    inputs = np.empty((m, n_in))
    for i in range(m):
        inputs[i] = eval_family(
            family, params[i], nodes, domain=domain, rp_config=rp_config, strict=strict
        )
    return Dataset(
        family=family,
        domain=(float(s1), float(s2)),
        n_in=n_in,
        seed=int(seed),
        params=params,
        inputs=inputs,
        truths=truths,
        resample_count=resamples,
        param_box=param_box,
    )


def with_n_in(
    dataset: Dataset, n_in: int, rp_config: RpConfig | None = None
) -> Dataset:
    """Sibling dataset with the same draws re-evaluated at ``n_in`` nodes.

    Equal to ``build_dataset`` with the same seed and the new input count,
    but without recomputing truths.
    """
    nodes = input_abscissae(n_in, dataset.domain)
    m = len(dataset)
    strict = dataset.param_box is None
    inputs = np.empty((m, int(n_in)))
    for i in range(m):
        inputs[i] = eval_family(
            dataset.family, dataset.params[i], nodes,
            domain=dataset.domain, rp_config=rp_config, strict=strict,
        )
    return Dataset(
        family=dataset.family,
        domain=dataset.domain,
        n_in=int(n_in),
        seed=dataset.seed,
        params=dataset.params,
        inputs=inputs,
        truths=dataset.truths,
        resample_count=dataset.resample_count,
        param_box=dataset.param_box,
    )


def _take(dataset: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(
        family=dataset.family,
        domain=dataset.domain,
        n_in=dataset.n_in,
        seed=dataset.seed,
        params=dataset.params[idx],
        inputs=dataset.inputs[idx],
        truths=dataset.truths[idx],
        param_box=dataset.param_box,
    )


def split(
    dataset: Dataset, ratios: Tuple[float, float, float], seed: int
) -> SplitDataset:
    """Deterministic shuffled partition into train/val/test."""
    r = np.asarray(ratios, dtype=float)
    if r.size != 3 or np.any(r <= 0):
        raise ValueError(f"need three positive ratios, got {ratios}")
    if abs(r.sum() - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {r.sum()!r}")
    m = len(dataset)
    n_train = int(round(r[0] * m))
    n_val = int(round(r[1] * m))
    n_test = m - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise EmptySplit(f"m={m} with ratios {ratios} leaves an empty part")
    perm = np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=(0x5B117,))
    ).permutation(m)
    return SplitDataset(
        train=_take(dataset, perm[:n_train]),
        val=_take(dataset, perm[n_train : n_train + n_val]),
        test=_take(dataset, perm[n_train + n_val :]),
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(dataset: Dataset, path) -> None:
    """Serialize with enough digits that reading back is bit-exact."""
    n_params = dataset.params.shape[1]
    header = (
        [f"param_{j}" for j in range(n_params)]
        + [f"x_{j}" for j in range(dataset.n_in)]
        + ["truth"]
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# family={dataset.family.value}\n")
        fh.write(f"# s1={_fmt(dataset.domain[0])}\n")
        fh.write(f"# s2={_fmt(dataset.domain[1])}\n")
        fh.write(f"# n_in={dataset.n_in}\n")
        fh.write(f"# seed={dataset.seed}\n")
        fh.write(",".join(header) + "\n")
        for i in range(len(dataset)):
            row = (
                [_fmt(v) for v in dataset.params[i]]
                + [_fmt(v) for v in dataset.inputs[i]]
                + [_fmt(dataset.truths[i])]
            )
            fh.write(",".join(row) + "\n")


def read_csv(path) -> Dataset:
    """Inverse of write_csv; raises MalformedFile/SchemaMismatch on bad input."""
    meta = {}
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if "=" not in line:
                    raise MalformedFile("comment without key=value", line=lineno)
                key, _, value = line.lstrip("# ").partition("=")
                meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append((lineno, line.split(",")))
    if header is None:
        raise MalformedFile("no header row found", line=0)
    for key in ("family", "s1", "s2", "n_in", "seed"):
        if key not in meta:
            raise SchemaMismatch(f"missing '# {key}=' comment")
    try:
        family = IntegrandFamily(meta["family"])
    except ValueError:
        raise SchemaMismatch(f"unknown family {meta['family']!r}") from None
    try:
        s1, s2 = float(meta["s1"]), float(meta["s2"])
        n_in, seed = int(meta["n_in"]), int(meta["seed"])
    except ValueError as exc:
        raise SchemaMismatch(f"bad metadata: {exc}") from None

    n_params = len(PARAM_COLUMNS[family])
    expected = (
        [f"param_{j}" for j in range(n_params)]
        + [f"x_{j}" for j in range(n_in)]
        + ["truth"]
    )
    if header != expected:
        raise SchemaMismatch(
            f"header does not match {family.value} with n_in={n_in}"
        )
    if not rows:
        raise MalformedFile("no data rows", line=0)
    width = n_params + n_in + 1
    params = np.empty((len(rows), n_params))
    inputs = np.empty((len(rows), n_in))
    truths = np.empty(len(rows))
    for i, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise MalformedFile(
                f"expected {width} columns, got {len(cells)}", line=lineno
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise MalformedFile("unparseable float", line=lineno) from None
        params[i] = vals[:n_params]
        inputs[i] = vals[n_params:-1]
        truths[i] = vals[-1]
    return Dataset(
        family=family,
        domain=(s1, s2),
        n_in=n_in,
        seed=seed,
        params=params,
        inputs=inputs,
        truths=truths,
    )


# parameter column names per family, in serialization order
PARAM_COLUMNS = {
    family: tuple(name for name, _, _ in names)
    for family, names in PARAM_SPACES.items()
}
