"""Bayesian bootstrap estimation of the ROC surface via placement values.

Each replicate reweights groups 1 and 3 with flat Dirichlet weights to get
placement values of the group-2 outcomes, then reweights those placement
values with two further Dirichlet vectors to produce one random surface.
Averaging the replicate surfaces gives the posterior-mean surface; the
replicate volumes form the VUS posterior.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .core import (
    InvalidArgumentError,
    ProbabilityGrid,
    RocSurfaceEstimate,
    ThreeGroupSample,
    VusPosterior,
    default_grid,
    percentile_interval,
)

__all__ = [
    "BbConfig",
    "PlacementDraw",
    "CdfBand",
    "sample_flat_dirichlet",
    "placement_draw",
    "surface_replicate",
    "bb_estimate",
    "bb_cdf_band",
    "as_seed_sequence",
]

SeedLike = Union[int, np.random.SeedSequence]

# Replicates are generated and reduced in fixed-size blocks; the block layout
# never depends on the thread count, which keeps the reduction bit-stable.
_CHUNK = 200


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """Return a fresh ``SeedSequence`` equivalent to ``seed``.

    A copy is made for ``SeedSequence`` inputs so that spawning children never
    depends on how often the caller's object has already been spawned from.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            entropy=seed.entropy, spawn_key=seed.spawn_key, pool_size=seed.pool_size
        )
    if isinstance(seed, (bool, np.bool_)) or int(seed) != seed or seed < 0:
        raise InvalidArgumentError(f"seed must be a non-negative integer, got {seed!r}")
    return np.random.SeedSequence(int(seed))


@dataclass(frozen=True)
class BbConfig:
    """Settings for :func:`bb_estimate`.

    ``b_replicates`` defaults to 2000, the simulation setting; 5000 is the
    usual choice for a single data analysis.
    """

    b_replicates: int = 2000
    grid: ProbabilityGrid = field(default_factory=default_grid)
    credibility_level: float = 0.95
    seed: SeedLike = 0

    def __post_init__(self):
        if int(self.b_replicates) != self.b_replicates or self.b_replicates < 1:
            raise InvalidArgumentError("b_replicates must be a positive integer")
        if not 0.0 < self.credibility_level < 1.0:
            raise InvalidArgumentError("credibility_level must be in (0, 1)")
        as_seed_sequence(self.seed)


class PlacementDraw(NamedTuple):
    """Bayesian-bootstrap placement values of the group-2 outcomes."""

    u1: np.ndarray
    u3: np.ndarray


class CdfBand(NamedTuple):
    z: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def sample_flat_dirichlet(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw Dirichlet(1, ..., 1) weights as normalized unit exponentials."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    e = rng.standard_exponential(int(n))
    return e / e.sum()


def _check_weights(w, n: int, name: str) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != n:
        raise InvalidArgumentError(f"{name} has length {w.shape[-1]}, expected {n}")
    return w


def _placement_indicators(sample: ThreeGroupSample):
    # below[i, j] = y1_i <= y2_j ; above[l, j] = y3_l > y2_j
    below = (sample.y1[:, None] <= sample.y2[None, :]).astype(float)
    above = (sample.y3[:, None] > sample.y2[None, :]).astype(float)
    return below, above


def placement_draw(sample: ThreeGroupSample, v1, v3) -> PlacementDraw:
    """Weighted placement values of each group-2 outcome.

    ``u1[j]`` is the ``v1``-weight of group-1 values at or below ``y2[j]``;
    ``u3[j]`` is the ``v3``-weight of group-3 values strictly above it.
    """
    n1, _, n3 = sample.sizes
    v1 = _check_weights(v1, n1, "v1")
    v3 = _check_weights(v3, n3, "v3")
    below, above = _placement_indicators(sample)
    return PlacementDraw(v1 @ below, v3 @ above)


def _weighted_cdf(w, u, p):
    # Batched sum_j w[b, j] * I(u[b, j] <= p_k).
    return np.einsum("bj,bjk->bk", w, (u[:, :, None] <= p[None, None, :]).astype(float))


def _surfaces(u1, u3, w1, w3, grid: ProbabilityGrid) -> np.ndarray:
    cdf1 = _weighted_cdf(w1, u1, grid.p1_points)
    # Survival as a complement: exactly 1 when no u3 is at or below p3, even
    # though the Dirichlet weights themselves sum to 1 only up to rounding.
    surv3 = 1.0 - _weighted_cdf(w3, u3, grid.p3_points)
    return np.clip(surv3[:, None, :] - cdf1[:, :, None], 0.0, 1.0)


def surface_replicate(draw: PlacementDraw, w1, w3, grid: ProbabilityGrid) -> np.ndarray:
    """One random ROC surface from placement values and group-2 weights.

    Entry ``(i, j)`` is the ``w3``-weighted survival of ``u3`` at ``p3_j``
    minus the ``w1``-weighted CDF of ``u1`` at ``p1_i``, floored at zero.
    """
    u1 = np.asarray(draw.u1, dtype=float)
    u3 = np.asarray(draw.u3, dtype=float)
    if u1.shape != u3.shape or u1.ndim != 1:
        raise InvalidArgumentError("u1 and u3 must be 1-D and of equal length")
    n2 = u1.size
    w1 = _check_weights(w1, n2, "w1")
    w3 = _check_weights(w3, n2, "w3")
    return _surfaces(u1[None], u3[None], w1[None], w3[None], grid)[0]


def _run_chunk(sample, below, above, grid, seeds, keep):
    n1, n2, n3 = sample.sizes
    v1 = np.empty((len(seeds), n1))
    v3 = np.empty((len(seeds), n3))
    w1 = np.empty((len(seeds), n2))
    w3 = np.empty((len(seeds), n2))
    for k, s in enumerate(seeds):
        rng = np.random.Generator(np.random.PCG64(s))
        # Draw order: group 3, group 1, then the two group-2 vectors.
        v3[k] = sample_flat_dirichlet(n3, rng)
        v1[k] = sample_flat_dirichlet(n1, rng)
        w3[k] = sample_flat_dirichlet(n2, rng)
        w1[k] = sample_flat_dirichlet(n2, rng)
    surf = _surfaces(v1 @ below, v3 @ above, w1, w3, grid)
    vus = surf.mean(axis=(1, 2))
    return surf.sum(axis=0), vus, (surf if keep else None)


def bb_estimate(
    sample: ThreeGroupSample,
    config: Optional[BbConfig] = None,
    *,
    threads: int = 1,
    keep_draws: bool = False,
) -> tuple[RocSurfaceEstimate, VusPosterior]:
    """Posterior-mean ROC surface and VUS posterior by the Bayesian bootstrap.

    Replicate ``b`` uses its own random substream spawned from
    ``config.seed``, so output is identical for any ``threads`` value.

    Parameters
    ----------
    sample : ThreeGroupSample
    config : BbConfig, optional
    threads : int, default=1
        Worker threads used across replicate blocks.
    keep_draws : bool, default=False
        Retain every replicate surface (memory ~ B * grid_size * 8 bytes).

    Returns
    -------
    surface : RocSurfaceEstimate
    posterior : VusPosterior
    """
    config = config or BbConfig()
    if not isinstance(sample, ThreeGroupSample):
        raise InvalidArgumentError("sample must be a ThreeGroupSample")
    grid = config.grid
    B = int(config.b_replicates)
    seeds = as_seed_sequence(config.seed).spawn(B)
    below, above = _placement_indicators(sample)
    blocks = [seeds[i : i + _CHUNK] for i in range(0, B, _CHUNK)]

    def work(block):
        return _run_chunk(sample, below, above, grid, block, keep_draws)

    if threads is None or threads <= 1 or len(blocks) == 1:
        results = [work(block) for block in blocks]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(work, blocks))

    total = np.zeros(grid.shape)
    for block_sum, _, _ in results:
        total += block_sum
    vus = np.concatenate([r[1] for r in results])
    draws = np.concatenate([r[2] for r in results]) if keep_draws else None
    surface = RocSurfaceEstimate(grid, np.clip(total / B, 0.0, 1.0), draws)
    posterior = VusPosterior(
        draws=vus,
        mean=float(vus.mean()),
        interval=percentile_interval(vus, config.credibility_level),
        level=config.credibility_level,
    )
    return surface, posterior


def bb_cdf_band(values, grid_z, b: int = 5000, level: float = 0.95, rng=None) -> CdfBand:
    """Pointwise posterior mean and credible band of a Bayesian-bootstrap CDF."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise InvalidArgumentError("values must be nonempty")
    if int(b) != b or b < 1:
        raise InvalidArgumentError("b must be a positive integer")
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError("level must be in (0, 1)")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(as_seed_sequence(0 if rng is None else rng))
    z = np.asarray(grid_z, dtype=float).ravel()
    e = rng.standard_exponential((int(b), values.size))
    weights = e / e.sum(axis=1, keepdims=True)
    cdf = np.clip(weights @ (values[:, None] <= z[None, :]).astype(float), 0.0, 1.0)
    # The normalized weights may sum to 1 - eps; pin the exact tails.
    cdf[:, z >= values.max()] = 1.0
    cdf[:, z < values.min()] = 0.0
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(cdf, [alpha, 1.0 - alpha], axis=0)
    return CdfBand(z, cdf.mean(axis=0), lower, upper)
