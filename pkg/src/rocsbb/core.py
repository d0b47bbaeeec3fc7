"""Shared containers and grid arithmetic for three-class ROC surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "InvalidArgumentError",
    "DegenerateInputError",
    "ThreeGroupSample",
    "ProbabilityGrid",
    "RocSurfaceEstimate",
    "VusPosterior",
    "default_grid",
    "vus_from_surface",
    "emse",
    "percentile_interval",
]


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(ValueError):
    """The data cannot support the requested estimate (zero spread, etc.)."""


def _as_group(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidArgumentError(f"group {name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"group {name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ThreeGroupSample:
    """Continuous test outcomes for the three ordered diagnostic groups.

    Group 1 is expected to have the lowest outcomes and group 3 the highest.
    """

    y1: np.ndarray
    y2: np.ndarray
    y3: np.ndarray

    def __post_init__(self):
        for name in ("y1", "y2", "y3"):
            object.__setattr__(self, name, _as_group(getattr(self, name), name))

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.y1.size, self.y2.size, self.y3.size)

    @property
    def groups(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.y1, self.y2, self.y3)

    def map(self, func) -> "ThreeGroupSample":
        """Apply ``func`` to every group and return a new sample."""
        return ThreeGroupSample(func(self.y1), func(self.y2), func(self.y3))


def _as_axis(points, name: str) -> np.ndarray:
    arr = np.array(points, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidArgumentError(f"{name} is empty")
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must lie in [0, 1]")
    if np.any(np.diff(arr) <= 0):
        raise InvalidArgumentError(f"{name} must be strictly increasing")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProbabilityGrid:
    """Evaluation lattice: ``p1_points`` index rows, ``p3_points`` columns."""

    p1_points: np.ndarray
    p3_points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p1_points", _as_axis(self.p1_points, "p1_points"))
        object.__setattr__(self, "p3_points", _as_axis(self.p3_points, "p3_points"))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p1_points.size, self.p3_points.size)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityGrid):
            return NotImplemented
        return np.array_equal(self.p1_points, other.p1_points) and np.array_equal(
            self.p3_points, other.p3_points
        )

    def __hash__(self):
        return hash((self.p1_points.tobytes(), self.p3_points.tobytes()))


def default_grid(n_points: int = 50, lower: float = 0.0001, upper: float = 0.9999) -> ProbabilityGrid:
    """Equidistant grid shared by both axes.

    The endpoints stay a hair inside ``[0, 1]`` by default so that generalized
    inverses are never evaluated at exactly 0 or 1.

    Examples
    --------
    >>> default_grid(3).p1_points.tolist()
    [0.0001, 0.5, 0.9999]
    """
    if int(n_points) != n_points or n_points < 2:
        raise InvalidArgumentError(f"n_points must be an integer >= 2, got {n_points!r}")
    if not 0.0 <= lower < upper <= 1.0:
        raise InvalidArgumentError("grid bounds must satisfy 0 <= lower < upper <= 1")
    points = np.linspace(lower, upper, int(n_points))
    return ProbabilityGrid(points, points)


@dataclass(frozen=True)
class RocSurfaceEstimate:
    """A surface on ``grid``; ``values[i, j]`` is ROCS(p1_i, p3_j)."""

    grid: ProbabilityGrid
    values: np.ndarray
    draws: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise InvalidArgumentError(
                f"surface shape {values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise InvalidArgumentError("surface values must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.draws is not None:
            draws = np.asarray(self.draws, dtype=float)
            if draws.shape[1:] != self.grid.shape:
                raise InvalidArgumentError("draws must be stacked matrices of the grid shape")
            object.__setattr__(self, "draws", draws)

    @property
    def vus(self) -> float:
        return vus_from_surface(self.values, self.grid)


@dataclass(frozen=True)
class VusPosterior:
    """Posterior VUS draws with their mean and equal-tailed interval."""

    draws: np.ndarray
    mean: float
    interval: tuple[float, float]
    level: float = 0.95

    @classmethod
    def from_draws(cls, draws, level: float = 0.95) -> "VusPosterior":
        draws = np.asarray(draws, dtype=float)
        return cls(draws, float(np.mean(draws)), percentile_interval(draws, level), level)


def _check_matrix(matrix, grid: Optional[ProbabilityGrid], name: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty 2-D matrix")
    if grid is not None and arr.shape != grid.shape:
        raise InvalidArgumentError(f"{name} shape {arr.shape} does not match grid {grid.shape}")
    return arr


def vus_from_surface(surface, grid: Optional[ProbabilityGrid] = None) -> float:
    """Volume under a gridded surface, taken as the flat average of its entries."""
    arr = _check_matrix(surface, grid, "surface")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InvalidArgumentError("surface entries must lie in [0, 1]")
    return float(arr.mean())


def emse(estimate, truth) -> float:
    """Grid-averaged squared difference between two surfaces."""
    a = _check_matrix(estimate, None, "estimate")
    b = _check_matrix(truth, None, "truth")
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def percentile_interval(values: Sequence[float], level: float) -> tuple[float, float]:
    """Equal-tailed interval using linear interpolation between order statistics."""
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f"level must be in (0, 1), got {level!r}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("cannot form an interval from no values")
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(values, [alpha, 1.0 - alpha], method="linear")
    return (float(lo), float(hi))
