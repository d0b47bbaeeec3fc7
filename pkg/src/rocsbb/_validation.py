"""Input validation helpers shared by the estimator classes."""

import numpy as np
from sklearn.utils import check_consistent_length, column_or_1d
from sklearn.utils.validation import check_array

from .core import InvalidArgumentError, ThreeGroupSample, default_grid


def check_outcomes(X) -> np.ndarray:
    """Accept a 1-D array or a single-column 2-D array of finite scores."""
    X = check_array(X, ensure_2d=False, dtype="numeric", ensure_all_finite=True)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise InvalidArgumentError(
                f"X must hold a single test outcome per row, got {X.shape[1]} columns"
            )
        X = X[:, 0]
    return np.asarray(X, dtype=float)


def check_three_groups(X, y=None, classes=None):
    """Split outcomes ``X`` by labels ``y`` into an ordered three-group sample.

    ``classes`` fixes the order (lowest expected outcome first); by default the
    sorted distinct labels are used and exactly three are required. A
    :class:`ThreeGroupSample` may be passed as ``X`` with ``y=None``.

    Returns
    -------
    sample : ThreeGroupSample
    classes : ndarray of shape (3,)
    """
    if isinstance(X, ThreeGroupSample):
        if y is not None:
            raise InvalidArgumentError("y must be None when X is a ThreeGroupSample")
        return X, np.array([1, 2, 3])
    if y is None:
        raise InvalidArgumentError("group labels y are required")
    X = check_outcomes(X)
    y = column_or_1d(y, warn=True)
    check_consistent_length(X, y)
    if classes is None:
        classes = np.unique(y)
        if classes.size != 3:
            raise InvalidArgumentError(f"expected 3 distinct classes, found {classes.size}")
    else:
        classes = np.asarray(classes)
        if classes.size != 3 or np.unique(classes).size != 3:
            raise InvalidArgumentError("classes must list three distinct labels")
        unknown = np.setdiff1d(np.unique(y), classes)
        if unknown.size:
            raise InvalidArgumentError(f"labels not in classes: {unknown.tolist()}")
    groups = []
    for label in classes:
        values = X[y == label]
        if values.size == 0:
            raise InvalidArgumentError(f"class {label!r} has no observations")
        groups.append(values)
    return ThreeGroupSample(*groups), classes


def check_grid_params(n_grid_points, grid_bounds):
    lower, upper = grid_bounds
    return default_grid(n_grid_points, lower, upper)


def check_level(level, name="level"):
    if not 0.0 < float(level) < 1.0:
        raise InvalidArgumentError(f"{name} must be in (0, 1), got {level!r}")
    return float(level)


def check_seed(random_state):
    """Integer seeds pass through; ``None`` draws fresh OS entropy."""
    if random_state is None:
        return np.random.SeedSequence()
    if isinstance(random_state, np.random.SeedSequence):
        return random_state
    if isinstance(random_state, (bool, np.bool_)) or not float(random_state).is_integer() or random_state < 0:
        raise InvalidArgumentError("random_state must be None or a non-negative integer")
    return int(random_state)
