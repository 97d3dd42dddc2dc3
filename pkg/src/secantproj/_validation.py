"""Argument checks used across the package."""

import numbers
import os

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidArgumentError

DEFAULT_MEMORY_BUDGET = 8 * 1024**3
MEMORY_BUDGET_ENV = "SECANTPROJ_MEMORY_BUDGET"


def check_int(value, name, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise InvalidArgumentError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_real(value, name, minimum=None, maximum=None, strict_minimum=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise InvalidArgumentError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value}")
    if minimum is not None:
        if strict_minimum and value <= minimum:
            raise InvalidArgumentError(f"{name} must be > {minimum}, got {value}")
        if not strict_minimum and value < minimum:
            raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise InvalidArgumentError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_points(X, min_samples=1):
    """Return ``X`` as a finite float64 (k, n) array or raise."""
    try:
        return check_array(
            X, dtype=np.float64, ensure_min_samples=min_samples, copy=False
        )
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from exc


def resolve_workers(n_jobs):
    """Map ``None``/``-1`` to the CPU count; anything else must be >= 1."""
    if n_jobs is None or n_jobs == -1:
        return os.cpu_count() or 1
    return check_int(n_jobs, "n_jobs", minimum=1)


def resolve_memory_budget(budget):
    """Explicit value, then the environment override, then 8 GiB."""
    if budget is None:
        env = os.environ.get(MEMORY_BUDGET_ENV)
        if env:
            try:
                budget = int(float(env))
            except ValueError as exc:
                raise InvalidArgumentError(
                    f"{MEMORY_BUDGET_ENV}={env!r} is not a byte count"
                ) from exc
        else:
            budget = DEFAULT_MEMORY_BUDGET
    return check_int(budget, "memory_budget", minimum=1)
