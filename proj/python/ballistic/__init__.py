"""Ball Divergence and Ball Covariance permutation tests."""

import numpy as np

from ._ballistic import (
    BallisticError,
    bcor,
    bcov_statistic,
    count_leq_after_self,
    euclidean_distances,
    great_circle_distances,
    validate_distances,
)
from . import _ballistic

__all__ = [
    "BallisticError",
    "bcor",
    "bcov_statistic",
    "bcov_test",
    "bd_statistic",
    "bd_test",
    "count_leq_after_self",
    "euclidean_distances",
    "great_circle_distances",
    "validate_distances",
]


def _as_distances(x, distance, metric="euclidean"):
    if distance:
        return np.asarray(x, dtype=float)
    if metric == "euclidean":
        return euclidean_distances(x)
    if metric == "geodesic":
        return great_circle_distances(x)
    raise ValueError(f"unknown metric {metric!r}")


def bd_statistic(x, sizes, distance=False, metric="euclidean"):
    """Sum, summax and max K-sample Ball Divergence of the pooled sample ``x``."""
    return _ballistic.bd_statistic(_as_distances(x, distance, metric), list(sizes))


def bd_test(x, sizes, permutations=99, kbd_type="sum", seed=1, threads=0, distance=False, metric="euclidean"):
    """K-sample Ball Divergence permutation test; rows of ``x`` are grouped in order by ``sizes``."""
    return _ballistic.bd_test(_as_distances(x, distance, metric), list(sizes), permutations, kbd_type, seed, threads)


def bcov_test(variables, permutations=99, weight="constant", seed=1, threads=0, distance=False):
    """Ball Covariance test of (mutual) independence of two or more variables."""
    dists = [_as_distances(v, distance) for v in variables]
    return _ballistic.bcov_test(dists, permutations, weight, seed, threads)
