"""Support reduction of discrete measures by null-space recombination.

Given an N-atom measure and an m-element function basis, the reducer returns
a measure on at most m of the original atoms whose basis moments match the
input's. It works on a sliding set of at most m+1 active atoms: the m x (m+1)
evaluation submatrix always has a null vector z, and moving the weights along
z until the first one hits zero preserves every moment while shrinking the
support. Zeroed atoms leave the set, unseen atoms stream in, so the whole run
costs N - k factorizations of small matrices. A final sweep keeps eliminating
while the surviving submatrix is still column-rank-deficient, which pushes
the support down to the numerical rank when the basis elements are dependent
on the data.

Null vectors come from the SVD; the rank threshold for an m x k block is
max(m, k) * machine epsilon * (largest singular value).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import FunctionBasis, adjoin_constant, eval_matrix
from .errors import ReductionError, ZeroMassError
from .measures import WEIGHT_SNAP_REL, DiscreteMeasure

_EPS = float(np.finfo(np.float64).eps)
# entries of a unit null vector below this are treated as exact zeros so that
# noise-level components can never be selected as the step's pivot
_DIRECTION_SNAP = 1e-14

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ReductionReport:
    """What a reduce() run did.

    basis_dim is the dimension actually enforced as the support bound, i.e.
    including the adjoined constant when that default was active.
    """

    initial_support: int
    final_support: int
    iterations: int
    max_relative_moment_residual: float
    rank_used: int
    basis_dim: int


def _null_direction(matrix: np.ndarray):
    """Right singular direction of least singular value, plus (s_min, s_max).

    For a matrix with more columns than rows the returned direction lies in
    the exact null space up to rounding and s_min is reported as 0.
    """
    m, k = matrix.shape
    _, s, vh = np.linalg.svd(matrix)
    z = vh[-1]
    smax = float(s[0]) if s.size else 0.0
    smin = float(s[-1]) if s.size == k else 0.0
    return z, smin, smax


def _step_weights(weights: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Move weights along a null direction until >= 1 of them hits zero.

    Orients the direction to have a positive component, steps by
    alpha = min w_j / z_j over z_j > 0, writes exact zeros at every index
    whose ratio ties the minimum within one ulp, and clamps rounding dust so
    no output weight is negative.
    """
    z = np.array(direction, dtype=np.float64)
    zmax = float(np.abs(z).max())
    if zmax == 0.0:
        raise ReductionError("null direction is identically zero")
    z[np.abs(z) < _DIRECTION_SNAP * zmax] = 0.0
    if not (z > 0).any():
        z = -z
    pos = z > 0
    if not pos.any():
        raise ReductionError("null direction has no positive component after cleaning")
    ratios = weights[pos] / z[pos]
    alpha = float(ratios.min())
    out = weights - alpha * z
    tied = ratios <= np.nextafter(alpha, np.inf)
    out[np.flatnonzero(pos)[tied]] = 0.0
    np.maximum(out, 0.0, out=out)
    return out


def elimination_step(weights, active_matrix) -> np.ndarray:
    """One recombination step on an explicit active set.

    weights must be strictly positive and active_matrix of shape (m, k) with
    k == len(weights) and numerical rank < k, so that a null vector exists.
    Returns the updated weights: entrywise >= 0, at least one exact zero, and
    active_matrix @ weights unchanged up to m * eps * ||active_matrix||.

    Raises ReductionError when no null vector exists within the rank
    tolerance (the matrix has full column rank).
    """
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    a = np.asarray(active_matrix, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"active matrix must be 2-D, got shape {a.shape}")
    m, k = a.shape
    if k != len(w):
        raise ValueError(f"{len(w)} weights for a matrix with {k} columns")
    if not (w > 0).all():
        raise ValueError("weights must be strictly positive on the active set")
    z, smin, smax = _null_direction(a)
    if k <= m and smin > max(m, k) * _EPS * smax:
        raise ReductionError(
            f"no null vector within rank tolerance: sigma_min={smin:.3e}, "
            f"sigma_max={smax:.3e}, shape=({m}, {k})"
        )
    return _step_weights(w, z)


def reduce(
    measure: DiscreteMeasure,
    basis: FunctionBasis,
    tol: float = DEFAULT_TOL,
    *,
    constant_adjoined: bool = True,
) -> tuple[DiscreteMeasure, ReductionReport]:
    """Reduce a measure to at most basis.dim atoms with the same moments.

    The output measure is supported on a subset of the input atoms (their
    coordinates are bit-identical), has strictly positive weights, and
    satisfies |int g dnu - int g dmu| <= tol * (1 + |int g dmu|) for every
    basis element g.

    By default the constant function is adjoined to bases that lack it, so
    total mass is always among the preserved moments; pass
    constant_adjoined=False to opt out. The reported basis_dim is the
    dimension actually enforced.

    Raises ZeroMassError on a massless input and ReductionError if the run
    cannot meet the tolerance.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if measure.mass() <= 0.0:
        raise ZeroMassError("cannot reduce a measure with zero mass")
    if constant_adjoined:
        basis = adjoin_constant(basis)
    mat = eval_matrix(basis, measure.atoms)
    m, n = mat.shape
    target = mat @ measure.weights

    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size and sv[0] > 0:
        rank = int(np.count_nonzero(sv > max(m, n) * _EPS * sv[0]))
    else:
        rank = 0

    w = measure.weights.copy()
    active = np.empty(m + 1, dtype=np.intp)
    size = 0
    cursor = 0
    iterations = 0
    while True:
        take = min(m + 1 - size, n - cursor)
        if take > 0:
            active[size : size + take] = np.arange(cursor, cursor + take)
            size += take
            cursor += take
        if size <= 1:
            break
        idx = active[:size]
        z, smin, smax = _null_direction(mat[:, idx])
        if size <= m and smin > max(m, size) * _EPS * smax:
            break  # active atoms are linearly independent: nothing left to remove
        stepped = _step_weights(w[idx], z)
        stepped[stepped < WEIGHT_SNAP_REL * stepped.max()] = 0.0
        w[idx] = stepped
        keep = stepped > 0
        kept = int(keep.sum())
        if kept == size:
            raise ReductionError(
                f"no weight reached zero at iteration {iterations + 1}; "
                "null direction was unusable"
            )
        active[:kept] = idx[keep]
        size = kept
        iterations += 1

    survivors = np.sort(active[:size].copy())
    reduced = DiscreteMeasure(measure.atoms[survivors], w[survivors])
    achieved = eval_matrix(basis, reduced.atoms) @ reduced.weights
    residual = float(np.max(np.abs(achieved - target) / (1.0 + np.abs(target))))
    if residual > tol:
        raise ReductionError(
            f"moment residual {residual:.3e} exceeds tolerance {tol:.1e} "
            f"after {iterations} eliminations"
        )
    report = ReductionReport(
        initial_support=n,
        final_support=len(reduced),
        iterations=iterations,
        max_relative_moment_residual=residual,
        rank_used=rank,
        basis_dim=m,
    )
    return reduced, report
