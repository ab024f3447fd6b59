"""Discrete measures on R^d and discretization of densities into point clouds.

A measure is a weighted atom set sum_j w_j * delta_{x_j}. Atoms are rows of
an (N, d) float array; scalar functions and densities are callables that take
such an array and return the N values at once.
"""

from __future__ import annotations

import numpy as np

from .errors import EvaluationError, ZeroMassError

# Weights below this fraction of the largest weight are float dust: they are
# snapped to zero so that support-size guarantees stay meaningful.
WEIGHT_SNAP_REL = 1e-15


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def _as_atom_array(atoms) -> np.ndarray:
    pts = np.asarray(atoms, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise ValueError(f"atoms must form an (N, d) array with d >= 1, got shape {pts.shape}")
    return pts


def evaluate_scalar_field(f, points: np.ndarray) -> np.ndarray:
    """Evaluate a vectorized scalar function on an (N, d) point array.

    Returns the (N,) float values; raises EvaluationError naming the first
    offending point if any value is non-finite or the shape is wrong.
    """
    vals = np.asarray(f(points), dtype=np.float64)
    if vals.ndim == 0:
        vals = np.full(len(points), float(vals))
    vals = vals.reshape(-1)
    if vals.shape[0] != len(points):
        raise EvaluationError(
            f"function returned {vals.shape[0]} values for {len(points)} points"
        )
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            f"function value at point index {i} ({points[i].tolist()}) is {vals[i]}"
        )
    return vals


class DiscreteMeasure:
    """Finitely many weighted atoms in R^d.

    Construction canonicalizes: weights must be finite and nonnegative, and
    any weight below ``WEIGHT_SNAP_REL`` times the largest weight is dropped
    together with its atom. Instances are immutable; the underlying arrays
    are read-only and safe to share between threads.
    """

    __slots__ = ("atoms", "weights")

    def __init__(self, atoms, weights):
        pts = _as_atom_array(atoms)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if len(pts) != len(w):
            raise ValueError(f"{len(pts)} atoms but {len(w)} weights")
        bad = ~np.isfinite(pts)
        if bad.any():
            i = int(np.flatnonzero(bad.any(axis=1))[0])
            raise ValueError(f"atom {i} has a non-finite coordinate: {pts[i].tolist()}")
        badw = ~np.isfinite(w)
        if badw.any():
            i = int(np.flatnonzero(badw)[0])
            raise ValueError(f"weight {i} is non-finite: {w[i]}")
        neg = w < 0
        if neg.any():
            i = int(np.flatnonzero(neg)[0])
            raise ValueError(f"weight {i} is negative: {w[i]}")
        if len(w):
            keep = w > WEIGHT_SNAP_REL * w.max()
            if not keep.all():
                pts, w = pts[keep], w[keep]
        self.atoms = _readonly(pts)
        self.weights = _readonly(w)

    @property
    def dimension(self) -> int:
        return self.atoms.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    def mass(self) -> float:
        return float(self.weights.sum())

    def scaled(self, factor: float) -> "DiscreteMeasure":
        """Same atoms with all weights multiplied by a positive factor."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return DiscreteMeasure(self.atoms, self.weights * factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self):
        return hash((self.atoms.tobytes(), self.weights.tobytes()))

    def __repr__(self) -> str:
        return (
            f"DiscreteMeasure({len(self)} atoms in R^{self.dimension}, "
            f"mass={self.mass():.6g})"
        )


def integrate(measure: DiscreteMeasure, f) -> float:
    """Integral of f against the measure: sum_j w_j f(x_j).

    f is evaluated once on the whole atom array; a non-finite value raises
    EvaluationError naming the offending atom.
    """
    vals = evaluate_scalar_field(f, measure.atoms)
    return float((measure.weights * vals).sum())


def _check_box(box) -> tuple[np.ndarray, np.ndarray]:
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
        raise ValueError("box bounds must be finite")
    bad = ~(lo < hi)
    if bad.any():
        a = int(np.flatnonzero(bad)[0])
        raise ValueError(f"box axis {a} has lo >= hi: [{lo[a]}, {hi[a]}]")
    return lo, hi


class GridSampler:
    """Midpoint grid on an axis-aligned box, counts[a] cells along axis a.

    Points are cell midpoints in row-major order (last axis fastest). Purely
    deterministic: the same spec always yields the bit-identical point set.
    """

    __slots__ = ("counts", "box")

    def __init__(self, counts, box):
        lo, hi = _check_box(box)
        counts = tuple(int(c) for c in np.atleast_1d(counts))
        if len(counts) == 1 and len(lo) > 1:
            counts = counts * len(lo)
        if len(counts) != len(lo):
            raise ValueError(f"{len(counts)} grid counts for a {len(lo)}-axis box")
        if any(c < 1 for c in counts):
            raise ValueError(f"grid counts must be >= 1, got {counts}")
        self.counts = counts
        self.box = tuple(zip(lo.tolist(), hi.tolist()))

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def count(self) -> int:
        return int(np.prod(self.counts))

    def cell_volume(self) -> float:
        vol = 1.0
        for (lo, hi), n in zip(self.box, self.counts):
            vol *= (hi - lo) / n
        return vol

    def points(self) -> np.ndarray:
        axes = [
            lo + (np.arange(n) + 0.5) * ((hi - lo) / n)
            for (lo, hi), n in zip(self.box, self.counts)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def describe(self) -> dict:
        return {"kind": "uniform-grid", "counts": list(self.counts), "box": [list(b) for b in self.box]}


class MonteCarloSampler:
    """Seeded i.i.d. uniform points in an axis-aligned box.

    The stream is PCG64 (numpy default_rng) drawing an (N, d) block of
    uniforms in one call, so a given (seed, count, box) always reproduces the
    same points, on any platform.
    """

    __slots__ = ("count", "seed", "box")

    def __init__(self, count, seed, box):
        lo, hi = _check_box(box)
        count = int(count)
        if count < 1:
            raise ValueError(f"sample count must be >= 1, got {count}")
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.count = count
        self.seed = seed
        self.box = tuple(zip(lo.tolist(), hi.tolist()))

    @property
    def dimension(self) -> int:
        return len(self.box)

    def volume(self) -> float:
        vol = 1.0
        for lo, hi in self.box:
            vol *= hi - lo
        return vol

    def points(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        u = rng.random((self.count, self.dimension))
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return lo + u * (hi - lo)

    def describe(self) -> dict:
        return {
            "kind": "monte-carlo",
            "count": self.count,
            "seed": self.seed,
            "prng": "pcg64",
            "box": [list(b) for b in self.box],
        }


SamplerSpec = GridSampler | MonteCarloSampler


def discretize(density, sampler: SamplerSpec) -> DiscreteMeasure:
    """Turn a nonnegative density on a box into a weighted point cloud.

    Grid sampling puts atoms at cell midpoints with weight
    density(x) * cell_volume; Monte Carlo uses uniform points with weight
    density(x) * volume / N. Deterministic for a fixed sampler spec.

    Raises ValueError on a negative density value (naming the sample) and
    ZeroMassError if the density vanishes at every sampled point.
    """
    pts = sampler.points()
    vals = evaluate_scalar_field(density, pts)
    neg = vals < 0
    if neg.any():
        i = int(np.flatnonzero(neg)[0])
        raise ValueError(
            f"density is negative at sample {i} ({pts[i].tolist()}): {vals[i]}"
        )
    if isinstance(sampler, GridSampler):
        weights = vals * sampler.cell_volume()
    else:
        weights = vals * (sampler.volume() / sampler.count)
    if not (weights > 0).any():
        raise ZeroMassError("density vanishes at every sampled point; measure has no mass")
    return DiscreteMeasure(pts, weights)
