"""Finite function systems and their moments.

The workhorse is the total-degree monomial basis in graded-lexicographic
order, evaluated in per-axis affine coordinates mapped to [-1, 1] to keep the
evaluation matrix well conditioned. Arbitrary callables can also be wrapped
into a basis, optionally with the constant function adjoined in front.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EvaluationError
from .measures import DiscreteMeasure, _readonly

MONOMIAL = "monomial"
CUSTOM = "custom"
ADJOIN_CONSTANT = "adjoin-constant"


def basis_dimension(degree: int, dimension: int) -> int:
    """Number of monomials of total degree <= degree in `dimension` variables.

    Equals C(degree + dimension, dimension), computed exactly in integer
    arithmetic (no overflow for any representable input).
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    return math.comb(degree + dimension, dimension)


def _compositions_desc(total, parts):
    # all exponent tuples summing to `total`, lexicographically descending
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions_desc(total - first, parts - 1):
            yield (first,) + rest


def graded_lex_exponents(degree: int, dimension: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of total degree <= degree, graded-lex ordered.

    Degree blocks come in increasing total degree; inside a block tuples are
    lexicographically descending, so for d=2, n=2 the order is
    1, x, y, x^2, xy, y^2.
    """
    if degree < 0 or dimension < 1:
        raise ValueError(f"need degree >= 0 and dimension >= 1, got ({degree}, {dimension})")
    out = []
    for total in range(degree + 1):
        out.extend(_compositions_desc(total, dimension))
    return tuple(out)


def monomial_label(exponents) -> str:
    """Human-readable name for a monomial, e.g. (2, 1) -> 'x1^2*x2'."""
    parts = []
    for axis, e in enumerate(exponents):
        if e == 0:
            continue
        parts.append(f"x{axis + 1}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts) if parts else "1"


class FunctionBasis:
    """Ordered spanning set of a finite-dimensional function space on R^d.

    Use the factory functions `monomial_basis`, `custom_basis` and
    `adjoin_constant` instead of the constructor. Immutable.
    """

    __slots__ = ("kind", "dim", "domain_dim", "has_constant", "degree",
                 "exponents", "center", "halfwidth", "functions", "inner")

    def __init__(self, *, kind, dim, domain_dim, has_constant, degree=None,
                 exponents=None, center=None, halfwidth=None, functions=None,
                 inner=None):
        self.kind = kind
        self.dim = int(dim)
        self.domain_dim = int(domain_dim)
        self.has_constant = bool(has_constant)
        self.degree = degree
        self.exponents = exponents
        self.center = center
        self.halfwidth = halfwidth
        self.functions = functions
        self.inner = inner
        if self.dim < 1:
            raise ValueError(f"basis must have at least one element, got dim={self.dim}")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """(dim, N) matrix of basis values; entry (i, j) is element i at point j."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.shape[1] != self.domain_dim:
            raise ValueError(
                f"points have dimension {points.shape[1]}, basis domain is R^{self.domain_dim}"
            )
        n = len(points)
        if self.kind == MONOMIAL:
            if self.center is not None:
                t = (points - self.center) / self.halfwidth
            else:
                t = points
            maxdeg = self.degree
            # per-axis power tables, then one product row per multi-index
            powers = np.empty((self.domain_dim, maxdeg + 1, n))
            powers[:, 0, :] = 1.0
            for k in range(1, maxdeg + 1):
                powers[:, k, :] = powers[:, k - 1, :] * t.T
            rows = np.empty((self.dim, n))
            for i, alpha in enumerate(self.exponents):
                row = powers[0, alpha[0], :].copy()
                for axis in range(1, self.domain_dim):
                    if alpha[axis]:
                        row *= powers[axis, alpha[axis], :]
                rows[i] = row
            return rows
        if self.kind == CUSTOM:
            rows = np.empty((self.dim, n))
            for i, f in enumerate(self.functions):
                vals = np.asarray(f(points), dtype=np.float64)
                if vals.ndim == 0:
                    vals = np.full(n, float(vals))
                if vals.shape != (n,):
                    raise EvaluationError(
                        f"basis element {i} returned shape {vals.shape} for {n} points"
                    )
                rows[i] = vals
            return rows
        # adjoin-constant: a leading row of ones above the wrapped basis
        rows = np.empty((self.dim, n))
        rows[0] = 1.0
        rows[1:] = self.inner.evaluate(points)
        return rows

    def __repr__(self) -> str:
        extra = f", degree={self.degree}" if self.kind == MONOMIAL else ""
        return f"FunctionBasis({self.kind}, dim={self.dim}, domain=R^{self.domain_dim}{extra})"


def monomial_basis(degree: int, box=None, dimension: int | None = None) -> FunctionBasis:
    """Total-degree monomial basis, graded-lex ordered.

    With `box` (per-axis (lo, hi)), coordinates are affinely mapped onto
    [-1, 1] before taking powers; this is what every production path uses.
    Without a box the raw coordinates are used, which is only meant for
    small oracle checks. An axis of zero width maps to the constant 0.
    """
    if box is None:
        if dimension is None:
            raise ValueError("monomial_basis needs a box or an explicit dimension")
        d = int(dimension)
        center = halfwidth = None
    else:
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        d = len(box)
        if dimension is not None and dimension != d:
            raise ValueError(f"dimension {dimension} disagrees with a {d}-axis box")
        lo = np.array([b[0] for b in box])
        hi = np.array([b[1] for b in box])
        if (lo > hi).any():
            raise ValueError("box must have lo <= hi on every axis")
        center = _readonly((lo + hi) / 2.0)
        width = hi - lo
        halfwidth = _readonly(np.where(width > 0, width / 2.0, 1.0))
    exps = graded_lex_exponents(degree, d)
    return FunctionBasis(
        kind=MONOMIAL,
        dim=len(exps),
        domain_dim=d,
        has_constant=True,
        degree=int(degree),
        exponents=exps,
        center=center,
        halfwidth=halfwidth,
    )


def custom_basis(functions, dimension: int, has_constant: bool = False) -> FunctionBasis:
    """Basis from explicit callables; each maps an (N, d) array to N values.

    Set has_constant=True only if element 0 really is the constant one
    function; reduce() relies on the flag to decide whether to adjoin it.
    """
    functions = tuple(functions)
    if not functions:
        raise ValueError("custom basis needs at least one function")
    return FunctionBasis(
        kind=CUSTOM,
        dim=len(functions),
        domain_dim=int(dimension),
        has_constant=bool(has_constant),
        functions=functions,
    )


def adjoin_constant(basis: FunctionBasis) -> FunctionBasis:
    """Prepend the constant one function to an existing basis."""
    if basis.has_constant:
        return basis
    return FunctionBasis(
        kind=ADJOIN_CONSTANT,
        dim=basis.dim + 1,
        domain_dim=basis.domain_dim,
        has_constant=True,
        inner=basis,
    )


def eval_matrix(basis: FunctionBasis, points) -> np.ndarray:
    """Evaluation matrix with entry (i, j) = basis element i at point j.

    All entries are checked finite; a bad entry raises EvaluationError with
    its (element, point) index pair.
    """
    mat = basis.evaluate(np.asarray(points, dtype=np.float64))
    bad = ~np.isfinite(mat)
    if bad.any():
        i, j = (int(k[0]) for k in np.nonzero(bad))
        raise EvaluationError(
            f"basis element {i} is non-finite at point {j}: {mat[i, j]}"
        )
    return mat


class MomentVector:
    """Integrals of every basis element against one measure, basis-ordered."""

    __slots__ = ("values", "basis")

    def __init__(self, values, basis: FunctionBasis):
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        if len(values) != basis.dim:
            raise ValueError(f"{len(values)} values for a basis of dimension {basis.dim}")
        self.values = _readonly(values)
        self.basis = basis

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"MomentVector({self.values.tolist()})"


def moments(measure: DiscreteMeasure, basis: FunctionBasis) -> MomentVector:
    """Moment vector of a measure: values[i] = sum_j w_j * basis_i(x_j)."""
    mat = eval_matrix(basis, measure.atoms)
    values = mat @ measure.weights
    if basis.has_constant:
        # the moment of the constant is the mass by definition; computing it
        # through the same summation as mass() keeps the identity exact
        values[0] = measure.mass()
    return MomentVector(values, basis)
