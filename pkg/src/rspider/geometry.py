"""Geodesic primitives for the unit hypersphere and for flat space.

Points and tangent vectors are stored in ambient ``R^d`` coordinates.
Sphere points are kept unit-norm on construction; tangent vectors are
projected onto the tangent space of their base point. All operations are
deterministic pure functions, and constructed values are treated as
immutable (safe to share across threads).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

__all__ = [
    "AntipodalError",
    "Euclidean",
    "GeometryError",
    "Manifold",
    "ManifoldPoint",
    "Sphere",
    "TangentVector",
]


class GeometryError(ValueError):
    """Invalid use of a geometry operation (dimension or base mismatch)."""


class AntipodalError(GeometryError):
    """The geodesic between (nearly) antipodal sphere points is not unique."""


_UNIT_TOL = 1e-9        # |norm - 1| accepted without renormalizing
_ANTIPODAL_COS = -1.0 + 1e-8
_EXP_SMALL = 1e-8       # below this angle exp falls back to normalize(x + v)
_ZERO_ANGLE = 1e-9      # below this angle log/transport short-circuit


class ManifoldPoint:
    """A point on a manifold, in ambient coordinates."""

    __slots__ = ("manifold", "coords")

    def __init__(self, manifold: "Manifold", coords):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 1 or coords.shape[0] != manifold.d:
            raise GeometryError(
                f"expected a vector of dimension {manifold.d}, got shape {coords.shape}"
            )
        self.manifold = manifold
        self.coords = manifold._clean_point(coords)

    def __repr__(self):
        return f"ManifoldPoint({self.manifold!r}, {self.coords!r})"


class TangentVector:
    """A tangent vector attached to a base point, in ambient coordinates.

    Construction projects the coordinates onto the tangent space at the
    base, so the tangency invariant holds for every instance. The squared
    norm is cached.
    """

    __slots__ = ("base", "coords", "_sq")

    def __init__(self, base: ManifoldPoint, coords):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 1 or coords.shape[0] != base.manifold.d:
            raise GeometryError(
                f"expected a vector of dimension {base.manifold.d}, got shape {coords.shape}"
            )
        coords = base.manifold._project_tangent(base, coords)
        sq = float(coords @ coords)
        if not math.isfinite(sq):
            raise GeometryError("tangent coordinates must be finite")
        self.base = base
        self.coords = coords
        self._sq = sq

    @classmethod
    def _raw(cls, base: ManifoldPoint, coords: np.ndarray) -> "TangentVector":
        # trusted path: coords already tangent at base
        v = object.__new__(cls)
        v.base = base
        v.coords = coords
        sq = float(coords @ coords)
        if not math.isfinite(sq):
            raise GeometryError("tangent coordinates must be finite")
        v._sq = sq
        return v

    def norm(self) -> float:
        return math.sqrt(self._sq)

    def _scaled(self, s: float) -> "TangentVector":
        v = object.__new__(TangentVector)
        v.base = self.base
        v.coords = self.coords * s
        v._sq = self._sq * (s * s)
        return v

    def _check_same_base(self, other: "TangentVector"):
        if self.base is not other.base and not np.array_equal(
            self.base.coords, other.base.coords
        ):
            raise GeometryError("tangent vectors live at different base points")

    def __add__(self, other: "TangentVector") -> "TangentVector":
        self._check_same_base(other)
        return TangentVector._raw(self.base, self.coords + other.coords)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        self._check_same_base(other)
        return TangentVector._raw(self.base, self.coords - other.coords)

    def __neg__(self) -> "TangentVector":
        return self._scaled(-1.0)

    def __mul__(self, s: float) -> "TangentVector":
        return self._scaled(float(s))

    __rmul__ = __mul__

    def __repr__(self):
        return f"TangentVector(base={self.base.coords!r}, coords={self.coords!r})"


class Manifold(ABC):
    """Shared interface: metric, exponential map, logarithm, transport."""

    __slots__ = ("d",)

    def __init__(self, d: int):
        if int(d) < 1:
            raise GeometryError("ambient dimension must be >= 1")
        self.d = int(d)

    def __eq__(self, other):
        return type(self) is type(other) and self.d == other.d

    def __hash__(self):
        return hash((type(self).__name__, self.d))

    def __repr__(self):
        return f"{type(self).__name__}({self.d})"

    # -- construction ---------------------------------------------------
    def point(self, coords) -> ManifoldPoint:
        return ManifoldPoint(self, coords)

    def tangent(self, base: ManifoldPoint, coords) -> TangentVector:
        self._check_point(base)
        return TangentVector(base, coords)

    def zero_tangent(self, base: ManifoldPoint) -> TangentVector:
        return TangentVector._raw(base, np.zeros(self.d))

    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        return ManifoldPoint(self, rng.standard_normal(self.d))

    def random_tangent(
        self, base: ManifoldPoint, rng: np.random.Generator, scale: float = 1.0
    ) -> TangentVector:
        """Random tangent at ``base`` with norm ``scale``."""
        for _ in range(16):
            v = TangentVector(base, rng.standard_normal(self.d))
            if v._sq > 1e-24:
                return v._scaled(scale / v.norm())
        raise GeometryError("failed to draw a nonzero tangent direction")

    # -- metric -----------------------------------------------------------
    def inner(self, u: TangentVector, v: TangentVector) -> float:
        """Riemannian inner product of two tangents at the same base."""
        u._check_same_base(v)
        return float(u.coords @ v.coords)

    def norm(self, v: TangentVector) -> float:
        return math.sqrt(v._sq)

    # -- geodesic operations ----------------------------------------------
    @abstractmethod
    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        """Point reached by the unit-time geodesic from ``x`` with velocity ``v``."""

    @abstractmethod
    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        """Inverse of ``exp``: tangent at ``x`` pointing to ``y`` with length dist(x, y)."""

    @abstractmethod
    def transport(
        self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVector
    ) -> TangentVector:
        """Parallel transport of ``v`` from ``x`` to ``y`` along the geodesic."""

    @abstractmethod
    def retract(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        """First-order approximation of the exponential map."""

    @abstractmethod
    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        """Geodesic distance."""

    # -- internal hooks -----------------------------------------------------
    @abstractmethod
    def _clean_point(self, coords: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _project_tangent(self, base: ManifoldPoint, coords: np.ndarray) -> np.ndarray: ...

    def _check_point(self, x: ManifoldPoint):
        if x.manifold is not self and x.manifold != self:
            raise GeometryError(f"point belongs to {x.manifold!r}, not {self!r}")

    def _check_pair(self, x: ManifoldPoint, y: ManifoldPoint):
        self._check_point(x)
        self._check_point(y)

    def _check_base(self, x: ManifoldPoint, v: TangentVector):
        self._check_point(x)
        if v.base is not x and not np.array_equal(v.base.coords, x.coords):
            raise GeometryError("tangent vector is not based at the given point")


class Sphere(Manifold):
    """Unit hypersphere S^{d-1} embedded in R^d (requires d >= 2)."""

    __slots__ = ()

    def __init__(self, d: int):
        super().__init__(d)
        if self.d < 2:
            raise GeometryError("the sphere needs ambient dimension >= 2")

    def _clean_point(self, coords: np.ndarray) -> np.ndarray:
        sq = float(coords @ coords)
        if not math.isfinite(sq):
            raise GeometryError("point coordinates must be finite")
        nrm = math.sqrt(sq)
        if abs(nrm - 1.0) <= _UNIT_TOL:
            return coords
        if nrm <= 1e-300:
            raise GeometryError("cannot normalize a zero vector onto the sphere")
        return coords / nrm

    def _project_tangent(self, base: ManifoldPoint, coords: np.ndarray) -> np.ndarray:
        c = float(base.coords @ coords)
        return coords - c * base.coords

    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        self._check_base(x, v)
        theta = math.sqrt(v._sq)
        if theta < _EXP_SMALL:
            return ManifoldPoint(self, x.coords + v.coords)
        out = math.cos(theta) * x.coords + (math.sin(theta) / theta) * v.coords
        return ManifoldPoint(self, out)

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        self._check_pair(x, y)
        c = float(x.coords @ y.coords)
        if c <= _ANTIPODAL_COS:
            raise AntipodalError(
                f"logarithm undefined for (nearly) antipodal points: <x, y> = {c}"
            )
        u = y.coords - c * x.coords
        un = math.sqrt(float(u @ u))  # equals sin(theta); resolves tiny angles
        if un < _ZERO_ANGLE:
            return TangentVector._raw(x, np.zeros(self.d))
        theta = math.acos(min(1.0, max(-1.0, c)))
        return TangentVector._raw(x, (theta / un) * u)

    def transport(
        self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVector
    ) -> TangentVector:
        self._check_base(x, v)
        self._check_point(y)
        c = float(x.coords @ y.coords)
        if c <= _ANTIPODAL_COS:
            raise AntipodalError(
                f"transport undefined for (nearly) antipodal points: <x, y> = {c}"
            )
        u = y.coords - c * x.coords
        un = math.sqrt(float(u @ u))
        if un < _ZERO_ANGLE:
            if x is y or np.array_equal(x.coords, y.coords):
                return TangentVector._raw(y, v.coords)
            return TangentVector(y, v.coords)
        theta = math.acos(min(1.0, max(-1.0, c)))
        e = u / un
        a = float(e @ v.coords)
        out = (
            v.coords
            - a * e
            + a * (math.cos(theta) * e - math.sin(theta) * x.coords)
        )
        return TangentVector(y, out)

    def retract(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        self._check_base(x, v)
        w = x.coords + v.coords
        nw = math.sqrt(float(w @ w))
        if nw <= 1e-12:
            raise GeometryError("retraction undefined: x + v is (nearly) zero")
        return ManifoldPoint(self, w / nw)

    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        self._check_pair(x, y)
        c = float(x.coords @ y.coords)
        if c <= _ANTIPODAL_COS:
            raise AntipodalError(
                f"distance ill-conditioned for (nearly) antipodal points: <x, y> = {c}"
            )
        return math.acos(min(1.0, max(-1.0, c)))


class Euclidean(Manifold):
    """Flat R^d with the standard inner product."""

    __slots__ = ()

    def _clean_point(self, coords: np.ndarray) -> np.ndarray:
        if not math.isfinite(float(coords @ coords)):
            raise GeometryError("point coordinates must be finite")
        return coords

    def _project_tangent(self, base: ManifoldPoint, coords: np.ndarray) -> np.ndarray:
        return coords

    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        self._check_base(x, v)
        return ManifoldPoint(self, x.coords + v.coords)

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        self._check_pair(x, y)
        return TangentVector._raw(x, y.coords - x.coords)

    def transport(
        self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVector
    ) -> TangentVector:
        self._check_base(x, v)
        self._check_point(y)
        return TangentVector._raw(y, v.coords)

    retract = exp

    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        self._check_pair(x, y)
        diff = y.coords - x.coords
        return math.sqrt(float(diff @ diff))
