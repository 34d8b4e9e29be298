"""Möbius maps and ideal polygons in the disk and upper half-plane models.

Boundary points of the disk are stored as angles in [0, 2π); boundary points
of the half-plane are extended reals, with ``math.inf`` standing for the point
at infinity.  Every cross-model conversion goes through ``CAYLEY``
(half-plane -> disk, z ↦ (z - i)/(z + i)) or its inverse.

Interior points are plain Python/numpy complex numbers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TAU = 2.0 * math.pi
INF = math.inf
DISK = "disk"
HALFPLANE = "halfplane"
MODELS = (DISK, HALFPLANE)

J = cmath.exp(2j * math.pi / 3)
STANDARD_TRIANGLE = (0.0, 2 * math.pi / 3, 4 * math.pi / 3)  # angles of (1, j, j²)
STANDARD_SQUARE = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)  # (1, i, -1, -i)

APEX_SEPARATION = 1e-12
DET_FLOOR = 1e-14
BOUNDARY_TOL = 1e-9


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegenerateError(GeometryError):
    pass


class OrientationError(GeometryError):
    pass


class InvalidMapError(GeometryError):
    pass


def _check_model(model):
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


# --- boundary coordinate kernels (scalar or ndarray) -----------------------

def canonical_angle(theta):
    """Reduce angles to [0, 2π).  Idempotent."""
    t = np.mod(theta, TAU)
    # mod of a tiny negative number can round up to exactly 2π
    t = np.where(t >= TAU, 0.0, t)
    if np.ndim(t) == 0:
        return float(t)
    return t


def real_to_angle(x):
    """Disk angle of the Cayley image of a half-plane boundary point."""
    with np.errstate(invalid="ignore"):
        return canonical_angle(math.pi + 2.0 * np.arctan(x))


def angle_to_real(theta):
    """Half-plane boundary coordinate of a disk angle; angle 0 maps to inf."""
    t = canonical_angle(theta)
    with np.errstate(divide="ignore"):
        x = -1.0 / np.tan(np.asarray(t, dtype=float) / 2.0)
    x = np.where(np.asarray(t) == 0.0, np.inf, x)
    if np.ndim(x) == 0:
        return float(x)
    return x


def ccw_sweep(start, end):
    """Anticlockwise angular length of the arc from ``start`` to ``end``."""
    return canonical_angle(np.subtract(end, start))


def chord(alpha, beta):
    """Euclidean distance between two boundary points of the unit circle."""
    return 2.0 * np.abs(np.sin((np.subtract(alpha, beta)) / 2.0))


def arc_region_diameter(start, end):
    """Euclidean diameter of the region cut off by the geodesic (start, end)
    on the side of the anticlockwise boundary arc start -> end.

    The region is a lens bounded by the arc and an orthogonal circle; when the
    arc is at most a semicircle both bounding arcs are minor arcs and the
    diameter is the chord.  Otherwise the region contains a diameter of the disk.
    """
    s = ccw_sweep(start, end)
    d = np.where(s >= math.pi, 2.0, 2.0 * np.sin(np.minimum(s, math.pi) / 2.0))
    if np.ndim(d) == 0:
        return float(d)
    return d


def polygon_diameter(angles):
    """Euclidean diameter of ideal polygons given by apex angles (..., k).

    An ideal polygon sits inside the convex hull of its apexes, so the
    diameter is the largest apex-to-apex chord.
    """
    a = np.asarray(angles, dtype=float)
    k = a.shape[-1]
    best = np.zeros(a.shape[:-1])
    for i in range(k):
        for j in range(i + 1, k):
            best = np.maximum(best, chord(a[..., i], a[..., j]))
    if np.ndim(best) == 0:
        return float(best)
    return best


def min_separations(angles) -> np.ndarray:
    """Smallest angular gap between apexes, per row of an (n, k) array."""
    a = np.sort(canonical_angle(np.atleast_2d(np.asarray(angles, dtype=float))), axis=1)
    gaps = np.diff(np.concatenate([a, a[:, :1] + TAU], axis=1), axis=1)
    return gaps.min(axis=1)


def is_anticlockwise(angles) -> bool:
    """True if the angles, read cyclically from the first, strictly increase."""
    a = np.asarray(angles, dtype=float)
    offsets = canonical_angle(a - a[0])[1:]
    return bool(np.all(offsets > 0) and np.all(np.diff(offsets) > 0))


def min_separation(angles) -> float:
    a = np.sort(canonical_angle(np.asarray(angles, dtype=float)))
    gaps = np.diff(np.concatenate([a, [a[0] + TAU]]))
    return float(gaps.min())


# --- boundary points ---------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the ideal boundary of one of the two models."""

    model: str
    value: float

    def __post_init__(self):
        _check_model(self.model)
        v = float(self.value)
        if math.isnan(v):
            raise GeometryError("boundary coordinate is NaN")
        if self.model == DISK:
            if math.isinf(v):
                raise GeometryError("disk boundary points are finite angles")
            v = canonical_angle(v)
        elif math.isinf(v):
            v = INF  # -inf and +inf are the same point
        object.__setattr__(self, "value", v)

    @classmethod
    def disk(cls, theta: float) -> "BoundaryPoint":
        return cls(DISK, theta)

    @classmethod
    def halfplane(cls, x: float) -> "BoundaryPoint":
        return cls(HALFPLANE, x)

    @classmethod
    def from_complex(cls, z: complex, model: str = DISK, tol: float = BOUNDARY_TOL) -> "BoundaryPoint":
        """Boundary point at complex coordinate z; rejects points off the boundary."""
        if model == DISK:
            if abs(abs(z) - 1.0) > tol:
                raise GeometryError(f"{z} is not on the unit circle")
            return cls(DISK, cmath.phase(z))
        if z == INF or (isinstance(z, complex) and math.isinf(abs(z))):
            return cls(HALFPLANE, INF)
        z = complex(z)
        if abs(z.imag) > tol * max(1.0, abs(z)):
            raise GeometryError(f"{z} is not on the real line")
        return cls(HALFPLANE, z.real)

    @property
    def is_infinite(self) -> bool:
        return self.model == HALFPLANE and self.value == INF

    @property
    def point(self):
        """Complex coordinate in its own model (``INF`` for infinity)."""
        if self.model == DISK:
            return cmath.exp(1j * self.value)
        return INF if self.is_infinite else complex(self.value, 0.0)

    @property
    def angle(self) -> float:
        """Disk angle of this point (after Cayley if needed)."""
        if self.model == DISK:
            return self.value
        return real_to_angle(self.value)

    def to(self, model: str) -> "BoundaryPoint":
        _check_model(model)
        if model == self.model:
            return self
        if model == DISK:
            return BoundaryPoint(DISK, real_to_angle(self.value))
        return BoundaryPoint(HALFPLANE, angle_to_real(self.value))


def _as_boundary(p, model=DISK) -> BoundaryPoint:
    if isinstance(p, BoundaryPoint):
        return p
    if model == DISK:
        return BoundaryPoint(DISK, p)
    return BoundaryPoint(HALFPLANE, p)


# --- Möbius maps -------------------------------------------------------------

@dataclass(frozen=True)
class MobiusMap:
    """z ↦ (az + b)/(cz + d) from ``source`` model to ``target`` model.

    Coefficients are rescaled on construction so that ad - bc = 1.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    source: str = DISK
    target: str = ""

    def __post_init__(self):
        _check_model(self.source)
        tgt = self.target or self.source
        _check_model(tgt)
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if not abs(det) >= DET_FLOOR:
            raise InvalidMapError(f"degenerate Möbius matrix (|det| = {abs(det):.3g})")
        s = cmath.sqrt(det)
        for name, v in zip("abcd", (a / s, b / s, c / s, d / s)):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "target", tgt)

    @classmethod
    def identity(cls, model: str = DISK) -> "MobiusMap":
        return cls(1, 0, 0, 1, model, model)

    @classmethod
    def disk_automorphism(cls, z0: complex, theta: float = 0.0) -> "MobiusMap":
        """φ(z) = e^{iθ}(z - z0)/(conj(z0) z - 1); sends z0 to 0."""
        z0 = complex(z0)
        if abs(z0) >= 1:
            raise GeometryError("z0 must lie inside the unit disk")
        e = cmath.exp(1j * theta)
        return cls(e, -e * z0, z0.conjugate(), -1, DISK, DISK)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        """Apply to a complex number, ``INF``, or a BoundaryPoint."""
        if isinstance(z, BoundaryPoint):
            return self.apply_boundary(z)
        return self._apply(z)

    def _apply(self, z):
        a, b, c, d = self.a, self.b, self.c, self.d
        if z == INF or (isinstance(z, complex) and cmath.isinf(z)):
            return INF if c == 0 else a / c
        den = c * z + d
        if den == 0:
            return INF
        return (a * z + b) / den

    def apply_boundary(self, p: BoundaryPoint) -> BoundaryPoint:
        if p.model != self.source:
            p = p.to(self.source)
        w = self._apply(p.point)
        if self.target == DISK:
            return BoundaryPoint(DISK, cmath.phase(w))
        if w == INF or abs(w) > 1e300:
            return BoundaryPoint(HALFPLANE, INF)
        return BoundaryPoint(HALFPLANE, complex(w).real)

    def apply_array(self, z):
        """Vectorized action on finite complex input (no infinity handling)."""
        z = np.asarray(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z) -> complex:
        return 1.0 / (self.c * z + self.d) ** 2

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self ∘ other."""
        if other.target != self.source:
            raise GeometryError(
                f"cannot compose: inner map lands in {other.target}, outer expects {self.source}")
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return MobiusMap(a, b, c, d, other.source, self.target)

    __matmul__ = compose

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a, self.target, self.source)

    def close_to(self, other: "MobiusMap", tol: float = 1e-10) -> bool:
        """Equality as group elements (matrices up to sign)."""
        m1, m2 = self.matrix, other.matrix
        return bool(min(np.abs(m1 - m2).max(), np.abs(m1 + m2).max()) < tol)


# half-plane -> disk, z ↦ (z - i)/(z + i): sends i to 0 and infinity to 1
CAYLEY = MobiusMap(1, -1j, 1, 1j, HALFPLANE, DISK)
# disk -> half-plane, w ↦ i(1 + w)/(1 - w)
CAYLEY_INV = CAYLEY.inverse()


def to_disk(z, model: str):
    """Interior point of ``model`` expressed in the disk."""
    return z if model == DISK else CAYLEY(z)


def _cross_ratio_matrix(p1, p2, p3):
    """Matrix of S with S(p1) = 0, S(p2) = 1, S(p3) = inf; entries may be INF."""
    if p1 == INF:
        return (0, p2 - p3, 1, -p3)
    if p2 == INF:
        return (1, -p1, 1, -p3)
    if p3 == INF:
        return (1, -p1, 0, p2 - p1)
    return (p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1))


def _check_triple(points: Sequence[BoundaryPoint]):
    angles = [p.angle for p in points]
    if min_separation(angles) <= APEX_SEPARATION:
        raise DegenerateError("triple has coincident points")
    if not is_anticlockwise(angles):
        raise OrientationError("triple is not anticlockwise")


def mobius_from_triples(src: Sequence, dst: Sequence,
                        source: str | None = None, target: str | None = None) -> MobiusMap:
    """The unique Möbius map sending src[k] to dst[k].

    Points may be BoundaryPoints or raw coordinates (angles for the disk,
    extended reals for the half-plane).  Both triples must be anticlockwise.
    """
    source = source or (src[0].model if isinstance(src[0], BoundaryPoint) else DISK)
    target = target or (dst[0].model if isinstance(dst[0], BoundaryPoint) else source)
    src = [_as_boundary(p, source).to(source) for p in src]
    dst = [_as_boundary(p, target).to(target) for p in dst]
    if len(src) != 3 or len(dst) != 3:
        raise ValueError("need exactly three source and three target points")
    _check_triple(src)
    _check_triple(dst)
    s_src = MobiusMap(*_cross_ratio_matrix(*(p.point for p in src)), source, HALFPLANE)
    s_dst = MobiusMap(*_cross_ratio_matrix(*(p.point for p in dst)), target, HALFPLANE)
    return s_dst.inverse() @ s_src


# --- geodesics and polygons ---------------------------------------------------

@dataclass(frozen=True)
class Geodesic:
    start: BoundaryPoint
    end: BoundaryPoint

    def __post_init__(self):
        if self.start.model != self.end.model:
            raise GeometryError("geodesic endpoints live in different models")
        if min_separation([self.start.angle, self.end.angle]) <= APEX_SEPARATION:
            raise DegenerateError("geodesic endpoints coincide")

    @classmethod
    def from_angles(cls, a: float, b: float) -> "Geodesic":
        return cls(BoundaryPoint.disk(a), BoundaryPoint.disk(b))

    @classmethod
    def from_reals(cls, a: float, b: float) -> "Geodesic":
        return cls(BoundaryPoint.halfplane(a), BoundaryPoint.halfplane(b))

    @property
    def model(self) -> str:
        return self.start.model

    def euclidean(self):
        """('circle', center, radius) or ('line', point, direction) in model coordinates."""
        if self.model == DISK:
            return disk_geodesic_circle(self.start.point, self.end.point)
        a, b = self.start.value, self.end.value
        if a == INF:
            return ("line", complex(b, 0), 1j)
        if b == INF:
            return ("line", complex(a, 0), 1j)
        return ("circle", complex((a + b) / 2, 0), abs(b - a) / 2)

    def map(self, m: MobiusMap) -> "Geodesic":
        return Geodesic(m(self.start.to(m.source)), m(self.end.to(m.source)))


def disk_geodesic_circle(a: complex, b: complex, tol: float = 1e-12):
    """Orthogonal circle through unit complex numbers a, b, or the diameter."""
    den = 1.0 + (a * b.conjugate()).real
    if abs(den) < tol:
        return ("line", 0j, b - a)
    c = (a + b) / den
    return ("circle", c, math.sqrt(max(abs(c) ** 2 - 1.0, 0.0)))


def _contains_disk(angles, z):
    """Strict interior test for disk polygons (rows), broadcasting against z."""
    ang = np.atleast_2d(np.asarray(angles, dtype=float))
    pts = np.exp(1j * ang)
    k = pts.shape[1]
    inside = np.ones(np.broadcast(pts[:, 0], z).shape, dtype=bool)
    for i in range(k):
        a = pts[:, i]
        b = pts[:, (i + 1) % k]
        c = pts[:, (i + 2) % k]
        side = ((z - a) / (z - b)) * np.conj((c - a) / (c - b))
        inside &= side.real > 0
    return inside


@dataclass(frozen=True)
class IdealPolygon:
    """An ideal triangle or square given by its anticlockwise apexes."""

    apexes: tuple

    def __post_init__(self):
        pts = tuple(self.apexes)
        if len(pts) not in (3, 4):
            raise GeometryError("ideal polygons here have 3 or 4 apexes")
        models = {p.model for p in pts}
        if len(models) != 1:
            raise GeometryError("apexes live in different models")
        angles = [p.angle for p in pts]
        if min_separation(angles) <= APEX_SEPARATION:
            raise DegenerateError("polygon apexes closer than the separation floor")
        if not is_anticlockwise(angles):
            raise OrientationError("apexes are not in anticlockwise order")
        object.__setattr__(self, "apexes", pts)

    @classmethod
    def from_angles(cls, angles: Iterable[float]) -> "IdealPolygon":
        return cls(tuple(BoundaryPoint.disk(t) for t in angles))

    @classmethod
    def from_reals(cls, xs: Iterable[float]) -> "IdealPolygon":
        return cls(tuple(BoundaryPoint.halfplane(x) for x in xs))

    @property
    def model(self) -> str:
        return self.apexes[0].model

    @property
    def angles(self) -> np.ndarray:
        return np.array([p.angle for p in self.apexes])

    def __len__(self):
        return len(self.apexes)

    def to(self, model: str) -> "IdealPolygon":
        return IdealPolygon(tuple(p.to(model) for p in self.apexes))

    def edges(self) -> list[Geodesic]:
        k = len(self.apexes)
        return [Geodesic(self.apexes[i], self.apexes[(i + 1) % k]) for i in range(k)]

    def contains(self, z) -> bool:
        return polygon_contains(self, z)

    def diameter(self) -> float:
        return polygon_diameter(self.angles)

    def map(self, m: MobiusMap) -> "IdealPolygon":
        return IdealPolygon(tuple(m(p.to(m.source)) for p in self.apexes))


def polygon_contains(poly: IdealPolygon, z) -> bool:
    """Strict containment of an interior point; points on an edge give False."""
    zd = complex(to_disk(z, poly.model))
    return bool(_contains_disk(poly.angles[None, :], zd)[0])


def harmonic_measure(z, start, end, model: str = DISK) -> float:
    """Harmonic measure at z of the anticlockwise boundary arc start -> end.

    ``start``/``end`` are BoundaryPoints or raw disk angles.  A sweep of 2π or
    more is the whole circle.
    """
    a0 = start.angle if isinstance(start, BoundaryPoint) else float(start)
    a1 = end.angle if isinstance(end, BoundaryPoint) else float(end)
    if not isinstance(start, BoundaryPoint) and abs(a1 - a0) >= TAU:
        return 1.0
    zd = complex(to_disk(z, model))
    return float(harmonic_measures(zd, np.array([[a0, a1]]))[0, 0])


def harmonic_measures(z: complex, angles) -> np.ndarray:
    """Harmonic measures at z of the arcs between consecutive apexes.

    ``angles`` has shape (n, k); entry [:, i] of the result is the measure of
    the anticlockwise arc from apex i to apex i+1.  For k = 2 only the arc
    from column 0 to column 1 is meaningful (the second column is its complement).
    """
    ang = np.atleast_2d(np.asarray(angles, dtype=float))
    w = np.exp(1j * ang)
    img = np.angle((w - z) / (1.0 - np.conj(z) * w))
    nxt = np.roll(img, -1, axis=1)
    return canonical_angle(nxt - img) / TAU


# --- gap normalization --------------------------------------------------------

PINS = ("derivative", "midpoint")


def gap_chart_coeffs(start, end, pin: str = "derivative"):
    """Coefficients (a, b, c, d) of the normalizer of disk gaps, vectorized.

    The gap is the region cut off by the geodesic (start, end) on the side of
    the anticlockwise boundary arc start -> end.  The map sends start to 1,
    end to -1, the gap onto {|z| > 1} of the half-plane, and either has unit
    derivative modulus at start ('derivative') or sends the arc midpoint to
    infinity ('midpoint').
    """
    if pin not in PINS:
        raise ValueError(f"pin must be one of {PINS}")
    start = np.asarray(start, dtype=float)
    sweep = ccw_sweep(start, end)
    s = np.exp(1j * start)
    e = np.exp(1j * np.asarray(end, dtype=float))
    m = np.exp(1j * (start + sweep / 2))
    if pin == "midpoint":
        lam = 1.0
    else:
        # |s - e||m - s|/(2|m - e|), and |m - s| = |m - e| for the midpoint
        lam = np.abs(s - e) / 2.0
    me, ms = m - e, m - s
    a = lam * me + ms
    b = -lam * s * me - e * ms
    c = -lam * me + ms
    d = lam * s * me - e * ms
    return a, b, c, d


def gap_normalizer(arch: Geodesic, pin: str = "derivative") -> MobiusMap:
    """Möbius map from the gap of ``arch`` onto {z ∈ ℍ : |z| > 1}.

    The gap is the side of the boundary arc running anticlockwise from
    ``arch.start`` to ``arch.end``; start goes to 1 and end to -1.  With
    ``pin='derivative'`` the derivative modulus at start, measured in the
    arch's own model, is 1; with ``pin='midpoint'`` the arc midpoint goes to
    infinity instead.
    """
    if pin not in PINS:
        raise ValueError(f"pin must be one of {PINS}")
    model = arch.model
    a0, a1 = arch.start.angle, arch.end.angle
    mid = canonical_angle(a0 + ccw_sweep(a0, a1) / 2)
    mid_pt = BoundaryPoint.disk(mid).to(model)
    base = mobius_from_triples([arch.start, mid_pt, arch.end],
                               [BoundaryPoint.halfplane(1.0), BoundaryPoint.halfplane(INF),
                                BoundaryPoint.halfplane(-1.0)],
                               source=model, target=HALFPLANE)
    if pin == "midpoint":
        return base
    if arch.start.is_infinite:
        raise GeometryError("derivative pin undefined when the start foot is at infinity")
    lam = 1.0 / abs(base.derivative(arch.start.point))
    return fix_pm1_scaling(lam) @ base


def fix_pm1_scaling(lam: float) -> MobiusMap:
    """Half-plane map fixing ±1 with multiplier ``lam`` at 1.

    Conjugate of x ↦ λx by g(x) = (x - 1)/(x + 1).
    """
    g = MobiusMap(1, -1, 1, 1, HALFPLANE)
    return g.inverse() @ MobiusMap(lam, 0, 0, 1, HALFPLANE) @ g


def reflect_boundary(c, a, b):
    """Reflect boundary point c across the geodesic (a, b).

    Works on complex coordinates of either model (``INF`` allowed): with
    m(z) = (z - a)/(z - b) the geodesic is sent to a line through 0 and the
    reflection becomes w ↦ -w on boundary points.
    """
    if a == INF:
        w = -1.0 / (c - b) if c != INF else 0.0
        return INF if w == 0 else b + 1.0 / w
    if b == INF:
        return INF if c == INF else a - (c - a)
    w = -1.0 if c == INF else -(c - a) / (c - b)
    if w == 1:
        return INF
    return (a - w * b) / (1.0 - w)
