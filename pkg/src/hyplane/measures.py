"""Samplers and densities for the measures behind the random tilings.

Conventions:
  * μ is the hyperbolic area measure normalized so ideal triangles have area 1.
  * ζ(dx) = 2 dx/(x² - 1) on |x| > 1, the jump intensity of the accordion.
  * ζ_[u,v] and ζ_[v,u] are the images of dx/x on (0, ∞) under Möbius maps
    sending (0, ∞) to (u, v) and (v, u) respectively.
  * π(du dv) = du dv/(v - u)² on arches u < v.

Infinite-mass laws are truncated in their dx/x coordinate, so truncated laws
on different arches stay exact Möbius images of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import (DISK, HALFPLANE, INF, STANDARD_SQUARE, STANDARD_TRIANGLE, TAU,
                   DegenerateError, GeometryError, IdealPolygon, MobiusMap, OrientationError,
                   canonical_angle, mobius_from_triples)
from .rng import as_generator


class InfiniteMassError(ValueError):
    """Raised when a truncation leaves infinite (or empty) mass."""


# --- ζ on |x| > 1 ----------------------------------------------------------------

def tail_mass(x0: float) -> float:
    """ζ-mass of {|x| > x0}: 2 ln((x0 + 1)/(x0 - 1))."""
    if not x0 > 1:
        raise InfiniteMassError(f"ζ has infinite mass above cutoff {x0}")
    return 2.0 * math.log((x0 + 1.0) / (x0 - 1.0))


def zeta_density(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(np.abs(x) > 1, 2.0 / (x * x - 1.0), 0.0)


def zeta_primitive(x):
    """ln|(x - 1)/(x + 1)|, an antiderivative of the ζ density on each side."""
    x = np.asarray(x, dtype=float)
    return np.log(np.abs((x - 1.0) / (x + 1.0)))


def zeta_mass(a: float, b: float) -> float:
    """ζ-mass of (a, b); the interval must not meet [-1, 1]."""
    if a > b:
        a, b = b, a
    if not (a >= 1 or b <= -1):
        raise InfiniteMassError("interval meets [-1, 1], where ζ is not finite")
    fa = 0.0 if math.isinf(a) else float(zeta_primitive(a))
    fb = 0.0 if math.isinf(b) else float(zeta_primitive(b))
    return fb - fa


def y_from_x(x):
    """The coordinate y = (x - 1)/(x + 1), in which ζ reads dy/y."""
    return (np.asarray(x, dtype=float) - 1.0) / (np.asarray(x, dtype=float) + 1.0)


def x_from_y(y):
    return (1.0 + np.asarray(y, dtype=float)) / (1.0 - np.asarray(y, dtype=float))


def zeta_magnitude_y(u, x0: float):
    """Inverse-CDF kernel: y = (|x| - 1)/(|x| + 1) for uniforms u in (0, 1].

    With y0 = (x0 - 1)/(x0 + 1) the normalized tail law of ζ is y = y0**u,
    which is the same as s = u ln((x0+1)/(x0-1)), |x| = (e^s + 1)/(e^s - 1),
    but keeps full relative precision in |x| - 1.
    """
    if not x0 > 1:
        raise InfiniteMassError(f"ζ has infinite mass above cutoff {x0}")
    return np.exp(np.asarray(u, dtype=float) * math.log((x0 - 1.0) / (x0 + 1.0)))


def sample_zeta(rng, cutoff: float, size=None):
    """Draw from ζ restricted to |x| > cutoff, normalized.

    Magnitude first (one uniform per draw), then a fair-coin sign.
    """
    gen = as_generator(rng)
    n = 1 if size is None else size
    u = 1.0 - gen.random(n)
    sign = np.where(gen.random(n) < 0.5, 1.0, -1.0)
    y = zeta_magnitude_y(u, cutoff)
    x = sign * (1.0 + y) / (1.0 - y)
    return float(x[0]) if size is None else x


def zeta_quantile(u: float, cutoff: float, sign: int = 1) -> float:
    """Deterministic inverse CDF of the magnitude; u = 1 gives the cutoff."""
    y = float(zeta_magnitude_y(u, cutoff))
    return sign * (1.0 + y) / (1.0 - y)


# --- ζ_[u,v], ζ_[v,u], π ----------------------------------------------------------

INSIDE = "inside"
OUTSIDE = "outside"


def _check_arch(u, v):
    if math.isinf(u) or not u < v:
        raise DegenerateError("need finite u < v (v may be infinite)")


def zeta_interval_density(w, u: float, v: float, side: str = INSIDE):
    """Density of ζ_[u,v] (inside) or ζ_[v,u] (outside) at w."""
    _check_arch(u, v)
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if side == INSIDE:
            if v == INF:
                return np.where(w > u, 1.0 / (w - u), 0.0)
            return np.where((w > u) & (w < v), (v - u) / ((v - w) * (w - u)), 0.0)
        if v == INF:
            return np.where(w < u, 1.0 / (u - w), 0.0)
        return np.where((w < u) | (w > v), (v - u) / ((w - v) * (w - u)), 0.0)


def zeta_interval_coordinate(w, u: float, v: float, side: str = INSIDE):
    """The dx/x coordinate ln x of w, i.e. a primitive F of the density.

    Inside: F(w) = ln((w - u)/(v - w)).  Outside: F(w) = ln((w - v)/(w - u)).
    """
    _check_arch(u, v)
    w = np.asarray(w, dtype=float)
    if side == INSIDE:
        return np.log(w - u) if v == INF else np.log((w - u) / (v - w))
    return -np.log(u - w) if v == INF else np.log((w - v) / (w - u))


def zeta_interval_mass(a: float, b: float, u: float, v: float, side: str = INSIDE) -> float:
    """Mass of (a, b) under ζ_[u,v] / ζ_[v,u]; (a, b) must sit in one support component."""
    fa = zeta_interval_coordinate(a, u, v, side)
    fb = zeta_interval_coordinate(b, u, v, side)
    return float(fb - fa)


def zeta_interval_from_log(t, u: float, v: float, side: str = INSIDE):
    """Map dx/x coordinates t = ln x to points w of the support."""
    _check_arch(u, v)
    x = np.exp(np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        if side == INSIDE:
            return u + x if v == INF else (v * x + u) / (x + 1.0)
        return u - 1.0 / x if v == INF else (u * x - v) / (x - 1.0)


def sample_zeta_interval(rng, u: float, v: float, side: str = INSIDE, cutoff: float = 1e-6,
                         size=None, log_range=None):
    """Sample ζ_[u,v] (inside) or ζ_[v,u] (outside) truncated to x ∈ [ε, 1/ε].

    ``log_range`` overrides the truncation with an explicit interval of ln x.
    """
    _check_arch(u, v)
    if side not in (INSIDE, OUTSIDE):
        raise ValueError("side must be 'inside' or 'outside'")
    if log_range is None:
        if not 0 < cutoff < 1:
            raise InfiniteMassError("truncation must satisfy 0 < ε < 1")
        lo, hi = math.log(cutoff), -math.log(cutoff)
    else:
        lo, hi = log_range
    if not lo < hi:
        raise InfiniteMassError("empty truncated support")
    gen = as_generator(rng)
    n = 1 if size is None else size
    t = lo + (hi - lo) * gen.random(n)
    w = zeta_interval_from_log(t, u, v, side)
    return float(w[0]) if size is None else w


def pi_density(u, v):
    """Density of π(du dv) = du dv/(v - u)² on u < v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(u < v, 1.0 / (v - u) ** 2, 0.0)


@dataclass(frozen=True)
class IntervalMeasure:
    """One of the boundary measures, with its density and segment masses."""

    kind: str  # 'zeta' | 'zeta_interval' | 'zeta_complement' | 'pi'
    u: float = -1.0
    v: float = 1.0

    KINDS = ("zeta", "zeta_interval", "zeta_complement", "pi")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind != "zeta":
            _check_arch(self.u, self.v)

    @property
    def _side(self):
        return INSIDE if self.kind == "zeta_interval" else OUTSIDE

    def density(self, w, w2=None):
        if self.kind == "zeta":
            return zeta_density(w)
        if self.kind == "pi":
            return pi_density(w, w2)
        return zeta_interval_density(w, self.u, self.v, self._side)

    def mass(self, a: float, b: float) -> float:
        if self.kind == "zeta":
            return zeta_mass(a, b)
        if self.kind == "pi":
            raise ValueError("π is a measure on pairs; use density()")
        return zeta_interval_mass(a, b, self.u, self.v, self._side)


def _is_ccw_reals(u, v, w) -> bool:
    return (u < v < w) or (v < w < u) or (w < u < v)


def triple_density_and_duality(u: float, v: float, w: float):
    """(ν density, duality residual) at the boundary triple (u, v, w) of ℍ.

    The ν density is (1/π²)/(|u-v||v-w||w-u|).  The residual is
    |π(u,v) ζ_[v,u](w) - 1/((w-v)(v-u)(w-u))|, which vanishes identically.
    A point at infinity is handled by dropping the factors that contain it
    from both sides (the homogeneous form).
    """
    pts = [u, v, w]
    if len({p if not math.isinf(p) else INF for p in pts}) < 3:
        raise DegenerateError("coincident boundary points")
    finite = [p for p in pts if not math.isinf(p)]
    if len(finite) < 2:
        raise DegenerateError("at most one point may be at infinity")
    if not math.isinf(w):
        if not math.isinf(v) and not u < v:
            raise OrientationError("the arch needs u < v")
        if not math.isinf(v) and u < w < v:
            raise OrientationError("w must lie outside the arch [u, v]")
    if not any(math.isinf(p) for p in pts) and not _is_ccw_reals(u, v, w):
        raise OrientationError("triple is not anticlockwise")

    def factor(p, q):
        return 1.0 if (math.isinf(p) or math.isinf(q)) else abs(p - q)

    nu = 1.0 / (math.pi ** 2 * factor(u, v) * factor(v, w) * factor(w, u))
    if math.isinf(w):
        lhs = 1.0 / (v - u) ** 2 * (v - u)
        rhs = 1.0 / (v - u)
    elif math.isinf(v):
        lhs = 1.0 / (u - w)
        rhs = -1.0 / (w - u)
    elif math.isinf(u):
        raise OrientationError("the arch foot u cannot be at infinity")
    else:
        lhs = float(pi_density(u, v)) * float(zeta_interval_density(w, u, v, OUTSIDE))
        rhs = 1.0 / ((w - v) * (v - u) * (w - u))
    return nu, abs(lhs - rhs)


def random_admissible_triples(rng, n: int, scale: float = 10.0, min_gap: float = 0.1):
    """Triples u < 0 < v with w outside [u, v], pairwise at least ``min_gap`` apart."""
    gen = as_generator(rng)
    u = -min_gap - (scale - min_gap) * gen.random(n)
    v = min_gap + (scale - min_gap) * gen.random(n)
    off = min_gap + (scale - min_gap) * gen.random(n)
    w = np.where(gen.random(n) < 0.5, v + off, u - off)
    return u, v, w


def duality_residuals(u, v, w):
    """Vectorized residuals for finite admissible triples."""
    lhs = (1.0 / (v - u) ** 2) * ((v - u) / ((w - v) * (w - u)))
    rhs = 1.0 / ((w - v) * (v - u) * (w - u))
    return np.abs(lhs - rhs)


# --- μ, P0 ----------------------------------------------------------------------

# half-plane triangle (0, 1, ∞) onto the disk triangle (1, j, j²)
_H_TO_STANDARD = mobius_from_triples([0.0, 1.0, INF], list(STANDARD_TRIANGLE),
                                     source=HALFPLANE, target=DISK)


def mu_density(z):
    """Density of μ with respect to Lebesgue measure on the disk."""
    r2 = np.abs(np.asarray(z)) ** 2
    return 4.0 / (math.pi * (1.0 - r2) ** 2)


def mu_ball_mass(r: float) -> float:
    return 4.0 * r * r / (1.0 - r * r)


def sample_mu_ball(rng, n: int, r: float):
    """n points from μ restricted to the Euclidean ball |z| < r."""
    gen = as_generator(rng)
    k = r * r / (1.0 - r * r)
    t = k * gen.random(n)
    s = np.sqrt(t / (1.0 + t))
    return s * np.exp(1j * TAU * gen.random(n))


def sample_mu_halfplane_triangle(rng, n: int):
    """μ restricted to the half-plane triangle (0, 1, ∞), normalized.

    The x-marginal of dx dy/y² above the unit-diameter semicircle is the
    arcsine law; given x, y is y0/U with y0 = √(x(1 - x)).
    """
    gen = as_generator(rng)
    x = gen.beta(0.5, 0.5, n)
    y = np.sqrt(x * (1.0 - x)) / (1.0 - gen.random(n))
    return x + 1j * y


def sample_mu_triangle(rng, n: int, apexes=STANDARD_TRIANGLE):
    """μ restricted to the disk triangle with the given apex angles."""
    gen = as_generator(rng)
    zh = sample_mu_halfplane_triangle(gen, n)
    if tuple(apexes) == STANDARD_TRIANGLE:
        m = _H_TO_STANDARD
    else:
        m = mobius_from_triples([0.0, 1.0, INF], list(apexes), source=HALFPLANE, target=DISK)
    return m.apply_array(zh)


def automorphism_angles(z0, theta, angles):
    """Apex angles of φ_{z0,θ}(polygon), vectorized over rows of z0/θ."""
    z0 = np.asarray(z0)[..., None]
    theta = np.asarray(theta)[..., None]
    w = np.exp(1j * np.asarray(angles, dtype=float))
    img = np.exp(1j * theta) * (w - z0) / (np.conj(z0) * w - 1.0)
    return canonical_angle(np.angle(img))


def sample_p0_angles(rng, n: int) -> np.ndarray:
    """(n, 3) apex angles of independent P0 triangles.

    Draw z0 from μ on (1, j, j²) and θ uniform, return φ_{z0,θ}((1, j, j²)).
    Since φ_{z0,θ}(z0) = 0 every output contains the origin.
    """
    gen = as_generator(rng)
    z0 = sample_mu_triangle(gen, n)
    theta = TAU * gen.random(n)
    return automorphism_angles(z0, theta, STANDARD_TRIANGLE)


def sample_p0(rng) -> IdealPolygon:
    return IdealPolygon.from_angles(sample_p0_angles(rng, 1)[0])


def p0_gap_weight(g1, g2):
    """Unnormalized density of P0 on apex gaps (g1, g2, 2π - g1 - g2).

    Pulled back from the triple density to the circle; zero unless every
    gap is below π (the triangle contains the origin).
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    g3 = TAU - g1 - g2
    ok = (g1 > 0) & (g2 > 0) & (g3 > 0) & (g1 < math.pi) & (g2 < math.pi) & (g3 < math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 1.0 / (8.0 * np.sin(g1 / 2) * np.sin(g2 / 2) * np.sin(g3 / 2))
    return np.where(ok, val, 0.0)


def metropolis_p0_angles(rng, n: int, chains: int = 2000, burn: int = 400, step: float = 0.6):
    """Oracle sampler for P0 by Metropolis on the gap density.

    Runs ``chains`` independent chains and thins each evenly to reach ``n``
    draws; a uniform rotation is added afterwards.
    """
    gen = as_generator(rng)
    per_chain = -(-n // chains)
    thin = 5
    g = np.full((chains, 2), TAU / 3)
    w = p0_gap_weight(g[:, 0], g[:, 1])
    out = []
    for it in range(burn + per_chain * thin):
        prop = g + step * gen.standard_normal((chains, 2))
        wp = p0_gap_weight(prop[:, 0], prop[:, 1])
        accept = gen.random(chains) * w < wp
        g[accept] = prop[accept]
        w[accept] = wp[accept]
        if it >= burn and (it - burn) % thin == 0:
            out.append(g.copy())
    gaps = np.concatenate(out)[:n]
    rot = TAU * gen.random(len(gaps))
    angles = np.stack([rot, rot + gaps[:, 0], rot + gaps[:, 0] + gaps[:, 1]], axis=1)
    return canonical_angle(angles)


def sample_mu_square(rng, n: int):
    """μ restricted to the standard square (1, i, -1, -i), normalized (area 2)."""
    gen = as_generator(rng)
    first = gen.random(n) < 0.5
    za = sample_mu_triangle(gen, n, (STANDARD_SQUARE[0], STANDARD_SQUARE[1], STANDARD_SQUARE[2]))
    zb = sample_mu_triangle(gen, n, (STANDARD_SQUARE[2], STANDARD_SQUARE[3], STANDARD_SQUARE[0]))
    return np.where(first, za, zb)


def sample_p0_square_angles(rng, n: int) -> np.ndarray:
    gen = as_generator(rng)
    z0 = sample_mu_square(gen, n)
    theta = TAU * gen.random(n)
    return automorphism_angles(z0, theta, STANDARD_SQUARE)


def origin_hit_mass(rng, n: int, r: float) -> tuple[float, float]:
    """Monte Carlo estimate of μ⊗λ{(z0, θ): 0 ∈ φ_{z0,θ}(1, j, j²)} over |z0| < r.

    The event is z0 ∈ (1, j, j²) since φ_{z0,θ}(z0) = 0.  Returns the estimate
    and its standard error; it tends to 1 as r -> 1.
    """
    from .geom import _contains_disk  # local to keep the public surface small

    gen = as_generator(rng)
    mass = mu_ball_mass(r)
    hits = 0
    done = 0
    while done < n:
        m = min(500_000, n - done)
        z = sample_mu_ball(gen, m, r)
        hits += int(np.count_nonzero(_contains_disk(np.array([STANDARD_TRIANGLE]), z)))
        done += m
    p = hits / n
    return mass * p, mass * math.sqrt(p * (1 - p) / n)


__all__ = [
    "InfiniteMassError", "IntervalMeasure", "tail_mass", "zeta_density", "zeta_mass",
    "sample_zeta", "zeta_quantile", "sample_zeta_interval", "zeta_interval_density",
    "zeta_interval_mass", "zeta_interval_coordinate", "pi_density",
    "triple_density_and_duality", "sample_p0", "sample_p0_angles", "sample_mu_triangle",
    "sample_p0_square_angles", "metropolis_p0_angles", "origin_hit_mass", "mu_density",
]
