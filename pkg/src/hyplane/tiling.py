"""Disk tilings: the Markovian triangulation, the Farey reflection tiling, thinning.

A gap is stored as a pair of disk angles (start, end): the region cut off by
the geodesic between them on the side of the anticlockwise boundary arc
start -> end.  Every gap is filled by an accordion run in its normalized
half-plane chart, where the gap is {|z| > 1}, start sits at 1 and end at -1.
Each accordion jump yields a triangle and one side gap, which is filled in
turn from its own split random stream.

Polygons of Euclidean diameter below the resolution δ are dropped, as are
gaps below δ; an accordion stops once what is left of its gap is below δ.
"""

from __future__ import annotations

import cmath
import math
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .accordion import BLOCK, DEFAULT_MAX_JUMPS, PoissonJumps, advance
from .geom import (APEX_SEPARATION, DISK, INF, TAU, BoundaryPoint, IdealPolygon,
                   _contains_disk, arc_region_diameter, canonical_angle, ccw_sweep,
                   disk_geodesic_circle, gap_chart_coeffs, min_separations, polygon_diameter,
                   reflect_boundary)
from .measures import sample_p0_angles
from .rng import RandomStream, as_generator

KINDS = ("markov-triangles", "farey", "markov-squares")
JUMP_CUTOFF_RATIO = 0.1  # ε_jump = δ/10 unless given


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("HYPLANE_THREADS", "1")))
    except ValueError:
        return 1


def default_jump_cutoff(resolution: float) -> float:
    return JUMP_CUTOFF_RATIO * resolution


def _check_resolution(resolution, jump_cutoff):
    if not (resolution > 0 and math.isfinite(resolution)):
        raise ValueError(f"resolution must be positive, got {resolution}")
    if not (jump_cutoff > 0 and math.isfinite(jump_cutoff)):
        raise ValueError(f"jump cutoff must be positive, got {jump_cutoff}")


# --- the Tiling value ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Tiling:
    """A finite resolution-truncated tiling of the disk.

    ``angles`` is an (n, k) array of anticlockwise apex angles (k = 3 or 4).
    """

    angles: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)
    created: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown tiling kind {self.kind!r}")
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 2:
            a = a.reshape(0, 4 if self.kind == "markov-squares" else 3)
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    def __len__(self):
        return len(self.angles)

    def __eq__(self, other):
        if not isinstance(other, Tiling):
            return NotImplemented
        return (self.kind == other.kind and self.meta == other.meta
                and self.angles.shape == other.angles.shape
                and np.array_equal(self.angles, other.angles))

    @property
    def polygons(self) -> list[IdealPolygon]:
        return [IdealPolygon.from_angles(row) for row in self.angles]

    @property
    def diameters(self) -> np.ndarray:
        return polygon_diameter(self.angles)

    def with_angles(self, angles, **meta) -> "Tiling":
        m = dict(self.meta)
        m.update(meta)
        m["count"] = len(angles)
        return Tiling(np.asarray(angles), self.kind, m)


def contains_mask(angles, z) -> np.ndarray:
    """Which polygons (rows of apex angles) contain the disk point z."""
    if len(angles) == 0:
        return np.zeros(0, dtype=bool)
    return _contains_disk(angles, complex(z))


def triangle_containing(t: Tiling, z):
    """The polygon of ``t`` containing z, or None if z lies in an unresolved gap."""
    hits = np.flatnonzero(contains_mask(t.angles, z))
    if hits.size == 0:
        return None
    return IdealPolygon.from_angles(t.angles[hits[0]])


def polygons_disjoint(p, q) -> bool:
    """Certificate that two ideal polygons have disjoint interiors.

    Two ideal polygons are disjoint exactly when all apexes of one lie on a
    single closed boundary arc between consecutive apexes of the other.
    """
    p = canonical_angle(np.asarray(p, dtype=float))
    q = canonical_angle(np.asarray(q, dtype=float))
    k = len(p)
    for i in range(k):
        lo = p[i]
        span = ccw_sweep(lo, p[(i + 1) % k])
        off = ccw_sweep(lo, q)
        # closed arc; tolerate shared apexes (offset 0 may show up as ~2π)
        off = np.where(off > TAU - 1e-12, 0.0, off)
        if np.all(off <= span + 1e-12):
            return True
    return False


def thin(t: Tiling, p: float, rng) -> Tiling:
    """Keep each polygon independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError("retention probability must lie in [0, 1]")
    gen = as_generator(rng)
    keep = gen.random(len(t)) < p
    return t.with_angles(t.angles[keep], thin=p)


# --- per-gap accordion kernel -------------------------------------------------------

@dataclass
class GapBlock:
    """One block of an accordion run inside a gap, in disk angles.

    All arrays are indexed by jump within the block; ``stop`` is the index of
    the jump that ends the gap (or -1 if the gap continues past the block).
    """

    offset: int           # global index of the first jump of the block
    L: np.ndarray         # chart feet after each jump
    R: np.ndarray
    L_prev: np.ndarray
    R_prev: np.ndarray
    right: np.ndarray
    ang_L: np.ndarray     # disk angles of the feet after each jump
    ang_R: np.ndarray
    ang_L_prev: np.ndarray
    ang_R_prev: np.ndarray
    stop: int

    @property
    def size(self) -> int:
        return len(self.L) if self.stop < 0 else self.stop + 1

    def triangles(self) -> np.ndarray:
        n = self.size
        mid = np.where(self.right[:n], self.ang_R_prev[:n], self.ang_L_prev[:n])
        return np.stack([self.ang_L[:n], mid, self.ang_R[:n]], axis=1)

    def side_gaps(self) -> np.ndarray:
        n = self.size
        r = self.right[:n]
        start = np.where(r, self.ang_R_prev[:n], self.ang_L[:n])
        end = np.where(r, self.ang_R[:n], self.ang_L_prev[:n])
        return np.stack([start, end], axis=1)


def chart_inverse_angles(coeffs, x):
    """Disk angles of chart points x under the inverse of the gap chart."""
    a, b, c, d = coeffs
    return canonical_angle(np.angle((d * x - b) / (a - c * x)))


def chart_apply(coeffs, z):
    a, b, c, d = coeffs
    return (a * z + b) / (c * z + d)


class GapBudgetExceeded(RuntimeError):
    pass


def emit_mask(angles, resolution) -> np.ndarray:
    """Polygons that make it into a tiling: diameter >= δ and apexes apart.

    Apexes closer than the separation floor cannot be represented faithfully
    in double precision; such polygons are dropped and counted.
    """
    return (polygon_diameter(angles) >= resolution) & (min_separations(angles) > APEX_SEPARATION)


def triangle_gap_blocks(start, end, stream: RandomStream, resolution, jump_cutoff,
                        pin="derivative", law="zeta", block=BLOCK,
                        max_jumps=DEFAULT_MAX_JUMPS):
    """Yield GapBlocks of the accordion filling the gap (start, end).

    The last block yielded has ``stop >= 0``.  Raises GapBudgetExceeded if
    the remaining region is still above δ after ``max_jumps`` jumps.
    """
    coeffs = tuple(complex(v) for v in gap_chart_coeffs(start, end, pin))
    src = PoissonJumps(stream.generator(), jump_cutoff, law, block)
    L, R = -1.0, 1.0
    angL, angR = float(end), float(start)
    count = 0
    while True:
        y, sign, _ = src.next_block()
        Lb, Rb = advance(L, R, y, sign)
        right = sign > 0
        new_ang = chart_inverse_angles(coeffs, np.where(right, Rb, Lb))
        idx = np.arange(len(y))
        last_r = np.maximum.accumulate(np.where(right, idx, -1))
        last_l = np.maximum.accumulate(np.where(right, -1, idx))
        ang_R = np.where(last_r >= 0, new_ang[np.maximum(last_r, 0)], angR)
        ang_L = np.where(last_l >= 0, new_ang[np.maximum(last_l, 0)], angL)
        left_over = arc_region_diameter(ang_R, ang_L)
        hit = np.flatnonzero(left_over < resolution)
        stop = int(hit[0]) if hit.size else -1
        blk = GapBlock(count, Lb, Rb, np.concatenate(([L], Lb[:-1])),
                       np.concatenate(([R], Rb[:-1])), right, ang_L, ang_R,
                       np.concatenate(([angL], ang_L[:-1])), np.concatenate(([angR], ang_R[:-1])),
                       stop)
        yield blk
        if stop >= 0:
            return
        count += len(y)
        if count >= max_jumps:
            raise GapBudgetExceeded(f"gap ({start}, {end}) not resolved after {count} jumps")
        L, R, angL, angR = float(Lb[-1]), float(Rb[-1]), float(ang_L[-1]), float(ang_R[-1])


def fill_triangle_gap(start, end, stream, resolution, jump_cutoff, pin="derivative",
                      law="zeta", max_jumps=DEFAULT_MAX_JUMPS):
    """Triangles and child gaps (with their jump indices) of one gap.

    Returns (triangles, child gaps, child indices, number of degenerate drops).
    """
    tris, kids, kid_idx = [], [], []
    dropped = 0
    for blk in triangle_gap_blocks(start, end, stream, resolution, jump_cutoff, pin, law,
                                   max_jumps=max_jumps):
        t = blk.triangles()
        keep = emit_mask(t, resolution)
        dropped += int(np.count_nonzero(~keep & (polygon_diameter(t) >= resolution)))
        tris.append(t[keep])
        s = blk.side_gaps()
        big = arc_region_diameter(s[:, 0], s[:, 1]) >= resolution
        kids.append(s[big])
        kid_idx.append(blk.offset + np.flatnonzero(big))
    return np.concatenate(tris), np.concatenate(kids), np.concatenate(kid_idx), dropped


def root_gaps(angles) -> list[tuple[float, float]]:
    k = len(angles)
    return [(float(angles[i]), float(angles[(i + 1) % k])) for i in range(k)]


def _explore(root_gap, stream, fill, resolution, gap_filter):
    """Breadth-first filling of one root gap.

    Returns the polygon blocks, a partial flag and the degenerate-drop count.
    """
    out = []
    partial = False
    dropped = 0
    queue = deque([(root_gap[0], root_gap[1], stream)])
    while queue:
        start, end, st = queue.popleft()
        if arc_region_diameter(start, end) < resolution:
            continue
        if gap_filter is not None and not gap_filter(start, end):
            continue
        try:
            polys, kids, kid_idx, drop = fill(start, end, st)
        except GapBudgetExceeded:
            partial = True
            continue
        dropped += drop
        out.append(polys)
        for (s, e), i in zip(kids, kid_idx):
            queue.append((float(s), float(e), st.split(int(i))))
    return out, partial, dropped


def assemble(root_angles, seed_stream: RandomStream, fill, resolution, kind, meta,
             gap_filter=None, threads=None) -> Tiling:
    """Root polygon plus the fillings of its gaps, merged in gap order."""
    gaps = root_gaps(root_angles)
    streams = [seed_stream.split(i + 1) for i in range(len(gaps))]
    threads = threads or default_threads()
    work = list(zip(gaps, streams))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(work))) as pool:
            results = list(pool.map(lambda gs: _explore(gs[0], gs[1], fill, resolution,
                                                        gap_filter), work))
    else:
        results = [_explore(g, s, fill, resolution, gap_filter) for g, s in work]
    k = len(root_angles)
    parts = [np.asarray(root_angles, dtype=float).reshape(1, k)]
    partial = False
    dropped = 0
    for polys, flag, drop in results:
        parts.extend(p for p in polys if len(p))
        partial |= flag
        dropped += drop
    angles = np.concatenate(parts)
    meta = dict(meta)
    meta.update(count=len(angles), partial=partial, degenerate=dropped)
    return Tiling(angles, kind, meta)


def sample_disk_triangulation(seed: int, resolution: float, jump_cutoff: float | None = None, *,
                              pin: str = "derivative", law: str = "zeta", gap_filter=None,
                              threads: int | None = None,
                              max_jumps: int = DEFAULT_MAX_JUMPS) -> Tiling:
    """Sample the Markovian triangulation of the disk down to diameter δ."""
    if jump_cutoff is None:
        jump_cutoff = default_jump_cutoff(resolution)
    _check_resolution(resolution, jump_cutoff)
    stream = RandomStream(seed)
    root = sample_p0_angles(stream.split(0), 1)[0]

    def fill(s, e, st):
        return fill_triangle_gap(s, e, st, resolution, jump_cutoff, pin, law, max_jumps)

    meta = {"seed": int(seed), "resolution": float(resolution),
            "jump_cutoff": float(jump_cutoff), "model": DISK}
    if pin != "derivative":
        meta["pin"] = pin
    if law != "zeta":
        meta["law"] = law
    return assemble(root, stream, fill, resolution, "markov-triangles", meta, gap_filter, threads)


# --- lazy point location ---------------------------------------------------------------

def _gap_index(root_angles, zd):
    """Index of the root gap whose region contains the disk point zd."""
    k = len(root_angles)
    pts = np.exp(1j * np.asarray(root_angles, dtype=float))
    for i in range(k):
        a, b, c = pts[i], pts[(i + 1) % k], pts[(i + 2) % k]
        side = ((zd - a) / (zd - b)) * np.conj((c - a) / (c - b))
        if side.real < 0:
            return i
    return None


def _in_half_disk(w, lo, hi):
    return abs(w - (lo + hi) / 2.0) < (hi - lo) / 2.0


def locate_triangle(seed: int, z, resolution: float, jump_cutoff: float | None = None, *,
                    pin: str = "derivative", law: str = "zeta",
                    max_jumps: int = DEFAULT_MAX_JUMPS):
    """Apex angles of the triangle containing z, generating only what is needed.

    Gives exactly the polygon ``triangle_containing`` would find in the full
    tiling with the same arguments, or None when z falls below resolution.
    """
    if jump_cutoff is None:
        jump_cutoff = default_jump_cutoff(resolution)
    stream = RandomStream(seed)
    root = sample_p0_angles(stream.split(0), 1)[0]
    zd = complex(z)
    if _contains_disk(root[None, :], zd)[0]:
        return root
    i = _gap_index(root, zd)
    if i is None:
        return None
    start, end = root_gaps(root)[i]
    return locate_in_gap(start, end, stream.split(i + 1), zd, resolution, jump_cutoff,
                         pin, law, max_jumps)


def locate_in_gap(start, end, stream, zd, resolution, jump_cutoff, pin="derivative",
                  law="zeta", max_jumps=DEFAULT_MAX_JUMPS):
    while True:
        if arc_region_diameter(start, end) < resolution:
            return None
        coeffs = tuple(complex(v) for v in gap_chart_coeffs(start, end, pin))
        w = chart_apply(coeffs, zd)
        found = None
        try:
            for blk in triangle_gap_blocks(start, end, stream, resolution, jump_cutoff, pin, law,
                                           max_jumps=max_jumps):
                n = blk.size
                centre = (blk.L[:n] + blk.R[:n]) / 2.0
                below = np.abs(w - centre) < (blk.R[:n] - blk.L[:n]) / 2.0
                hit = np.flatnonzero(below)
                if hit.size:
                    found = (blk, int(hit[0]))
                    break
        except GapBudgetExceeded:
            return None
        if found is None:
            return None
        blk, k = found
        if blk.right[k]:
            in_side = _in_half_disk(w, blk.R_prev[k], blk.R[k])
        else:
            in_side = _in_half_disk(w, blk.L[k], blk.L_prev[k])
        if in_side:
            s = blk.side_gaps()[k]
            start, end = float(s[0]), float(s[1])
            stream = stream.split(blk.offset + k)
            continue
        tri = blk.triangles()[k]
        return tri if emit_mask(tri[None, :], resolution)[0] else None


# --- segment-targeted exploration --------------------------------------------------------

def segment_gap_filter(x_max: float, x_min: float = 0.0):
    """Gap filter keeping only gaps whose region meets the real segment [x_min, x_max]."""

    def inside(t, a, b, m):
        return (((t - a) / (t - b)) * ((m - a) / (m - b)).conjugate()).real > 0

    def keep(start, end):
        a, b = cmath.exp(1j * start), cmath.exp(1j * end)
        m = cmath.exp(1j * (start + ccw_sweep(start, end) / 2))
        kind, c, r = disk_geodesic_circle(a, b)
        cuts = [x_min, x_max]
        if kind == "circle":
            disc = r * r - c.imag ** 2
            if disc > 0:
                for t in (c.real - math.sqrt(disc), c.real + math.sqrt(disc)):
                    if x_min < t < x_max:
                        cuts.append(t)
        elif x_min < 0 < x_max:
            cuts.append(0.0)
        cuts.sort()
        probes = [(p + q) / 2 for p, q in zip(cuts[:-1], cuts[1:])]
        return any(inside(complex(t), a, b, m) for t in probes)

    return keep


# --- Farey reflection tiling ----------------------------------------------------------------

def _model_coords(poly: IdealPolygon):
    return [p.point for p in poly.apexes]


def _to_angles(coords, model):
    if model == DISK:
        return [canonical_angle(cmath.phase(c)) for c in coords]
    return [BoundaryPoint.halfplane(INF if c == INF else complex(c).real).angle for c in coords]


def farey_triangles(tau: IdealPolygon, resolution: float | None = None, depth: int | None = None):
    """Breadth-first reflection closure of ``tau`` in its own model.

    Returns a list of apex-coordinate triples (complex or ``INF``).  ``depth``
    counts generations with the root as generation 1; ``resolution`` stops at
    triangles whose disk diameter is below δ.  At least one bound is required.
    """
    if resolution is None and depth is None:
        raise ValueError("give a resolution or a depth")
    if len(tau) != 3:
        raise ValueError("the reflection tiling starts from a triangle")
    model = tau.model
    root = _model_coords(tau)

    def clean(z):
        if z == INF:
            return INF
        if model == DISK:
            return z / abs(z)
        return complex(z.real, 0.0)

    out = [root]
    queue = deque([(root, None, 1)])
    while queue:
        tri, parent_edge, gen = queue.popleft()
        if depth is not None and gen >= depth:
            continue
        for i in range(3):
            if i == parent_edge:
                continue
            a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            c2 = clean(reflect_boundary(c, a, b))
            # keep anticlockwise order: (a, c2, b) and note the shared edge index
            child = [a, c2, b]
            if resolution is not None:
                d = polygon_diameter(np.array(_to_angles(child, model)))
                if d < resolution:
                    continue
            out.append(child)
            queue.append((child, 2, gen + 1))
    return out


def farey_ref(tau: IdealPolygon | None = None, resolution: float | None = None,
              depth: int | None = None, seed: int | None = None) -> Tiling:
    """The reflection tiling generated by ``tau`` (or by a P0 triangle from ``seed``)."""
    if tau is None:
        if seed is None:
            raise ValueError("give a triangle or a seed for the randomized variant")
        tau = IdealPolygon.from_angles(sample_p0_angles(RandomStream(seed).split(0), 1)[0])
    tris = farey_triangles(tau, resolution, depth)
    angles = np.array([_to_angles(t, tau.model) for t in tris])
    meta = {"resolution": resolution, "depth": depth, "model": DISK}
    if seed is not None:
        meta["seed"] = int(seed)
    meta["count"] = len(angles)
    return Tiling(angles, "farey", meta)


def locate_farey(seed: int, z, max_steps: int = 100_000):
    """Triangle of the randomized reflection tiling containing z, by a reflection walk.

    Starting at the root, repeatedly reflect across an edge that separates
    the current triangle from z.
    """
    tri = sample_p0_angles(RandomStream(seed).split(0), 1)[0]
    pts = list(np.exp(1j * tri))
    zd = complex(z)
    for _ in range(max_steps):
        moved = False
        for i in range(3):
            a, b, c = pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]
            side = ((zd - a) / (zd - b)) * ((c - a) / (c - b)).conjugate()
            if side.real < 0:
                c2 = reflect_boundary(c, a, b)
                pts = [a, c2 / abs(c2), b]
                moved = True
                break
        if not moved:
            return canonical_angle(np.angle(np.array(pts)))
    return None


def stern_brocot_oracle(depth: int) -> set:
    """Exact apexes of the reflection closure of (0, 1, ∞) to ``depth`` generations.

    Independent of the floating-point reflection: adjacent Farey fractions
    p/q, r/s span an edge whose two triangles have third apexes at the mediant
    (p+r)/(q+s) and at (p-r)/(q-s).  Infinity is 1/0.
    """

    def reflect(a, b, c):
        (p, q), (r, s) = a, b
        for cand in ((p + r, q + s), (p - r, q - s)):
            if cand[1] < 0 or (cand[1] == 0 and cand[0] < 0):
                cand = (-cand[0], -cand[1])
            if cand != c:
                return cand
        raise AssertionError("no reflected apex")

    root = ((0, 1), (1, 1), (1, 0))
    seen = set(root)
    queue = deque([(root, None, 1)])
    while queue:
        tri, parent, gen = queue.popleft()
        if gen >= depth:
            continue
        for i in range(3):
            if i == parent:
                continue
            a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            c2 = reflect(a, b, c)
            seen.add(c2)
            queue.append(((a, c2, b), 2, gen + 1))
    return {INF if q == 0 else Fraction(p, q) for p, q in seen}
