"""The Markovian quadrangulation: square jumps and the square accordion.

A square jump is the square (-1, 1, x1, x2) over the normalized arch (-1, 1).
Regularity of the square pins x2 given x1: in y = (x - 1)/(x + 1) it reads
y2 = 2 y1.  With x1 drawn from ζ this gives three kinds of jump:

  I2  1 < x1 < x2      only the right foot moves, to x2
  I1  x1 < x2 < -1     only the left foot moves, to x1
  II  x2 < -1 < 1 < x1 both feet move, to (x2, x1)

Type II happens exactly when y1 > 1/2, i.e. x1 > 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .accordion import BLOCK, DEFAULT_MAX_JUMPS, PoissonJumps
from .geom import (DISK, HALFPLANE, INF, STANDARD_SQUARE, GeometryError, IdealPolygon,
                   arc_region_diameter, gap_chart_coeffs, mobius_from_triples, polygon_diameter)
from .measures import sample_p0_square_angles, tail_mass, zeta_magnitude_y
from .rng import RandomStream, as_generator
from .tiling import (GapBudgetExceeded, Tiling, _contains_disk, _gap_index, _in_half_disk,
                     assemble, chart_apply, chart_inverse_angles, default_jump_cutoff, emit_mask,
                     root_gaps, _check_resolution)

I1, I2, II = "I1", "I2", "II"
TYPE_II_THRESHOLD = 3.0  # x1 above this gives a type-II square
BOUNDARY_GUARD = 1e-12


class SquareBoundaryError(GeometryError):
    """x1 sits on the I2/II transition, where x2 is at infinity."""


@dataclass(frozen=True)
class SquareJump:
    x1: float
    x2: float
    kind: str

    def residual(self) -> float:
        y1 = (self.x1 - 1) / (self.x1 + 1)
        y2 = (self.x2 - 1) / (self.x2 + 1)
        return abs(y2 - 2 * y1) / max(1.0, abs(2 * y1))


def classify(x1: float, x2: float) -> str:
    """Kind of the square (-1, 1, x1, x2) from the apex ordering alone."""
    if 1 < x1 < x2:
        return I2
    if x1 < x2 < -1:
        return I1
    if x2 < -1 and x1 > 1:
        return II
    raise GeometryError(f"(-1, 1, {x1}, {x2}) is not an anticlockwise square")


def rho4_pair(x1: float) -> SquareJump:
    """Complete x1 to the regular square (-1, 1, x1, x2)."""
    if not abs(x1) > 1:
        raise GeometryError("square jumps need |x1| > 1")
    y1 = (x1 - 1.0) / (x1 + 1.0)
    if abs(2.0 * y1 - 1.0) < BOUNDARY_GUARD:
        raise SquareBoundaryError(f"x1 = {x1} is on the type boundary (x2 at infinity)")
    y2 = 2.0 * y1
    x2 = (1.0 + y2) / (1.0 - y2)
    return SquareJump(float(x1), float(x2), classify(x1, x2))


def cross_ratio(a, b, c, d):
    """(a - c)(b - d)/((a - d)(b - c)); equals 2 for a regular square."""
    return ((a - c) * (b - d)) / ((a - d) * (b - c))


def regularity_residual(angles) -> np.ndarray:
    """|CR - 2| for squares given by disk apex angles (rows)."""
    z = np.exp(1j * np.atleast_2d(np.asarray(angles, dtype=float)))
    return np.abs(cross_ratio(z[:, 0], z[:, 1], z[:, 2], z[:, 3]) - 2.0)


def fourth_vertex(a, b, c, model: str = DISK):
    """The point d making (a, b, c, d) a regular square.

    Maps (a, b, c) to (1, i, -1) and pulls back -i.
    """
    std = [STANDARD_SQUARE[0], STANDARD_SQUARE[1], STANDARD_SQUARE[2]]
    m = mobius_from_triples([a, b, c], std, source=model, target=DISK)
    from .geom import BoundaryPoint
    return m.inverse()(BoundaryPoint.disk(STANDARD_SQUARE[3])).value


def sample_p0_square(rng) -> IdealPolygon:
    return IdealPolygon.from_angles(sample_p0_square_angles(rng, 1)[0])


# --- square jump kernel ---------------------------------------------------------------

def square_steps(y, sign):
    """Relative foot increments of a block of square jumps.

    Returns (rR, rL, extra, kind_code): increments of R and -L in units of
    the arch width before the jump, the offset of the extra apex (from the
    moving foot, same units; NaN for type II), and 0/1/2 for I1/I2/II.
    """
    right = sign > 0
    two = right & (y > 0.5)
    one_r = right & ~two
    rR = np.where(one_r, 2 * y / (1 - 2 * y), np.where(two, y / (1 - y), 0.0))
    with np.errstate(divide="ignore"):
        rL = np.where(~right, y / (1 - y), np.where(two, 1.0 / (2 * y - 1), 0.0))
    extra = np.where(one_r, y / (1 - y), np.where(~right, y / (2 - y), np.nan))
    code = np.where(~right, 0, np.where(two, 2, 1))
    return rR, rL, extra, code


def square_advance(L0, R0, y, sign):
    rR, rL, extra, code = square_steps(y, sign)
    d0 = R0 - L0
    delta = d0 * np.cumprod(1.0 + rR + rL)
    prev = np.concatenate(([d0], delta[:-1]))
    R = R0 + np.cumsum(prev * rR)
    L = L0 - np.cumsum(prev * rL)
    Lp = np.concatenate(([L0], L[:-1]))
    Rp = np.concatenate(([R0], R[:-1]))
    # extra apex: right of the old right foot (I2) or left of the old left foot (I1)
    p = np.where(code == 1, Rp + prev * extra, np.where(code == 0, Lp - prev * extra, np.nan))
    return L, R, Lp, Rp, p, code


def guard_jumps(y, sign):
    """Drop jumps on the I2/II boundary, a ζ-null set."""
    ok = ~((sign > 0) & (np.abs(2 * y - 1) < BOUNDARY_GUARD))
    return y[ok], sign[ok]


def chart_residuals(L, R, Lp, Rp, p, code):
    """Regularity of each square in its own arch chart (relative y2 - 2 y1)."""
    def norm(x):
        return (2 * x - (Lp + Rp)) / (Rp - Lp)

    x1 = np.where(code == 1, norm(p), np.where(code == 0, norm(L), norm(R)))
    x2 = np.where(code == 1, norm(R), np.where(code == 0, norm(p), norm(L)))
    y1 = (x1 - 1) / (x1 + 1)
    y2 = (x2 - 1) / (x2 + 1)
    return np.abs(y2 - 2 * y1) / np.maximum(1.0, np.abs(2 * y1))


@dataclass
class SquareBlock:
    offset: int
    L: np.ndarray
    R: np.ndarray
    L_prev: np.ndarray
    R_prev: np.ndarray
    code: np.ndarray
    ang_L: np.ndarray
    ang_R: np.ndarray
    ang_L_prev: np.ndarray
    ang_R_prev: np.ndarray
    ang_p: np.ndarray
    p: np.ndarray
    stop: int

    @property
    def size(self) -> int:
        return len(self.L) if self.stop < 0 else self.stop + 1

    def squares(self) -> np.ndarray:
        n = self.size
        c = self.code[:n]
        lp, rp = self.ang_L_prev[:n], self.ang_R_prev[:n]
        l, r, q = self.ang_L[:n], self.ang_R[:n], self.ang_p[:n]
        third = np.where(c == 1, q, np.where(c == 0, l, r))
        fourth = np.where(c == 1, r, np.where(c == 0, q, l))
        return np.stack([lp, rp, third, fourth], axis=1)

    def side_gaps(self) -> np.ndarray:
        """(n, 2, 2): the two side gaps of each square."""
        n = self.size
        c = self.code[:n]
        lp, rp = self.ang_L_prev[:n], self.ang_R_prev[:n]
        l, r, q = self.ang_L[:n], self.ang_R[:n], self.ang_p[:n]
        g0 = np.where((c == 1)[:, None], np.stack([rp, q], 1),
                      np.where((c == 0)[:, None], np.stack([l, q], 1), np.stack([rp, r], 1)))
        g1 = np.where((c == 1)[:, None], np.stack([q, r], 1),
                      np.where((c == 0)[:, None], np.stack([q, lp], 1), np.stack([l, lp], 1)))
        return np.stack([g0, g1], axis=1)

    def chart_side_gaps(self, k: int):
        c = self.code[k]
        lp, rp, l, r, q = self.L_prev[k], self.R_prev[k], self.L[k], self.R[k], self.p[k]
        if c == 1:
            return [(rp, q), (q, r)]
        if c == 0:
            return [(l, q), (q, lp)]
        return [(rp, r), (l, lp)]

    def residuals(self) -> np.ndarray:
        n = self.size
        return chart_residuals(self.L[:n], self.R[:n], self.L_prev[:n], self.R_prev[:n],
                               self.p[:n], self.code[:n])


def _last_index(mask):
    idx = np.arange(len(mask))
    return np.maximum.accumulate(np.where(mask, idx, -1))


def square_gap_blocks(start, end, stream: RandomStream, resolution, jump_cutoff,
                      pin="derivative", law="zeta", block=BLOCK, max_jumps=DEFAULT_MAX_JUMPS):
    coeffs = tuple(complex(v) for v in gap_chart_coeffs(start, end, pin))
    src = PoissonJumps(stream.generator(), jump_cutoff, law, block)
    L, R = -1.0, 1.0
    angL, angR = float(end), float(start)
    count = 0
    while True:
        y, sign, _ = src.next_block()
        y, sign = guard_jumps(y, sign)
        if len(y) == 0:
            continue
        Lb, Rb, Lp, Rp, p, code = square_advance(L, R, y, sign)
        mvR = code != 0
        mvL = code != 1
        newR = chart_inverse_angles(coeffs, Rb)
        newL = chart_inverse_angles(coeffs, Lb)
        ang_p = np.where(code == 2, np.nan, chart_inverse_angles(coeffs, np.where(code == 2, 0.0, p)))
        lr, ll = _last_index(mvR), _last_index(mvL)
        ang_R = np.where(lr >= 0, newR[np.maximum(lr, 0)], angR)
        ang_L = np.where(ll >= 0, newL[np.maximum(ll, 0)], angL)
        left_over = arc_region_diameter(ang_R, ang_L)
        hit = np.flatnonzero(left_over < resolution)
        stop = int(hit[0]) if hit.size else -1
        yield SquareBlock(count, Lb, Rb, Lp, Rp, code, ang_L, ang_R,
                          np.concatenate(([angL], ang_L[:-1])),
                          np.concatenate(([angR], ang_R[:-1])), ang_p, p, stop)
        if stop >= 0:
            return
        count += len(y)
        if count >= max_jumps:
            raise GapBudgetExceeded(f"gap ({start}, {end}) not resolved after {count} jumps")
        L, R, angL, angR = float(Lb[-1]), float(Rb[-1]), float(ang_L[-1]), float(ang_R[-1])


def fill_square_gap(start, end, stream, resolution, jump_cutoff, pin="derivative", law="zeta",
                    max_jumps=DEFAULT_MAX_JUMPS, residuals=None):
    sq, kids, kid_idx = [], [], []
    dropped = 0
    for blk in square_gap_blocks(start, end, stream, resolution, jump_cutoff, pin, law,
                                 max_jumps=max_jumps):
        s = blk.squares()
        keep = emit_mask(s, resolution)
        dropped += int(np.count_nonzero(~keep & (polygon_diameter(s) >= resolution)))
        sq.append(s[keep])
        if residuals is not None:
            residuals.append(float(blk.residuals().max()))
        g = blk.side_gaps().reshape(-1, 2)
        big = arc_region_diameter(g[:, 0], g[:, 1]) >= resolution
        kids.append(g[big])
        kid_idx.append(2 * blk.offset + np.flatnonzero(big))
    return np.concatenate(sq), np.concatenate(kids), np.concatenate(kid_idx), dropped


def sample_disk_quadrangulation(seed: int, resolution: float, jump_cutoff: float | None = None,
                                *, pin: str = "derivative", law: str = "zeta", gap_filter=None,
                                threads: int | None = None,
                                max_jumps: int = DEFAULT_MAX_JUMPS) -> Tiling:
    """Sample the Markovian quadrangulation of the disk down to diameter δ."""
    if jump_cutoff is None:
        jump_cutoff = default_jump_cutoff(resolution)
    _check_resolution(resolution, jump_cutoff)
    stream = RandomStream(seed)
    root = sample_p0_square_angles(stream.split(0), 1)[0]
    residuals: list = []

    def fill(s, e, st):
        res: list = []
        out = fill_square_gap(s, e, st, resolution, jump_cutoff, pin, law, max_jumps, res)
        residuals.extend(res)  # list.extend is atomic under the GIL
        return out

    meta = {"seed": int(seed), "resolution": float(resolution),
            "jump_cutoff": float(jump_cutoff), "model": DISK}
    t = assemble(root, stream, fill, resolution, "markov-squares", meta, gap_filter, threads)
    t.meta["max_regularity_residual"] = max(residuals, default=0.0)
    return t


def locate_square(seed: int, z, resolution: float, jump_cutoff: float | None = None, *,
                  pin: str = "derivative", law: str = "zeta", max_jumps: int = DEFAULT_MAX_JUMPS):
    """Apex angles of the square containing z, or None below resolution."""
    if jump_cutoff is None:
        jump_cutoff = default_jump_cutoff(resolution)
    stream = RandomStream(seed)
    root = sample_p0_square_angles(stream.split(0), 1)[0]
    zd = complex(z)
    if _contains_disk(root[None, :], zd)[0]:
        return root
    i = _gap_index(root, zd)
    if i is None:
        return None
    start, end = root_gaps(root)[i]
    stream = stream.split(i + 1)
    while True:
        if arc_region_diameter(start, end) < resolution:
            return None
        coeffs = tuple(complex(v) for v in gap_chart_coeffs(start, end, pin))
        w = chart_apply(coeffs, zd)
        found = None
        try:
            for blk in square_gap_blocks(start, end, stream, resolution, jump_cutoff, pin, law,
                                         max_jumps=max_jumps):
                n = blk.size
                below = np.abs(w - (blk.L[:n] + blk.R[:n]) / 2) < (blk.R[:n] - blk.L[:n]) / 2
                hit = np.flatnonzero(below)
                if hit.size:
                    found = (blk, int(hit[0]))
                    break
        except GapBudgetExceeded:
            return None
        if found is None:
            return None
        blk, k = found
        sides = blk.chart_side_gaps(k)
        which = [j for j, (lo, hi) in enumerate(sides) if _in_half_disk(w, lo, hi)]
        if which:
            j = which[0]
            g = blk.side_gaps()[k, j]
            start, end = float(g[0]), float(g[1])
            stream = stream.split(2 * (blk.offset + k) + j)
            continue
        sq = blk.squares()[k]
        return sq if emit_mask(sq[None, :], resolution)[0] else None


# --- the square jump process on its own ------------------------------------------------

@dataclass
class SquareJumpRun:
    x1: np.ndarray
    x2: np.ndarray
    code: np.ndarray   # 0 = I1, 1 = I2, 2 = II
    times: np.ndarray  # arrival times

    @property
    def kinds(self) -> list[str]:
        return [(I1, I2, II)[c] for c in self.code]


def sample_square_jumps(rng, jump_cutoff: float, n: int | None = None,
                        horizon: float | None = None) -> SquareJumpRun:
    """Square jumps with x1 ~ ζ above 1 + ε, by count or up to a time horizon."""
    if (n is None) == (horizon is None):
        raise ValueError("give exactly one of n or horizon")
    src = PoissonJumps(rng, jump_cutoff, block=4096)
    ys, ss, ts = [], [], []
    total, t_last = 0, 0.0
    while True:
        y, sign, dt = src.next_block()
        t = t_last + np.cumsum(dt)
        ys.append(y), ss.append(sign), ts.append(t)
        total += len(y)
        t_last = float(t[-1])
        if (n is not None and total >= n) or (horizon is not None and t_last >= horizon):
            break
    y, sign, t = np.concatenate(ys), np.concatenate(ss), np.concatenate(ts)
    if n is not None:
        y, sign, t = y[:n], sign[:n], t[:n]
    else:
        keep = t < horizon
        y, sign, t = y[keep], sign[keep], t[keep]
    ok = ~((sign > 0) & (np.abs(2 * y - 1) < BOUNDARY_GUARD))
    y, sign, t = y[ok], sign[ok], t[ok]
    Y1 = np.where(sign > 0, y, 1.0 / y)
    x1 = (1 + Y1) / (1 - Y1)
    Y2 = 2 * Y1
    x2 = (1 + Y2) / (1 - Y2)
    code = np.where(sign < 0, 0, np.where(y > 0.5, 2, 1))
    return SquareJumpRun(x1, x2, code, t)


def type_ii_rate(threshold: float = TYPE_II_THRESHOLD) -> float:
    """ζ-mass of {x1 > threshold}: ln((t + 1)/(t - 1))."""
    return tail_mass(threshold) / 2.0


def brute_force_transition(lo: float = 1.0 + 1e-6, hi: float = 20.0, n: int = 200_001) -> float:
    """Locate the I2/II transition by classifying squares on a grid of x1 > 1."""
    xs = np.linspace(lo, hi, n)
    kinds = []
    for x in xs:
        try:
            kinds.append(rho4_pair(float(x)).kind)
        except SquareBoundaryError:
            kinds.append("boundary")
    kinds = np.array(kinds)
    first_ii = np.flatnonzero(kinds == II)[0]
    return float((xs[first_ii - 1] + xs[first_ii]) / 2)
