"""The accordion: a chain of ideal triangles grown from an arch by Poisson jumps.

In the normalized half-plane chart the arch starts at (L, R) = (-1, 1).  A jump
x with |x| > 1 is read in the chart that maps the current arch to (-1, 1):
x > 1 moves the right foot, x < -1 the left foot, and the width R - L is
multiplied by (|x| + 1)/2.  The triangle between the old and new arch is
emitted together with its outer side edge, which bounds a fresh gap.

Jumps come in blocks so that the arch positions of a whole block are obtained
from one cumulative product and two cumulative sums.  Internally a jump is
stored as its sign and y = (|x| - 1)/(|x| + 1), the coordinate in which ζ is
dy/y; the width factor is then 1/(1 - y) with no cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import IdealPolygon
from .measures import InfiniteMassError, tail_mass, zeta_magnitude_y
from .rng import as_generator

DEFAULT_MAX_JUMPS = 10_000_000
BLOCK = 64
LAWS = ("zeta", "corrupt")


class InvalidJumpError(ValueError):
    pass


class AccordionBudgetExceeded(RuntimeError):
    """The stop rule was not met within the jump budget; ``partial`` has the run so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class JumpEvent:
    x: float
    index: int
    time: float = math.nan

    def __post_init__(self):
        if not abs(self.x) > 1:
            raise InvalidJumpError(f"normalized jumps need |x| > 1, got {self.x}")


@dataclass(frozen=True)
class AccordionState:
    L: float = -1.0
    R: float = 1.0
    jumps: tuple = ()
    side_gaps: tuple = ()

    def __post_init__(self):
        if not self.L < self.R:
            raise ValueError("arch feet must satisfy L < R")

    @property
    def delta(self) -> float:
        return self.R - self.L


def apply_jump(state: AccordionState, x: float):
    """One accordion step; returns the new state and the triangle it creates."""
    if not abs(x) > 1:
        raise InvalidJumpError(f"normalized jumps need |x| > 1, got {x}")
    L, R = state.L, state.R
    grow = (R - L) * (abs(x) - 1.0) / 2.0  # Δ' - Δ
    event = JumpEvent(float(x), len(state.jumps))
    if x > 1:
        R2 = R + grow
        tri, side, L2 = (L, R, R2), (R, R2), L
    else:
        L2 = L - grow
        tri, side, R2 = (L2, L, R), (L2, L), R
    new = AccordionState(L2, R2, state.jumps + (event,), state.side_gaps + (side,))
    return new, IdealPolygon.from_reals(tri)


def recover_jump(L_prev, R_prev, L_next, R_next):
    """Normalized jump from two consecutive arches: x = ±(2Δ'/Δ - 1)."""
    L_prev, R_prev = np.asarray(L_prev, float), np.asarray(R_prev, float)
    L_next, R_next = np.asarray(L_next, float), np.asarray(R_next, float)
    sign = np.where(R_next > R_prev, 1.0, -1.0)
    return sign * (2.0 * (R_next - L_next) / (R_prev - L_prev) - 1.0)


# --- jump sources -----------------------------------------------------------------

class PoissonJumps:
    """Blocks of i.i.d. jumps above 1 + ε with exponential waiting times.

    ``law='zeta'`` is the accordion intensity 2 dx/(x² - 1).  ``law='corrupt'``
    swaps in dx/x² tails; it exists only to check that the test harness can
    tell the difference.  Per block the draw order is fixed: 2B uniforms
    (magnitudes, then signs), then B standard exponentials.
    """

    def __init__(self, rng, jump_cutoff: float, law: str = "zeta", block: int = BLOCK):
        if not jump_cutoff > 0:
            raise InfiniteMassError("jump cutoff ε must be positive")
        if law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}")
        self.gen = as_generator(rng)
        self.x0 = 1.0 + jump_cutoff
        self.law = law
        self.block = block
        self.rate = tail_mass(self.x0) if law == "zeta" else 2.0 / self.x0

    def next_block(self):
        B = self.block
        u = self.gen.random(2 * B)
        dt = self.gen.standard_exponential(B) / self.rate
        mag = 1.0 - u[:B]
        sign = np.where(u[B:] < 0.5, 1.0, -1.0)
        if self.law == "zeta":
            y = zeta_magnitude_y(mag, self.x0)
        else:
            ax = self.x0 / mag
            y = (ax - 1.0) / (ax + 1.0)
        return y, sign, dt


class ForcedJumps:
    """Deterministic jump source for tests: replays the given x values."""

    def __init__(self, xs, dt: float = 1.0):
        xs = np.asarray(list(xs), dtype=float)
        if np.any(np.abs(xs) <= 1):
            raise InvalidJumpError("forced jumps need |x| > 1")
        self.xs = xs
        self.pos = 0
        self.dt = dt
        self.block = max(len(xs), 1)

    def next_block(self):
        if self.pos >= len(self.xs):
            raise StopIteration("forced jump list exhausted")
        xs = self.xs[self.pos:]
        self.pos = len(self.xs)
        ax = np.abs(xs)
        return (ax - 1.0) / (ax + 1.0), np.sign(xs), np.full(len(xs), self.dt)


def make_source(rng=None, jump_cutoff: float = 1e-3, law: str = "zeta", jumps=None,
                block: int = BLOCK):
    if jumps is not None:
        return jumps if hasattr(jumps, "next_block") else ForcedJumps(jumps)
    return PoissonJumps(rng, jump_cutoff, law, block)


def advance(L0: float, R0: float, y, sign):
    """Arch feet after each jump of a block (vectorized recursion)."""
    delta0 = R0 - L0
    delta = delta0 * np.cumprod(1.0 / (1.0 - y))
    prev = np.concatenate(([delta0], delta[:-1]))
    inc = prev * (y / (1.0 - y))
    R = R0 + np.cumsum(np.where(sign > 0, inc, 0.0))
    L = L0 - np.cumsum(np.where(sign < 0, inc, 0.0))
    return L, R


# --- runs ---------------------------------------------------------------------------

@dataclass
class AccordionRun:
    """Arrays describing an accordion; entry k is the state after jump k."""

    L0: float
    R0: float
    y: np.ndarray
    sign: np.ndarray
    times: np.ndarray
    L: np.ndarray
    R: np.ndarray
    stopped: bool = True
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.y)

    @property
    def x(self) -> np.ndarray:
        return self.sign * (1.0 + self.y) / (1.0 - self.y)

    @property
    def L_prev(self) -> np.ndarray:
        return np.concatenate(([self.L0], self.L[:-1]))

    @property
    def R_prev(self) -> np.ndarray:
        return np.concatenate(([self.R0], self.R[:-1]))

    @property
    def triangles(self) -> np.ndarray:
        """(n, 3) anticlockwise half-plane apexes of the emitted triangles."""
        right = self.sign > 0
        mid = np.where(right, self.R_prev, self.L_prev)
        return np.stack([self.L, mid, self.R], axis=1) if len(self) else np.zeros((0, 3))

    @property
    def side_gaps(self) -> np.ndarray:
        """(n, 2) feet of the side edges, each ordered left to right."""
        right = self.sign > 0
        a = np.where(right, self.R_prev, self.L)
        b = np.where(right, self.R, self.L_prev)
        return np.stack([a, b], axis=1) if len(self) else np.zeros((0, 2))

    @property
    def final_arch(self) -> tuple[float, float]:
        if len(self) == 0:
            return self.L0, self.R0
        return float(self.L[-1]), float(self.R[-1])

    @property
    def state(self) -> AccordionState:
        events = tuple(JumpEvent(float(x), i, float(t))
                       for i, (x, t) in enumerate(zip(self.x, np.cumsum(self.times))))
        sides = tuple(tuple(map(float, s)) for s in self.side_gaps)
        L, R = self.final_arch
        return AccordionState(L, R, events, sides)


def build_accordion(arch=(-1.0, 1.0), rng=None, jump_cutoff: float = 1e-3, stop=None, *,
                    n_jumps: int | None = None, max_jumps: int = DEFAULT_MAX_JUMPS,
                    jumps=None, law: str = "zeta", block: int = BLOCK) -> AccordionRun:
    """Grow an accordion from ``arch`` until ``stop`` holds.

    ``stop(L, R, k)`` receives arrays of arch feet after jumps k = 1, 2, ...
    and returns a boolean array; the run ends at the first True, including
    that jump.  ``n_jumps`` is a shortcut for stopping after exactly that many
    jumps.  ``jumps`` replaces the Poisson source (a list of x values or an
    object with ``next_block``).
    """
    L0, R0 = float(arch[0]), float(arch[1])
    if not L0 < R0:
        raise ValueError("arch needs L0 < R0")
    if stop is None and n_jumps is None:
        raise ValueError("give a stop predicate or n_jumps")
    if n_jumps is not None:
        target = int(n_jumps)
        stop = (lambda L, R, k: k >= target)
    src = make_source(rng, jump_cutoff, law, jumps, block)
    ys, signs, dts, Ls, Rs = [], [], [], [], []
    L, R, count = L0, R0, 0
    stopped = False
    while count < max_jumps:
        try:
            y, sign, dt = src.next_block()
        except StopIteration:
            break
        y, sign, dt = y[: max_jumps - count], sign[: max_jumps - count], dt[: max_jumps - count]
        Lb, Rb = advance(L, R, y, sign)
        k = count + 1 + np.arange(len(y))
        hit = np.flatnonzero(stop(Lb, Rb, k))
        if hit.size:
            n = hit[0] + 1
            y, sign, dt, Lb, Rb = y[:n], sign[:n], dt[:n], Lb[:n], Rb[:n]
            stopped = True
        ys.append(y), signs.append(sign), dts.append(dt), Ls.append(Lb), Rs.append(Rb)
        count += len(y)
        L, R = float(Lb[-1]), float(Rb[-1])
        if stopped:
            break

    def cat(parts):
        return np.concatenate(parts) if parts else np.zeros(0)

    run = AccordionRun(L0, R0, cat(ys), cat(signs), cat(dts), cat(Ls), cat(Rs), stopped)
    if not stopped:
        raise AccordionBudgetExceeded(
            f"stop rule not met after {count} jumps (budget {max_jumps})", run)
    return run


@dataclass(frozen=True)
class Disconnection:
    prefix: np.ndarray  # (k-1, 3) triangles before the disconnecting one
    triangle: tuple     # the triangle created when the target got separated
    run: AccordionRun


def grow_until_disconnect(arch, target: float, rng=None, jump_cutoff: float = 1e-3, *,
                          jumps=None, law: str = "zeta", max_jumps: int = DEFAULT_MAX_JUMPS):
    """Grow from ``arch`` until the first arch with L < target < R."""
    L0, R0 = float(arch[0]), float(arch[1])
    a = float(target)
    if L0 <= a <= R0:
        raise ValueError(f"target {a} lies on the initial arch [{L0}, {R0}]")
    run = build_accordion((L0, R0), rng, jump_cutoff, lambda L, R, k: (L < a) & (a < R),
                          jumps=jumps, law=law, max_jumps=max_jumps)
    tris = run.triangles
    return Disconnection(tris[:-1], tuple(float(t) for t in tris[-1]), run)
