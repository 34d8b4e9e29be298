"""Estimators and two-sample tests that turn the sampler's laws into checks.

Every routine is a deterministic function of its seed.  Triangle laws are
compared through the sorted harmonic measures of the polygon's sides seen
from the reference point, which do not change under Möbius maps.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special, stats as sps

from .accordion import build_accordion, grow_until_disconnect
from .geom import (CAYLEY, TAU, angle_to_real, canonical_angle, fix_pm1_scaling,
                   harmonic_measures, real_to_angle)
from .measures import (duality_residuals, random_admissible_triples, sample_p0_angles,
                       sample_p0_square_angles)
from .ngon import locate_square
from .rng import RandomStream
from .tiling import (locate_farey, locate_triangle, sample_disk_triangulation,
                     segment_gap_filter)

MODES = ("mobius", "reversibility", "target", "markov")
MIN_N = 1000


@dataclass
class TestReport:
    """Outcome of one check; ``passed`` follows from (p_value or statistic, alpha)."""

    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: float | None = None
    alpha: float = 0.05
    n: tuple = ()
    seed: int | None = None
    slope: float | None = None
    stderr: float | None = None
    tolerance: float | None = None
    strict: bool = False
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.p_value is not None:
            return self.p_value > self.alpha
        if self.tolerance is not None:
            if self.strict:
                return self.statistic < self.tolerance
            return self.statistic <= self.tolerance
        raise ValueError("report has neither a p-value nor a tolerance")

    def to_json(self) -> str:
        d = asdict(self)
        d["passed"] = self.passed
        d["n"] = list(self.n)
        return json.dumps(d, default=_jsonable, sort_keys=True)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v)}")


# --- generic tests ------------------------------------------------------------------

def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    en = a.size * b.size / (a.size + b.size)
    p = float(special.kolmogorov(math.sqrt(en) * d)) if d > 0 else 1.0
    return d, min(max(p, 0.0), 1.0)


def holm(pvalues) -> np.ndarray:
    """Holm step-down adjusted p-values."""
    p = np.asarray(pvalues, dtype=float)
    m = p.size
    order = np.argsort(p)
    adj = np.empty(m)
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p[idx])
        adj[idx] = min(running, 1.0)
    return adj


def ks_family(a, b) -> tuple[float, float, list]:
    """KS on each column of two samples, Holm-combined.

    Returns (largest statistic, smallest adjusted p-value, per-column results).
    """
    a = np.atleast_2d(np.asarray(a, dtype=float).T).T
    b = np.atleast_2d(np.asarray(b, dtype=float).T).T
    res = [ks_two_sample(a[:, j], b[:, j]) for j in range(a.shape[1])]
    adj = holm([p for _, p in res])
    return max(d for d, _ in res), float(adj.min()), res


def energy_test(x, y, permutations: int = 200, rng=0, chunk: int = 1024):
    """Two-sample energy test with a permutation p-value.

    The statistic is 2 E|X - Y| - E|X - X'| - E|Y - Y'| (V-statistic form).
    All permutations are evaluated together: with pooled distances D and a
    0/1 label matrix S, the within-sample sums are diag(SᵀDS).
    """
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    y = np.asarray(y, dtype=float).reshape(len(y), -1)
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise ValueError("both samples must be non-empty")
    z = np.concatenate([x, y])
    N = n + m
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    labels = np.zeros((N, permutations + 1))
    labels[:n, 0] = 1.0
    for j in range(1, permutations + 1):
        labels[gen.permutation(N)[:n], j] = 1.0
    sds = np.zeros(permutations + 1)
    row_sums = np.zeros(N)
    for lo in range(0, N, chunk):
        hi = min(N, lo + chunk)
        d = np.sqrt(((z[lo:hi, None, :] - z[None, :, :]) ** 2).sum(-1))
        row_sums[lo:hi] = d.sum(1)
        sds += np.einsum("ij,ij->j", labels[lo:hi], d @ labels)
    total = row_sums.sum()
    sd1 = labels.T @ row_sums              # sᵀ D 1
    xx = sds
    xy = sd1 - sds
    yy = total - 2 * sd1 + sds
    e = 2 * xy / (n * m) - xx / n ** 2 - yy / m ** 2
    p = (1 + np.count_nonzero(e[1:] >= e[0])) / (permutations + 1)
    return float(e[0]), float(p)


# --- per-mode samplers ----------------------------------------------------------------

def derived_seeds(seed: int, tag: int, n: int) -> np.ndarray:
    """n tiling seeds for one arm of a test, independent across (seed, tag)."""
    return np.random.SeedSequence([int(seed), int(tag)]).generate_state(n, dtype=np.uint64)


def sorted_harmonic(z, angles) -> np.ndarray:
    return np.sort(harmonic_measures(z, angles), axis=1)


def _locate(sampler, s, z, resolution, jump_cutoff, law):
    if sampler == "tri":
        return locate_triangle(int(s), z, resolution, jump_cutoff, law=law)
    if sampler == "quad":
        return locate_square(int(s), z, resolution, jump_cutoff, law=law)
    if sampler == "farey":
        return locate_farey(int(s), z)
    raise ValueError(f"unknown sampler {sampler!r}")


def mobius_scalars(seed: int, tag: int, n: int, z0: complex = 0.5, resolution: float = 1e-4,
                   jump_cutoff: float | None = None, sampler: str = "tri", law: str = "zeta"):
    """Sorted harmonic measures at z0 of the polygon containing z0, n tilings."""
    rows, missing = [], 0
    for s in derived_seeds(seed, tag, n):
        poly = _locate(sampler, s, z0, resolution, jump_cutoff, law)
        if poly is None:
            missing += 1
            continue
        rows.append(poly)
    return sorted_harmonic(z0, np.array(rows)), missing


def mapped_root_scalars(seed: int, tag: int, n: int, z0: complex = 0.5, sampler: str = "tri"):
    """Same scalar for root polygons at 0 carried to z0 by z ↦ (z + z0)/(1 + conj(z0) z)."""
    st = RandomStream(seed).split(tag)
    roots = sample_p0_square_angles(st, n) if sampler == "quad" else sample_p0_angles(st, n)
    w = np.exp(1j * roots)
    moved = canonical_angle(np.angle((w + z0) / (1 + np.conj(z0) * w)))
    return sorted_harmonic(z0, moved)


def _forward_pairs(gen, n, y, jump_cutoff):
    """(T(i), T(iy)) by growing an accordion from the top edge of T(i) toward infinity."""
    s = 1j * y
    roots = np.sort(angle_to_real(sample_p0_angles(gen, n)), axis=1)
    first, second = roots.copy(), roots.copy()
    for k, (l, m, r) in enumerate(roots):
        inside_top = abs(s - (l + r) / 2) < (r - l) / 2
        above_small = abs(s - (l + m) / 2) > (m - l) / 2 and abs(s - (m + r) / 2) > (r - m) / 2
        if inside_top and above_small:
            continue
        run = build_accordion((l, r), gen, jump_cutoff,
                              lambda L, R, kk: np.abs(s - (L + R) / 2) < (R - L) / 2)
        second[k] = np.sort(run.triangles[-1])
    return first, second


def _log_width(tris):
    return np.log(tris.max(axis=1) - tris.min(axis=1))


def reversibility_samples(seed: int, tag: int, n: int, y: float = 3.0, backward: bool = False,
                          jump_cutoff: float = 1e-6):
    gen = RandomStream(seed).split(tag).generator()
    a, b = _forward_pairs(gen, n, y, jump_cutoff)
    if backward:
        # z ↦ -y/z swaps i and iy and preserves the half-plane
        a, b = np.sort(-y / b, axis=1), np.sort(-y / a, axis=1)
    return np.stack([_log_width(a), _log_width(b)], axis=1)


def _disk_harmonic_at_i(tris):
    """Sorted harmonic measures at i of half-plane triangles (apex reals)."""
    return sorted_harmonic(0j, np.sort(real_to_angle(tris), axis=1))


def target_samples(seed: int, tag: int, n: int, a: float = 5.0, image: bool = False,
                   jump_cutoff: float = 1e-6):
    """Disconnecting triangle over a, grown directly or as a Möbius image.

    The image route grows toward b = -a and maps the result by the map
    fixing ±1 that sends infinity to a.
    """
    gen = RandomStream(seed).split(tag).generator()
    lam = (a - 1) / (a + 1)
    h = fix_pm1_scaling(lam)
    out = np.empty((n, 3))
    for k in range(n):
        if image:
            tri = grow_until_disconnect((-1.0, 1.0), -a, gen, jump_cutoff).triangle
            out[k] = [h(complex(t)).real for t in tri]
        else:
            out[k] = grow_until_disconnect((-1.0, 1.0), a, gen, jump_cutoff).triangle
    return _disk_harmonic_at_i(out)


def gap_statistic(stream: RandomStream, jump_cutoff: float, width: float = 10.0) -> float:
    """log(R/-L) when the chart arch of a gap first reaches width ``width``."""
    run = build_accordion((-1.0, 1.0), stream.generator(), jump_cutoff,
                          lambda L, R, k: (R - L) >= width)
    L, R = run.final_arch
    return math.log(R / -L)


def markov_samples(seed: int, tag: int, n: int, jump_cutoff: float = 1e-4, cross: bool = False):
    """Chart statistics of root gaps O1, O2 of n tilings.

    With ``cross`` the second column comes from a different tiling, which is
    the null used for calibration.
    """
    seeds = derived_seeds(seed, tag, n)
    other = derived_seeds(seed, tag + 1, n) if cross else seeds
    s1 = [gap_statistic(RandomStream(int(s)).split(1), jump_cutoff) for s in seeds]
    s2 = [gap_statistic(RandomStream(int(s)).split(2), jump_cutoff) for s in other]
    return np.array(s1), np.array(s2)


def invariance_suite(mode: str, n: int, seed: int = 0, alpha: float = 0.05, *,
                     self_test: bool = False, **opts) -> TestReport:
    """Run one distributional check.

    ``self_test`` compares a sampler with itself on independent seeds, which
    is how the tests are calibrated under the null.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n < MIN_N:
        raise ValueError(f"need n >= {MIN_N} samples, got {n}")
    name = f"{mode}{'-self' if self_test else ''}"
    if mode == "mobius":
        z0 = opts.get("z0", 0.5)
        sampler = opts.get("sampler", "tri")
        kw = dict(z0=z0, resolution=opts.get("resolution", 1e-4),
                  jump_cutoff=opts.get("jump_cutoff"), sampler=sampler, law=opts.get("law", "zeta"))
        a, miss = mobius_scalars(seed, 1, n, **kw)
        if self_test:
            b, miss2 = mobius_scalars(seed, 2, n, **kw)
            miss += miss2
        else:
            b = mapped_root_scalars(seed, 2, n, z0, "quad" if sampler == "quad" else "tri")
        d, p, parts = ks_family(a, b)
        return TestReport(name, d, p, alpha, (len(a), len(b)), seed,
                          details={"missing": miss, "sampler": sampler, "z0": z0,
                                   "per_component": parts})
    if mode == "reversibility":
        y = opts.get("y", 3.0)
        eps = opts.get("jump_cutoff", 1e-6)
        fwd = reversibility_samples(seed, 1, n, y, False, eps)
        other = reversibility_samples(seed, 2, n, y, not self_test, eps)
        e, p = energy_test(fwd, other, opts.get("permutations", 200), rng=seed)
        return TestReport(name, e, p, alpha, (n, n), seed, details={"y": y})
    if mode == "target":
        a_ = opts.get("a", 5.0)
        eps = opts.get("jump_cutoff", 1e-6)
        direct = target_samples(seed, 1, n, a_, False, eps)
        other = target_samples(seed, 2, n, a_, not self_test, eps)
        d, p, parts = ks_family(direct, other)
        return TestReport(name, d, p, alpha, (n, n), seed,
                          details={"a": a_, "per_component": parts})
    eps = opts.get("jump_cutoff", 1e-4)
    s1, s2 = markov_samples(seed, 1, n, eps, cross=self_test)
    r, p = sps.pearsonr(s1, s2)
    return TestReport(name, abs(float(r)), float(p), alpha, (n,), seed,
                      details={"pearson_r": float(r)})


def null_calibration(mode: str, n: int, reps: int = 100, seed: int = 0, alpha: float = 0.05,
                     **opts) -> dict:
    """Rejection rate of the self-test over independent repetitions."""
    pvals = [invariance_suite(mode, n, seed * 100_003 + r, alpha, self_test=True, **opts).p_value
             for r in range(reps)]
    pvals = np.array(pvals)
    return {"mode": mode, "reps": reps, "n": n, "alpha": alpha,
            "rejection_rate": float(np.mean(pvals <= alpha)), "p_values": pvals}


def duality_report(n: int = 10_000, seed: int = 0, tolerance: float = 1e-12) -> TestReport:
    u, v, w = random_admissible_triples(RandomStream(seed).generator(), n)
    res = duality_residuals(u, v, w)
    return TestReport("duality", float(res.max()), None, 0.0, (n,), seed,
                      tolerance=tolerance, strict=True)


# --- coverage and dyadic counts --------------------------------------------------------

def segment_intervals(angles, x_min: float = 0.0, x_max: float = 1.0) -> np.ndarray:
    """Trace of each polygon on the real segment [x_min, x_max], as (n, 2) intervals.

    The map t ↦ (1 + t)/(1 - t) sends the real diameter to the imaginary axis
    of the half-plane, where an edge between apex images p, q with pq < 0
    crosses at height √(-pq).  An apex at 0 or ∞ puts an end of the trace at
    t = -1 or t = 1.  Polygons that miss the segment get an empty interval.
    """
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    p = angle_to_real(a)
    q = np.roll(p, -1, axis=1)
    with np.errstate(invalid="ignore", over="ignore"):
        prod = p * q
        cross = np.isfinite(prod) & (prod < 0)
        h = np.sqrt(np.where(cross, -prod, 1.0))
    at_zero = np.any(p == 0, axis=1)
    at_inf = np.any(np.isinf(p), axis=1)
    lo_h = np.where(at_zero, 0.0, np.min(np.where(cross, h, np.inf), axis=1))
    hi_h = np.where(at_inf, np.inf, np.max(np.where(cross, h, -np.inf), axis=1))
    ok = cross.sum(axis=1) + at_zero + at_inf >= 2
    with np.errstate(invalid="ignore"):
        lo = np.where(ok, (lo_h - 1) / (lo_h + 1), 0.0)
        hi = np.where(ok, np.where(np.isinf(hi_h), 1.0, (hi_h - 1) / (hi_h + 1)), 0.0)
    lo = np.clip(lo, x_min, x_max)
    hi = np.clip(hi, x_min, x_max)
    hi = np.maximum(hi, lo)
    return np.stack([lo, hi], axis=1)


def uncovered_length(intervals, x_min: float, x_max: float) -> float:
    iv = np.asarray(intervals, dtype=float)
    iv = iv[iv[:, 1] > iv[:, 0]]
    if len(iv) == 0:
        return x_max - x_min
    iv = iv[np.argsort(iv[:, 0])]
    covered, cur_lo, cur_hi = 0.0, iv[0, 0], iv[0, 1]
    for lo, hi in iv[1:]:
        if lo > cur_hi:
            covered += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    covered += cur_hi - cur_lo
    return float((x_max - x_min) - covered)


def dyadic_counts(traces, n_max: int = 20) -> np.ndarray:
    """counts[n] = number of traces in [2^-(n+1), 2^-n)."""
    t = np.asarray(traces, dtype=float)
    t = t[t > 0]
    idx = np.floor(-np.log2(t)).astype(int)
    idx = idx[(idx >= 0) & (idx <= n_max)]
    return np.bincount(idx, minlength=n_max + 1)


def coverage_profile(seeds, scales, x_min: float = 0.0, x_max: float = 0.9,
                     sampler=sample_disk_triangulation, n_max: int = 20):
    """Per scale: mean uncovered length of the segment and mean dyadic counts.

    Each tiling is generated at resolution ε, exploring only gaps that meet
    the segment (which leaves every polygon touching it unchanged).
    """
    scales = list(scales)
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be decreasing")
    filt = segment_gap_filter(x_max, x_min)
    out = []
    for eps in scales:
        unc, counts, total = [], [], []
        for s in seeds:
            t = sampler(int(s), eps, gap_filter=filt)
            iv = segment_intervals(t.angles, x_min, x_max)
            tr = iv[:, 1] - iv[:, 0]
            unc.append(uncovered_length(iv, x_min, x_max))
            counts.append(dyadic_counts(tr, n_max))
            total.append(tr.sum())
        out.append({"scale": eps, "uncovered": float(np.mean(unc)),
                    "uncovered_each": np.array(unc), "dyadic": np.mean(counts, axis=0),
                    "max_total_trace": float(np.max(total))})
    return out


# --- box counting -----------------------------------------------------------------------

def _box_keys(points, eps: float) -> np.ndarray:
    p = np.asarray(points)
    if np.iscomplexobj(p):
        x, y = p.real, p.imag
    else:
        p = p.reshape(len(p), -1)
        x, y = p[:, 0], (p[:, 1] if p.shape[1] > 1 else np.zeros(len(p)))
    ix = np.floor(x / eps).astype(np.int64)
    iy = np.floor(y / eps).astype(np.int64)
    return np.unique((ix << 32) + iy)


def box_count(points, eps: float) -> int:
    """Number of ε-boxes met by a point set (1-D or 2-D, or complex)."""
    return len(_box_keys(points, eps))


def _check_scales(scales) -> np.ndarray:
    scales = np.asarray(sorted(scales, reverse=True), dtype=float)
    if len(scales) < 4 or len(np.unique(scales)) != len(scales) or scales[0] / scales[-1] < 8:
        raise ValueError("need at least 4 distinct scales spanning 3 octaves")
    if scales[-1] <= 0:
        raise ValueError("scales must be positive")
    return scales


def _fit(scales, counts):
    fit = sps.linregress(np.log(1 / scales), np.log(counts))
    return float(fit.slope), float(fit.stderr), counts


def boxdim_estimate(points, scales):
    """Least-squares slope of log N(ε) against log(1/ε), with its standard error."""
    scales = _check_scales(scales)
    return _fit(scales, np.array([box_count(points, e) for e in scales]))


def geodesic_points(angles, step: float) -> np.ndarray:
    """Points along every edge of the given disk polygons, at most ``step`` apart."""
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    s = a.ravel()
    e = np.roll(a, -1, axis=1).ravel()
    pa, pb = np.exp(1j * s), np.exp(1j * e)
    den = 1 + (pa * np.conj(pb)).real
    line = np.abs(den) < 1e-12
    c = np.where(line, 0, (pa + pb) / np.where(line, 1, den))
    r = np.sqrt(np.maximum(np.abs(c) ** 2 - 1, 0))
    t0 = np.angle(pa - c)
    sweep = np.angle((pb - c) / (pa - c))
    length = np.where(line, 2.0, r * np.abs(sweep))
    k = np.maximum(2, np.ceil(length / step).astype(int) + 1)
    idx = np.repeat(np.arange(len(s)), k)
    frac = (np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k)) / np.repeat(k - 1, k)
    arc = c[idx] + r[idx] * np.exp(1j * (t0[idx] + frac * sweep[idx]))
    seg = pa[idx] + frac * (pb[idx] - pa[idx])
    return np.where(line[idx], seg, arc)


def boundary_box_count(angles, eps: float, chunk: int = 20_000) -> int:
    """Occupied ε-boxes of the union of polygon boundaries, edges sampled at ε/4."""
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    keys = [_box_keys(geodesic_points(a[i:i + chunk], eps / 4), eps)
            for i in range(0, len(a), chunk)]
    return len(np.unique(np.concatenate(keys)))


def boundary_boxdim(angles, scales):
    """Box dimension of the union of polygon boundaries."""
    scales = _check_scales(scales)
    counts = np.array([boundary_box_count(angles, e) for e in scales])
    return _fit(scales, counts)


def accordion_range(seed: int, jump_cutoff: float = 1e-12, upper: float = 10.0) -> np.ndarray:
    """Right-foot positions of one accordion from (-1, 1) while R <= upper."""
    run = build_accordion((-1.0, 1.0), RandomStream(seed).generator(), jump_cutoff,
                          lambda L, R, k: R > upper)
    R = run.R[:-1]
    return np.concatenate([[1.0], R[R >= 1.0]])


# --- reports for the geometric checks ----------------------------------------------------

COVERAGE_SCALES = (1e-2, 1e-3, 1e-4)
DYADIC_RESOLUTION = 2.0 ** -13
DIMENSION_SCALES = tuple(2.0 ** -k for k in range(4, 13))


def coverage_reports(n: int = 50, seed: int = 0, scales=COVERAGE_SCALES,
                     segment=(0.0, 0.9), final_tolerance: float = 0.05):
    """Uncovered length of a chord of the real diameter as the resolution shrinks.

    Two reports: the largest step-to-step change (must be negative, i.e.
    strictly decreasing) and the uncovered length at the finest scale.
    """
    seeds = derived_seeds(seed, 8, n)
    prof = coverage_profile(seeds, scales, *segment)
    unc = np.array([p["uncovered"] for p in prof])
    details = {"scales": list(scales), "uncovered": unc, "segment": list(segment)}
    step = float(np.max(np.diff(unc)))
    return [TestReport("coverage-decrease", step, None, 0.0, (n,), seed, tolerance=0.0,
                       strict=True, details=details),
            TestReport("coverage-final", float(unc[-1]), None, 0.0, (n,), seed,
                       tolerance=final_tolerance, strict=True, details=details)]


def dyadic_report(n: int = 100, seed: int = 0, bins=range(5, 13), segment=(0.0, 1.0),
                  resolution: float = DYADIC_RESOLUTION, ratio: float = 3.0) -> TestReport:
    """Max/min ratio of mean per-bin counts of polygon traces on a radius."""
    bins = list(bins)
    if resolution > 2.0 ** -(max(bins) + 1):
        raise ValueError("resolution must resolve the smallest dyadic bin")
    prof = coverage_profile(derived_seeds(seed, 10, n), [resolution], *segment,
                            n_max=max(bins))
    mean = prof[0]["dyadic"][bins]
    stat = float(mean.max() / mean.min()) if mean.min() > 0 else math.inf
    return TestReport("dyadic", stat, None, 0.0, (n,), seed, tolerance=ratio,
                      details={"bins": bins, "mean_counts": mean})


def dimension_reports(n: int = 20, seed: int = 0, scales=DIMENSION_SCALES,
                      resolution: float = 2.0 ** -10, range_cutoff: float = 1e-12):
    """Box-counting slopes of accordion foot ranges and of tiling edge unions.

    Counts are averaged over ``n`` samples before the fit.
    """
    scales = _check_scales(scales)
    seeds = derived_seeds(seed, 9, n)
    rng_counts = np.mean([[box_count(accordion_range(int(s), range_cutoff), e) for e in scales]
                          for s in seeds], axis=0)
    slope_r, err_r, _ = _fit(scales, rng_counts)
    edge_counts = []
    for s in seeds:
        ang = sample_disk_triangulation(int(s), resolution).angles
        edge_counts.append([boundary_box_count(ang, e) for e in scales])
    edge_counts = np.mean(edge_counts, axis=0)
    slope_b, err_b, _ = _fit(scales, edge_counts)
    local = np.log(edge_counts[1:] / edge_counts[:-1]) / np.log(scales[:-1] / scales[1:])
    return [TestReport("dimension-range", slope_r, None, 0.0, (n,), seed, slope_r, err_r,
                       tolerance=0.25, details={"scales": scales, "counts": rng_counts}),
            TestReport("dimension-boundary", abs(slope_b - 1.0), None, 0.0, (n,), seed,
                       slope_b, err_b, tolerance=0.15,
                       details={"scales": scales, "counts": edge_counts,
                                "local_slopes": local, "resolution": resolution})]
