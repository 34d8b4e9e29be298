import json
import math

import numpy as np
import pytest

from hyplane import stats as S
from hyplane.tiling import sample_disk_triangulation

TAU3 = 2 * math.pi / 3


# --- two-sample tests -------------------------------------------------------------

def test_ks_identical_samples():
    a = np.linspace(0, 1, 100)
    assert S.ks_two_sample(a, a) == (0.0, 1.0)


def test_ks_disjoint_supports():
    d, p = S.ks_two_sample(np.linspace(0, 1, 50), np.linspace(2, 3, 50))
    assert d == 1.0 and p < 1e-10


def test_ks_shifted_uniforms():
    gen = np.random.default_rng(0)
    d, _ = S.ks_two_sample(gen.random(10_000), 0.5 + gen.random(10_000))
    # the CDF gap is flat at 0.5 on [0.5, 1]; the sup over that stretch sits a
    # couple of standard errors above it
    assert d == pytest.approx(0.5, abs=0.03)


def test_ks_rejects_empty():
    with pytest.raises(ValueError):
        S.ks_two_sample([], [1.0])


def test_ks_matches_scipy():
    from scipy.stats import ks_2samp
    gen = np.random.default_rng(1)
    a, b = gen.normal(size=3000), gen.normal(0.05, size=2000)
    d, p = S.ks_two_sample(a, b)
    ref = ks_2samp(a, b, method="asymp")
    assert d == pytest.approx(ref.statistic)
    assert p == pytest.approx(ref.pvalue, rel=0.05)


def test_holm_adjustment():
    np.testing.assert_allclose(S.holm([0.01, 0.04, 0.03]), [0.03, 0.06, 0.06])
    assert S.holm([0.9, 0.8]).max() <= 1


def test_energy_detects_shift_and_accepts_null():
    gen = np.random.default_rng(2)
    x = gen.normal(size=(400, 2))
    _, p_same = S.energy_test(x, gen.normal(size=(400, 2)), 200, rng=3)
    _, p_diff = S.energy_test(x, gen.normal(0.5, size=(400, 2)), 200, rng=3)
    assert p_same > 0.01 and p_diff < 0.01


def test_energy_statistic_matches_direct_formula():
    gen = np.random.default_rng(4)
    x, y = gen.normal(size=(30, 2)), gen.normal(size=(20, 2))
    e, _ = S.energy_test(x, y, 10, rng=0, chunk=7)

    def mean_dist(a, b):
        return np.mean(np.sqrt(((a[:, None] - b[None]) ** 2).sum(-1)))

    ref = 2 * mean_dist(x, y) - mean_dist(x, x) - mean_dist(y, y)
    assert e == pytest.approx(ref, rel=1e-10)


# --- reports ------------------------------------------------------------------------

def test_report_verdict_and_json():
    r = S.TestReport("x", 0.2, 0.3, 0.05, (10, 10), 1)
    assert r.passed
    d = json.loads(r.to_json())
    assert d["passed"] is True and d["n"] == [10, 10]
    assert not S.TestReport("x", 0.2, 0.01, 0.05).passed
    assert not S.TestReport("x", 1.0, tolerance=1.0, strict=True).passed
    assert S.TestReport("x", 1.0, tolerance=1.0).passed


def test_suite_requires_enough_samples():
    with pytest.raises(ValueError):
        S.invariance_suite("mobius", 999)
    with pytest.raises(ValueError):
        S.invariance_suite("nope", 5000)


def test_suite_is_deterministic():
    a = S.invariance_suite("target", 1000, seed=3)
    b = S.invariance_suite("target", 1000, seed=3)
    assert a.to_json() == b.to_json()


def test_mapped_root_scalars_are_harmonic_triples():
    a = S.mapped_root_scalars(0, 1, 3000, z0=0.0)
    b = S.sorted_harmonic(0.0, sample_disk_triangulation(0, 1.0).angles[:1])
    assert a.shape == (3000, 3) and b.shape == (1, 3)
    assert np.allclose(a.sum(axis=1), 1)


def test_farey_passes_mobius():
    assert S.invariance_suite("mobius", 5000, seed=1, sampler="farey").passed


def test_quadrangulation_passes_mobius():
    assert S.invariance_suite("mobius", 2000, seed=1, sampler="quad", resolution=1e-3).passed


def test_corrupted_jump_law_fails_mobius():
    r = S.invariance_suite("mobius", 10_000, seed=2, law="corrupt")
    assert r.p_value < 1e-3


@pytest.mark.parametrize("mode", ["reversibility", "target", "markov"])
def test_null_calibration(mode):
    cal = S.null_calibration(mode, 1000, reps=100, seed=5)
    assert cal["rejection_rate"] <= 0.10
    assert np.all((cal["p_values"] >= 0) & (cal["p_values"] <= 1))


def test_markov_mode_accepts_independent_root_gaps():
    # the two root gaps of one tiling are independent given the root
    assert S.invariance_suite("markov", 2000, seed=9).passed


# --- geometry of traces -------------------------------------------------------------

def test_segment_intervals_of_known_triangle():
    # the standard triangle meets [0, 1] in [0, 1) because apex 1 is a cusp
    iv = S.segment_intervals(np.array([[0.0, TAU3, 2 * TAU3]]), 0.0, 0.9)
    assert iv[0] == pytest.approx([0.0, 0.9])
    iv = S.segment_intervals(np.array([[0.0, TAU3, 2 * TAU3]]), -1.0, 0.0)
    # edge (j, j²) crosses the real axis at √3 - 2
    assert iv[0, 0] == pytest.approx(math.sqrt(3) - 2)


def test_uncovered_length_union():
    iv = np.array([[0.0, 0.3], [0.2, 0.5], [0.7, 0.8]])
    assert S.uncovered_length(iv, 0.0, 1.0) == pytest.approx(0.4)


def test_coverage_profile_properties():
    prof = S.coverage_profile(range(5), [1e-1, 1e-2, 1e-3], 0.0, 0.99)
    unc = [p["uncovered"] for p in prof]
    assert unc[0] >= unc[1] >= unc[2]
    assert all(p["max_total_trace"] <= 0.99 + 1e-9 for p in prof)


def test_coverage_profile_needs_decreasing_scales():
    with pytest.raises(ValueError):
        S.coverage_profile([0], [1e-3, 1e-2])


def test_dyadic_counts():
    c = S.dyadic_counts([0.6, 0.3, 0.26, 0.1, 0.0], n_max=3)
    np.testing.assert_array_equal(c, [1, 2, 0, 1])


# --- box counting -------------------------------------------------------------------

SCALES = [2.0 ** -k for k in range(3, 10)]


def test_boxdim_of_segment_is_one():
    t = np.linspace(0, 1, 10_000)
    slope, err, _ = S.boxdim_estimate(np.stack([t, 0.3 * t], axis=1), SCALES)
    assert slope == pytest.approx(1.0, abs=0.05)


def test_boxdim_of_finite_set_is_zero():
    pts = np.random.default_rng(0).random((10, 2))
    slope, _, _ = S.boxdim_estimate(pts, [2.0 ** -k for k in range(12, 20)])
    assert slope == pytest.approx(0.0, abs=0.05)


def test_boxdim_rejects_degenerate_scales():
    with pytest.raises(ValueError):
        S.boxdim_estimate(np.zeros((3, 2)), [0.1, 0.05, 0.02])
    with pytest.raises(ValueError):
        S.boxdim_estimate(np.zeros((3, 2)), [0.1, 0.1, 0.1, 0.1])


def test_geodesic_points_stay_on_geodesic():
    pts = S.geodesic_points(np.array([[0.0, TAU3, 2 * TAU3]]), 1e-3)
    assert np.all(np.abs(pts) <= 1 + 1e-12)
    for k in range(3):
        c = 2 * np.exp(1j * (TAU3 * k + TAU3 / 2))
        on = pts[np.abs(np.abs(pts - c) - math.sqrt(3)) < 1e-9]
        phase = np.sort(np.angle((on - c) / -c))
        assert np.max(np.diff(phase)) * math.sqrt(3) <= 1e-3 * (1 + 1e-9)
        assert phase[-1] - phase[0] == pytest.approx(math.pi / 3)


def test_accordion_range_is_sparse():
    r = S.accordion_range(0)
    assert np.all((r >= 1) & (r <= 10))
    slope, _, _ = S.boxdim_estimate(r, [2.0 ** -k for k in range(4, 13)])
    assert slope < 0.5


def test_duality_report():
    r = S.duality_report(10_000)
    assert r.passed and r.statistic < 1e-12
