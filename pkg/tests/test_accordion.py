import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyplane.accordion import (AccordionBudgetExceeded, AccordionState, InvalidJumpError,
                               PoissonJumps, advance, apply_jump, build_accordion,
                               grow_until_disconnect, recover_jump)
from hyplane.measures import tail_mass
from hyplane.rng import RandomStream
from hyplane.stats import ks_two_sample

jumps = st.floats(1.01, 50.0).flatmap(lambda m: st.sampled_from([m, -m]))


def test_right_jump_exact():
    s, tri = apply_jump(AccordionState(), 3.0)
    assert (s.L, s.R) == (-1.0, 3.0)
    assert [p.value for p in tri.apexes] == [-1.0, 1.0, 3.0]
    assert s.side_gaps == ((1.0, 3.0),)


def test_left_jump_mirror_exact():
    s, tri = apply_jump(AccordionState(), -3.0)
    assert (s.L, s.R) == (-3.0, 1.0)
    assert [p.value for p in tri.apexes] == [-3.0, -1.0, 1.0]
    assert s.side_gaps == ((-3.0, -1.0),)


def test_jump_inside_unit_interval_rejected():
    with pytest.raises(InvalidJumpError):
        apply_jump(AccordionState(), 0.5)


@given(st.lists(jumps, min_size=1, max_size=8))
def test_state_machine_matches_vectorized_advance(xs):
    s = AccordionState()
    for x in xs:
        s, _ = apply_jump(s, x)
    ax = np.abs(xs)
    L, R = advance(-1.0, 1.0, (ax - 1) / (ax + 1), np.sign(xs))
    assert L[-1] == pytest.approx(s.L, rel=1e-9)
    assert R[-1] == pytest.approx(s.R, rel=1e-9)


@given(st.lists(jumps, min_size=1, max_size=30))
def test_recover_jump_round_trip(xs):
    run = build_accordion(jumps=xs, n_jumps=len(xs))
    rec = recover_jump(run.L_prev, run.R_prev, run.L, run.R)
    assert rec == pytest.approx(np.array(xs), rel=1e-9)


@given(st.lists(jumps, min_size=1, max_size=20))
def test_width_scales_by_half_of_x_plus_one(xs):
    run = build_accordion(jumps=xs, n_jumps=len(xs))
    ratio = (run.R - run.L) / (run.R_prev - run.L_prev)
    assert ratio == pytest.approx((np.abs(xs) + 1) / 2, rel=1e-12)


def test_triangles_share_edges():
    run = build_accordion(rng=RandomStream(1).generator(), jump_cutoff=1e-2, n_jumps=60)
    tris = run.triangles
    # each triangle's outer edge (L, R) is the next one's inner edge
    assert np.all(tris[:, 0] <= tris[:, 1]) and np.all(tris[:, 1] <= tris[:, 2])
    np.testing.assert_array_equal(tris[:-1, [0, 2]][:, 0], run.L_prev[1:])
    np.testing.assert_array_equal(tris[:-1, [0, 2]][:, 1], run.R_prev[1:])


def test_poisson_rate_and_magnitudes():
    src = PoissonJumps(RandomStream(2).generator(), 0.5, block=50_000)
    y, sign, dt = src.next_block()
    assert src.rate == pytest.approx(tail_mass(1.5))
    assert np.mean(dt) == pytest.approx(1 / src.rate, rel=0.03)
    x = (1 + y) / (1 - y)
    assert np.all(x > 1.5)
    # ζ tail: P(|x| > 3 | |x| > 1.5) = tail(3)/tail(1.5)
    assert np.mean(x > 3) == pytest.approx(tail_mass(3) / tail_mass(1.5), abs=0.01)


def test_block_size_does_not_change_the_law():
    def draw(seed, block):
        src = PoissonJumps(RandomStream(seed).generator(), 1e-3, block=block)
        return np.concatenate([src.next_block()[0] for _ in range(5000 // block + 1)])[:5000]

    _, p = ks_two_sample(np.log(draw(3, 64)), np.log(draw(4, 7)))
    assert p > 1e-3


def test_budget_exceeded_carries_partial_run():
    with pytest.raises(AccordionBudgetExceeded) as exc:
        build_accordion(rng=RandomStream(5).generator(), jump_cutoff=1e-3,
                        stop=lambda L, R, k: np.zeros(len(k), bool), max_jumps=100)
    assert len(exc.value.partial) == 100


def test_deterministic_per_seed():
    a = build_accordion(rng=RandomStream(6).generator(), jump_cutoff=1e-3, n_jumps=300)
    b = build_accordion(rng=RandomStream(6).generator(), jump_cutoff=1e-3, n_jumps=300)
    np.testing.assert_array_equal(a.R, b.R)


def test_disconnection_separates_target():
    d = grow_until_disconnect((-1.0, 1.0), 5.0, RandomStream(7).generator(), 1e-3)
    L, R = d.run.final_arch
    assert L < 5 < R
    lo, hi = d.run.L_prev[-1], d.run.R_prev[-1]
    assert not lo < 5 < hi
    assert len(d.prefix) == len(d.run) - 1


def test_disconnection_rejects_target_on_arch():
    with pytest.raises(ValueError):
        grow_until_disconnect((-1.0, 1.0), 0.5)


def test_corrupt_law_has_heavier_tail():
    src = PoissonJumps(RandomStream(8).generator(), 1e-3, law="corrupt", block=20_000)
    y, _, _ = src.next_block()
    x = (1 + y) / (1 - y)
    assert np.median(x) > 1.5
