import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symm.rearrange import (
    DecreasingProfile,
    WeightedSample,
    decreasing_rearrangement,
    distribution,
    hardy_littlewood_gap,
    hlp_dominance,
    lp_norm,
    schwarz_radius_map,
)


def random_sample(rng, max_cells=100, integer_values=False):
    n = rng.integers(1, max_cells + 1)
    if integer_values:
        values = rng.integers(0, 6, size=n).astype(float)
    else:
        values = rng.uniform(0.0, 10.0, size=n)
    measures = rng.uniform(0.1, 2.0, size=n)
    return WeightedSample(values, measures)


class TestWeightedSample:
    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            WeightedSample([1.0, -0.5], [1.0, 1.0])

    def test_rejects_nonpositive_measures(self):
        with pytest.raises(ValueError):
            WeightedSample([1.0, 2.0], [1.0, 0.0])

    def test_from_absolute(self):
        s = WeightedSample.from_absolute([-2.0, 1.0], [1.0, 3.0])
        assert s.values.tolist() == [2.0, 1.0]

    def test_total_is_order_independent(self):
        rng = np.random.default_rng(7)
        m = rng.uniform(0.01, 1.0, size=50)
        t1 = WeightedSample(np.ones(50), m).total_measure
        t2 = WeightedSample(np.ones(50), m[::-1]).total_measure
        assert t1 == t2


class TestDistribution:
    def test_indicator(self):
        h = WeightedSample([1.0], [3.5])
        assert distribution(h, 0.5) == 3.5

    def test_three_cells(self):
        h = WeightedSample([3.0, 1.0, 2.0], [1.0, 2.0, 1.0])
        assert distribution(h, 1.5) == 2.0

    def test_above_max_is_zero(self):
        h = WeightedSample([3.0, 1.0], [1.0, 2.0])
        assert distribution(h, 3.0) == 0.0
        assert distribution(h, 99.0) == 0.0

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            distribution(WeightedSample([1.0], [1.0]), -0.1)


class TestDecreasingRearrangement:
    def test_sorting_example(self):
        h = WeightedSample([3.0, 1.0, 2.0], [1.0, 2.0, 1.0])
        prof = decreasing_rearrangement(h)
        assert prof.breakpoints.tolist() == [0.0, 1.0, 2.0, 4.0]
        assert prof.values.tolist() == [3.0, 2.0, 1.0]

    def test_constant(self):
        prof = decreasing_rearrangement(WeightedSample([4.0, 4.0], [1.0, 2.5]))
        assert prof.values.tolist() == [4.0]
        assert prof.total == 3.5

    def test_zeros_sort_last(self):
        prof = decreasing_rearrangement(WeightedSample([0.0, 5.0], [2.0, 1.0]))
        assert prof.values.tolist() == [5.0, 0.0]
        assert prof.breakpoints.tolist() == [0.0, 1.0, 3.0]

    def test_max_at_origin(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            h = random_sample(rng)
            prof = decreasing_rearrangement(h)
            assert prof.evaluate(0.0) == h.values.max()

    def test_distribution_identity(self):
        # mu computed from the profile equals distribution(h, t) exactly for
        # dyadic measures, and to 1e-12 otherwise
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = rng.integers(1, 40)
            values = rng.integers(0, 5, size=n).astype(float)
            measures = rng.integers(1, 9, size=n) / 8.0  # exactly representable
            h = WeightedSample(values, measures)
            prof = decreasing_rearrangement(h)
            for t in [0.0, 0.5, 1.0, 2.5, 4.0]:
                assert prof.distribution(t) == distribution(h, t)

    def test_tie_permutation_bit_identical(self):
        rng = np.random.default_rng(2)
        values = np.array([2.0, 1.0, 2.0, 2.0, 1.0, 0.5])
        measures = rng.uniform(0.1, 1.0, size=6)
        base = decreasing_rearrangement(WeightedSample(values, measures))
        for seed in range(10):
            perm = np.random.default_rng(seed).permutation(6)
            prof = decreasing_rearrangement(WeightedSample(values[perm], measures[perm]))
            assert prof.breakpoints.tolist() == base.breakpoints.tolist()
            assert prof.values.tolist() == base.values.tolist()

    def test_order_reversal(self):
        # h <= h' cellwise implies h* <= h'* everywhere
        rng = np.random.default_rng(3)
        for _ in range(30):
            h = random_sample(rng, max_cells=30)
            hp = WeightedSample(h.values + rng.uniform(0.0, 1.0, size=len(h)), h.measures)
            p, pp = decreasing_rearrangement(h), decreasing_rearrangement(hp)
            grid = np.union1d(p.breakpoints, pp.breakpoints)
            # skip slivers of rounding width between nearly-equal breakpoints
            wide = np.diff(grid) > 1e-9 * grid[-1]
            mid = (0.5 * (grid[:-1] + grid[1:]))[wide]
            assert np.all(p.evaluate(mid) <= pp.evaluate(mid) + 1e-12)


class TestSchwarzRadiusMap:
    def test_zero(self):
        assert schwarz_radius_map(0.0, 1.0, 2) == 0.0

    def test_unit_disk(self):
        assert schwarz_radius_map(math.pi, 1.0, 2) == pytest.approx(1.0, rel=1e-14)

    def test_cone_quarter(self):
        assert schwarz_radius_map(math.pi, 0.25, 2) == pytest.approx(2.0, rel=1e-14)

    def test_avr_range(self):
        with pytest.raises(ValueError):
            schwarz_radius_map(1.0, 0.0, 2)
        with pytest.raises(ValueError):
            schwarz_radius_map(1.0, 1.5, 2)


class TestLpNorm:
    def test_constant(self):
        prof = DecreasingProfile([0.0, 2.0], [3.0], "step")
        assert lp_norm(1.0, prof) == pytest.approx(6.0, rel=1e-14)

    def test_two_cells(self):
        prof = decreasing_rearrangement(WeightedSample([2.0, 1.0], [0.5, 1.5]))
        assert lp_norm(2.0, prof) == pytest.approx(math.sqrt(3.5), rel=1e-14)

    def test_equimeasurability_randomized(self):
        # acceptance-scale suite: 1000 samples, p in {0.5, 1, 2, 3}
        rng = np.random.default_rng(42)
        for _ in range(1000):
            h = random_sample(rng)
            prof = decreasing_rearrangement(h)
            for p in (0.5, 1.0, 2.0, 3.0):
                direct = h.lp_norm(p)
                assert abs(lp_norm(p, prof) - direct) <= 1e-10 * max(direct, 1e-30)

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=100.0),
                st.floats(min_value=1e-3, max_value=10.0),
            ),
            min_size=1,
            max_size=40,
        ),
        st.sampled_from([0.5, 1.0, 2.0, 3.0]),
    )
    @settings(max_examples=100, deadline=None)
    def test_equimeasurability_property(self, cells, p):
        values, measures = zip(*cells)
        h = WeightedSample(values, measures)
        direct = h.lp_norm(p)
        assert lp_norm(p, decreasing_rearrangement(h)) == pytest.approx(direct, rel=1e-10, abs=1e-12)


class TestHardyLittlewood:
    def test_equal_samples(self):
        rng = np.random.default_rng(5)
        h = random_sample(rng)
        assert abs(hardy_littlewood_gap(h, h)) <= 1e-12 * h.lp_norm(2.0) ** 2

    def test_disjoint_indicators(self):
        h = WeightedSample([1.0, 0.0], [1.0, 1.0])
        w = WeightedSample([0.0, 1.0], [1.0, 1.0])
        assert hardy_littlewood_gap(h, w) == pytest.approx(1.0, abs=1e-14)

    def test_constant_factor(self):
        rng = np.random.default_rng(6)
        w = random_sample(rng, max_cells=20)
        h = WeightedSample(np.full(len(w), 2.5), w.measures)
        assert abs(hardy_littlewood_gap(h, w)) <= 1e-10

    def test_gap_nonnegative_randomized(self):
        rng = np.random.default_rng(43)
        for _ in range(1000):
            n = int(rng.integers(1, 101))
            m = rng.uniform(0.05, 2.0, size=n)
            h = WeightedSample(rng.uniform(0.0, 5.0, size=n), m)
            w = WeightedSample(rng.uniform(0.0, 5.0, size=n), m)
            assert hardy_littlewood_gap(h, w) >= -1e-10

    def test_misaligned_rejected(self):
        h = WeightedSample([1.0, 2.0], [1.0, 1.0])
        w = WeightedSample([1.0, 2.0], [1.0, 1.5])
        with pytest.raises(ValueError):
            hardy_littlewood_gap(h, w)

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=50.0),
                st.floats(min_value=0.0, max_value=50.0),
                st.floats(min_value=1e-2, max_value=5.0),
            ),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_gap_property(self, cells):
        hv, wv, m = zip(*cells)
        h = WeightedSample(hv, m)
        w = WeightedSample(wv, m)
        assert hardy_littlewood_gap(h, w) >= -1e-10


class TestHlpDominance:
    def test_identical_profiles(self):
        prof = decreasing_rearrangement(WeightedSample([3.0, 1.0], [1.0, 1.0]))
        holds, gap = hlp_dominance(prof, prof, 1.0, 2.0)
        assert holds and abs(gap) <= 1e-12

    def test_pointwise_domination(self):
        f = DecreasingProfile([0.0, 1.0, 2.0], [2.0, 1.0], "step")
        g = DecreasingProfile([0.0, 1.0, 2.0], [3.0, 1.5], "step")
        holds, gap = hlp_dominance(f, g, 1.0, 3.0)
        assert holds and gap >= 0.0

    def test_premise_checked_not_assumed(self):
        # f = 2 on [0,1), 0 after; g = sqrt(2) on [0,2): equal L^2 masses at
        # s = 2 but the cumulative premise fails for s < 1
        f = DecreasingProfile([0.0, 1.0, 2.0], [2.0, 0.0], "step")
        g = DecreasingProfile([0.0, 2.0], [math.sqrt(2.0)], "step")
        holds, _ = hlp_dominance(f, g, 2.0, 4.0)
        assert not holds

    def test_contract_randomized(self):
        rng = np.random.default_rng(44)
        checked = 0
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            m = rng.uniform(0.05, 1.0, size=n)
            base = rng.uniform(0.0, 3.0, size=n)
            f = decreasing_rearrangement(WeightedSample(base, m))
            g = decreasing_rearrangement(WeightedSample(base + rng.uniform(0.0, 2.0, size=n), m))
            p = float(rng.uniform(0.3, 2.0))
            for q in (p, 2 * p, 5 * p):
                holds, gap = hlp_dominance(f, g, p, q)
                if holds:
                    checked += 1
                    assert gap >= -1e-10
        assert checked > 0

    def test_interval_mismatch_rejected(self):
        f = DecreasingProfile([0.0, 1.0], [1.0], "step")
        g = DecreasingProfile([0.0, 2.0], [1.0], "step")
        with pytest.raises(ValueError):
            hlp_dominance(f, g, 1.0, 1.0)

    def test_bad_exponents(self):
        f = DecreasingProfile([0.0, 1.0], [1.0], "step")
        with pytest.raises(ValueError):
            hlp_dominance(f, f, 2.0, 1.0)


class TestProfileContainer:
    def test_step_right_continuity(self):
        prof = DecreasingProfile([0.0, 1.0, 3.0], [2.0, 1.0], "step")
        assert prof.evaluate(1.0) == 1.0  # right-continuous at the breakpoint
        assert prof.evaluate(0.999) == 2.0
        assert prof.evaluate(3.0) == 1.0  # value at total is the last step

    def test_linear_interpolation(self):
        prof = DecreasingProfile([0.0, 2.0], [1.0, 0.0], "linear")
        assert prof.evaluate(1.0) == pytest.approx(0.5)

    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            DecreasingProfile([0.0, 1.0, 2.0], [1.0, 2.0], "step")

    def test_csv_round_trip(self):
        prof = DecreasingProfile([0.0, 1.0, 2.0], [2.0, 0.5], "step")
        buf = io.StringIO()
        prof.to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "s,value"
        assert lines[1] == "0.0,2.0"
        assert lines[-1] == "2.0,0.5"
