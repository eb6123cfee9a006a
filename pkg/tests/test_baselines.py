import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evpricing.baselines import TouSchedule, default_peak_slots, stationary, three_level_search, tou
from evpricing.objectives import evaluate

from conftest import make_scenario


@pytest.fixture
def s96():
    rng = np.random.default_rng(0)
    return make_scenario(rng.uniform(1, 5, (2, 96)), capacity=np.full((2, 96), 3.0))


class TestStationary:
    def test_fill(self):
        s = make_scenario(np.ones((2, 4)))
        p = stationary(s, 0.30)
        assert p.prices.shape == (2, 4) and np.all(p.prices == 0.30)

    def test_bound_ok(self):
        s = make_scenario(np.ones((1, 4)))
        stationary(s, s.p_max).check(s)

    def test_bound_violation(self):
        s = make_scenario(np.ones((1, 4)))
        with pytest.raises(ValueError):
            stationary(s, s.p_max + 0.01)


class TestTou:
    def test_states(self, s96):
        p = tou(s96).prices
        sched = TouSchedule()
        assert p[0, 34] == sched.prices["peak"]
        assert p[0, 10] == sched.prices["offpeak"]
        assert p[0, 50] == sched.prices["normal"]
        assert np.array_equal(p[0], p[1])

    def test_default_windows(self):
        peaks = default_peak_slots(96)
        assert peaks == set(range(30, 39)) | set(range(68, 77))
        assert TouSchedule().offpeak_slots == set(range(25))

    def test_at_most_three_values(self, s96):
        assert len(np.unique(tou(s96).prices)) <= 3
        assert len(np.unique(stationary(s96, 0.4).prices)) == 1

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            TouSchedule(peak_slots={1, 2}, offpeak_slots={2, 3})

    def test_price_outside_bounds(self, s96):
        with pytest.raises(ValueError):
            tou(s96, TouSchedule(prices={"peak": 2.0, "normal": 0.3, "offpeak": 0.1}))

    def test_from_scenario_config(self):
        s = make_scenario(np.ones((1, 96)), tou={"prices": {"peak": 0.9}})
        assert tou(s).prices[0, 34] == 0.9
        assert tou(s).prices[0, 10] == 0.15

    def test_dict_roundtrip(self):
        sched = TouSchedule(peak_slots={5}, offpeak_slots={0, 1}, prices={"peak": 0.4, "normal": 0.2, "offpeak": 0.1})
        assert TouSchedule.from_dict(sched.to_dict()) == sched

    @given(
        st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(0.01, 1.0),
        st.sets(st.integers(0, 95), max_size=30),
    )
    def test_bounds_hold(self, a, b, c, peaks):
        s = make_scenario(np.ones((1, 96)))
        sched = TouSchedule(peak_slots=peaks, offpeak_slots=set(range(96)) - peaks - {95},
                            prices={"peak": a, "normal": b, "offpeak": c})
        tou(s, sched).check(s)


class TestThreeLevelSearch:
    def test_matches_direct_evaluation(self, s96):
        levels = [0.1, 0.3, 0.5]
        combos, out = three_level_search(s96, levels=levels, chunk=5)
        assert combos.shape == (27, 3) and out.shape == (27, 3)
        for (lo, mid, hi), row in zip(combos, out):
            p = tou(s96, TouSchedule(prices={"offpeak": lo, "normal": mid, "peak": hi}))
            assert tuple(row) == pytest.approx(evaluate(s96, p))

    def test_default_levels(self, s96):
        combos, _ = three_level_search(s96, chunk=1000)
        assert len(combos) == 20**3
        assert set(np.unique(combos)) == set(np.linspace(s96.p_min, s96.p_max, 20))

    def test_contains_tou_triple(self, s96):
        combos, out = three_level_search(s96, levels=[0.15, 0.30, 0.50])
        i = int(np.flatnonzero(np.all(combos == [0.15, 0.30, 0.50], axis=1))[0])
        assert tuple(out[i]) == pytest.approx(evaluate(s96, tou(s96)))
