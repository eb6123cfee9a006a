import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evpricing.objectives import (
    PriceSchedule,
    PricingProblem,
    Scenario,
    delivered,
    demand_matrix,
    evaluate,
    evaluate_many,
    f_par,
    f_qos,
    f_revenue,
    load_scenario,
    save_scenario,
)

from conftest import make_scenario


def flat(s, value):
    return PriceSchedule(np.full(s.shape, value))


class TestDemandMatrix:
    def test_reference_price_identity(self):
        base = np.array([[4.0, 1.0, 0.5], [2.0, 3.0, 7.0]])
        s = make_scenario(base, c=[-1.3, -0.4])
        np.testing.assert_allclose(demand_matrix(s, flat(s, s.p_ref)), base, rtol=1e-12)

    def test_zero_elasticity(self):
        base = np.array([[4.0, 1.0]])
        s = make_scenario(base, c=0.0)
        np.testing.assert_array_equal(demand_matrix(s, [[0.05, 0.9]]), base)

    def test_hand_ratio(self):
        s = make_scenario([[4.0, 1.0]], c=-1.0, p_ref=0.2)
        assert demand_matrix(s, [[0.4, 0.2]])[0, 0] == pytest.approx(2.0, rel=1e-12)

    def test_stacked_matches_single(self):
        s = make_scenario(np.arange(1, 7, dtype=float).reshape(2, 3), c=[-1.1, -0.7])
        rng = np.random.default_rng(0)
        P = rng.uniform(0.05, 1.0, (4, 2, 3))
        stacked = demand_matrix(s, P)
        for i in range(4):
            np.testing.assert_allclose(stacked[i], demand_matrix(s, P[i]))


class TestDelivered:
    @pytest.mark.parametrize("d,cap,out", [(5, 3, 3), (2, 3, 2), (4, 0, 0)])
    def test_cap(self, d, cap, out):
        s = make_scenario([[1.0]], capacity=[[cap]])
        assert delivered(s, [[d]])[0, 0] == out


class TestRevenue:
    def test_direct_sum(self):
        s = make_scenario([[5.0, 4.0]], c=0.0, p_max=5.0)
        assert f_revenue(s, [[2.0, 3.0]]) == pytest.approx(22.0)

    def test_capped_vs_literal(self):
        s = make_scenario([[5.0]], capacity=[[3.0]], c=0.0, p_max=5.0)
        assert f_revenue(s, [[2.0]]) == pytest.approx(6.0)
        assert f_revenue(s, [[2.0]], mode="literal") == pytest.approx(10.0)

    def test_floor_price_linear(self):
        s = make_scenario([[5.0, 4.0]], c=0.0)
        assert f_revenue(s, flat(s, s.p_min)) == pytest.approx(s.p_min * 9.0)

    @settings(max_examples=50)
    @given(arrays(float, (2, 3), elements=st.floats(0.01, 1.0)))
    def test_capped_never_exceeds_literal(self, P):
        s = make_scenario([[3.0, 1.0, 2.0], [0.5, 4.0, 1.0]], capacity=[[2.0, 2.0, 2.0], [1.0, 1.0, 1.0]])
        assert f_revenue(s, P, "capped") <= f_revenue(s, P, "literal") + 1e-12


class TestPar:
    def test_hand_value(self):
        s = make_scenario([[4.0, 2.0]], c=0.0)
        assert f_par(s, flat(s, 0.3)) == pytest.approx(1.5)

    def test_flat_is_one(self):
        s = make_scenario([[3.0, 3.0, 3.0]], c=0.0)
        assert f_par(s, flat(s, 0.3)) == pytest.approx(1.0)

    def test_station_averaging(self):
        s = make_scenario([[4.0, 2.0], [4.0, 2.0]], c=0.0)
        assert f_par(s, flat(s, 0.3)) == pytest.approx(1.5)

    @settings(max_examples=50)
    @given(arrays(float, (2, 4), elements=st.floats(0.01, 100.0)), st.floats(0.01, 1.0))
    def test_uniform_price_invariance(self, base, price):
        # a uniform price rescales each station's row by one factor
        s = make_scenario(base, c=[-1.5, -0.2])
        assert f_par(s, flat(s, price)) == pytest.approx(f_par(s, flat(s, s.p_ref)), rel=1e-9)


class TestQos:
    def test_fully_served(self):
        s = make_scenario([[1.0, 2.0]], capacity=[[5.0, 5.0]])
        assert f_qos(s, flat(s, 0.2)) == 1.0

    def test_single_ratio(self):
        s = make_scenario([[4.0]], capacity=[[1.0]], c=0.0)
        assert f_qos(s, flat(s, 0.5)) == pytest.approx(0.25)

    def test_hand_value(self):
        s = make_scenario([[4.0, 2.0]], capacity=[[2.0, 2.0]], c=0.0)
        assert f_qos(s, flat(s, 0.5)) == pytest.approx(0.75)

    def test_zero_demand_counts_as_served(self):
        s = make_scenario([[0.0, 2.0]], capacity=[[0.0, 1.0]], c=0.0)
        assert f_qos(s, flat(s, 0.5)) == pytest.approx(0.75)


@settings(max_examples=100)
@given(
    arrays(float, (2, 4), elements=st.floats(0.01, 50.0)),
    arrays(float, (2, 4), elements=st.floats(0.0, 50.0)),
    arrays(float, (2, 4), elements=st.floats(0.01, 1.0)),
)
def test_objective_ranges(base, cap, P):
    # every slot carries demand above the epsilon guard
    s = make_scenario(base, capacity=cap, c=[-1.2, -0.5])
    t = evaluate(s, P)
    assert 0.0 <= t.qos <= 1.0
    assert t.par >= 1.0 - 1e-12
    assert t.revenue >= 0.0


def test_par_of_idle_station_is_zero_ratio():
    # an idle station has D_max = 0, so each of its cells contributes 0
    s = make_scenario([[0.0, 0.0], [4.0, 2.0]], c=0.0)
    assert f_par(s, flat(s, 0.3)) == pytest.approx(0.75)


class TestEvaluate:
    def test_composition(self):
        s = make_scenario([[3.0, 3.0]], c=0.0)
        p = [[0.2, 0.4]]
        assert evaluate(s, p) == pytest.approx((1.8, 1.0, 1.0))

    def test_par_embedded(self):
        s = make_scenario([[4.0, 2.0]], c=0.0)
        assert evaluate(s, flat(s, 0.3)).par == pytest.approx(1.5)

    def test_deterministic_and_matches_singles(self):
        s = make_scenario([[4.0, 2.0, 1.0]], capacity=[[3.0, 3.0, 3.0]], c=-1.1)
        p = [[0.1, 0.5, 0.9]]
        a, b = evaluate(s, p), evaluate(s, p)
        assert a == b
        assert a == pytest.approx((f_revenue(s, p), f_qos(s, p), f_par(s, p)), rel=1e-12)

    def test_evaluate_many(self):
        s = make_scenario([[4.0, 2.0]], capacity=[[3.0, 3.0]])
        P = np.array([[[0.1, 0.2]], [[0.5, 0.5]]])
        out = evaluate_many(s, P)
        assert out.shape == (2, 3)
        np.testing.assert_allclose(out[1], evaluate(s, P[1]))


class TestScenario:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="capacity"):
            make_scenario([[1.0, 2.0]], capacity=[[1.0]])

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            make_scenario([[1.0]], p_min=0.5, p_max=0.1)

    def test_missing_model(self):
        s = make_scenario([[1.0]])
        with pytest.raises(ValueError, match="no demand model"):
            Scenario(["X"], s.grid, 0.1, 1.0, 0.3, [[1.0]], [[1.0]], {})

    def test_schedule_check(self):
        s = make_scenario([[1.0, 1.0]])
        with pytest.raises(ValueError):
            PriceSchedule([[0.5, 2.0]]).check(s)
        with pytest.raises(ValueError):
            PriceSchedule([[0.5]]).check(s)
        PriceSchedule([[s.p_min, s.p_max]]).check(s)

    def test_json_roundtrip(self, tmp_path):
        s = make_scenario([[4.0, 2.0, 1.0]], capacity=[[3.0, 3.0, 3.0]], c=-1.1, sp_price=0.3)
        path = tmp_path / "s.json"
        save_scenario(s, path)
        back = load_scenario(path)
        P = np.full(s.shape, 0.37)
        assert evaluate(back, P) == evaluate(s, P)
        assert back.sp_price == 0.3

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_scenario(tmp_path / "nope.json")


def test_pricing_problem_sense():
    s = make_scenario([[4.0, 2.0]], capacity=[[3.0, 3.0]])
    prob = PricingProblem(s)
    x = np.array([0.2, 0.4])
    F = prob.evaluate(x)
    raw = evaluate(s, prob.schedule(x))
    np.testing.assert_allclose(F[0], [-raw.revenue, -raw.qos, raw.par])
