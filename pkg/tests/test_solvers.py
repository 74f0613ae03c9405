from itertools import groupby

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facloc.errors import ParameterError
from facloc.lp import lp_bound
from facloc.model import brute_force_opt, check_overtight
from facloc.solvers import ALGORITHMS, greedy1_restatement, greedy1_star, greedy2, jv

from tests.helpers import make, metric_batch, random_instance

instances = st.builds(
    lambda n_f, n_c, seed, metric: random_instance(np.random.default_rng(seed), n_f, n_c, metric),
    st.integers(1, 7),
    st.integers(1, 12),
    st.integers(0, 2**32),
    st.booleans(),
)


def replay_offers(inst, trace):
    """Yield ``(time, offers)`` just before each distinct event time of a greedy2 run."""
    current = {}
    opened = set()
    for t, group in groupby(trace.events, key=lambda e: e.time):
        offers = np.zeros(inst.n_f)
        for i in range(inst.n_f):
            if i in opened:
                continue
            for j in range(inst.n_c):
                if j in current:
                    offers[i] += inst.d[j] * max(inst.c[current[j], j] - inst.c[i, j], 0.0)
                else:
                    offers[i] += inst.d[j] * max(t - inst.c[i, j], 0.0)
        yield t, offers, set(opened)
        for e in group:
            if e.kind == "open":
                opened.add(e.facility)
            elif e.kind == "connect":
                current[e.city] = e.facility


class TestGreedy1Star:
    def test_single_facility(self):
        out = greedy1_star(make([2], [[1, 1]]))
        assert out.solution.total == 4 and out.solution.open == {0}

    def test_cheapest_ratio(self):
        out = greedy1_star(make([0, 10], [[5], [0]]))
        assert out.solution.open == {0} and out.solution.total == 5

    def test_no_cities(self):
        out = greedy1_star(make([1, 2], np.zeros((2, 0))))
        assert out.solution.total == 0 and not out.solution.open

    def test_needs_unit_demands(self):
        with pytest.raises(ParameterError):
            greedy1_star(make([1], [[1]], d=[2]))


class TestRestatement:
    def test_single_star(self):
        out = greedy1_restatement(make([5], [[3]]))
        assert out.cert.alpha.tolist() == [8.0] and out.solution.total == 8
        assert [e.kind for e in out.trace] == ["open", "connect"]

    def test_free_facility_opens_at_zero(self):
        out = greedy1_restatement(make([0], [[3]]))
        opens, conns = out.trace.of_kind("open"), out.trace.of_kind("connect")
        assert opens[0].time == 0 and conns[0].time == 3
        assert out.cert.alpha.tolist() == [3.0]

    def test_rejects_zero_demand(self):
        with pytest.raises(ParameterError):
            greedy1_restatement(make([1], [[1]], d=[0]))


class TestGreedy2:
    def test_single_star(self):
        out = greedy2(make([5], [[3]]))
        assert out.cert.alpha.tolist() == [8.0]

    def test_hand_example(self):
        out = greedy2(make([4, 1], [[1, 1], [2, 2]]))
        assert out.solution.open == {1}
        assert out.cert.alpha == pytest.approx([2.5, 2.5])
        assert out.solution.total == pytest.approx(5.0)

    def test_switch_is_recorded(self):
        # both facilities are paid at t=2; the lower index wins the tie, then
        # facility 1 opens at t=3 with city 2's switch offer and city 2 moves
        inst = make([3, 3], [[4, 0, 1], [1, 4, 0]])
        out = greedy2(inst)
        switched = [e for e in out.trace.of_kind("connect") if e.previous is not None]
        assert [(e.time, e.city, e.previous, e.facility) for e in switched] == [(3.0, 2, 0, 1)]
        assert out.cert.alpha.tolist() == [3.0, 2.0, 2.0]
        assert out.solution.total == 7.0


class TestJV:
    def test_single_star(self):
        assert jv(make([5], [[3]])).solution.total == 8

    def test_feasible_and_above_opt(self, rng):
        for _ in range(25):
            inst = random_instance(rng, 6, 8)
            sol = jv(inst).solution
            assert all(len(a) == 1 for a in sol.assign)
            assert sol.total >= brute_force_opt(inst).total - 1e-9


@settings(max_examples=150, deadline=None)
@given(instances)
def test_dual_pays_for_solution(inst):
    for alg in ("greedy1", "greedy1-star", "greedy2"):
        out = ALGORITHMS[alg](inst)
        assert out.cert.alpha @ inst.d == pytest.approx(out.solution.total, rel=1e-9, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(instances)
def test_trace_shape(inst):
    for alg in ("greedy1", "greedy2", "jv"):
        out = ALGORITHMS[alg](inst)
        times = [e.time for e in out.trace]
        assert times == sorted(times)
        opens = len(out.trace.of_kind("open"))
        first = [e for e in out.trace.of_kind("connect") if e.previous is None]
        assert opens <= inst.n_f and len(first) <= inst.n_c
        assert all(len(a) == 1 for a in out.solution.assign)


@settings(max_examples=100, deadline=None)
@given(instances)
def test_greedy2_monotone_reconnection(inst):
    out = greedy2(inst)
    seen = {}
    for e in out.trace.of_kind("connect"):
        if e.previous is not None:
            assert seen[e.city] == e.previous
            assert inst.c[e.facility, e.city] < inst.c[e.previous, e.city]
        else:
            assert e.city not in seen
        seen[e.city] = e.facility


@settings(max_examples=100, deadline=None)
@given(instances)
def test_greedy2_offer_cap(inst):
    out = greedy2(inst)
    for _, offers, opened in replay_offers(inst, out.trace):
        for i in range(inst.n_f):
            if i not in opened:
                assert offers[i] <= inst.f[i] + 1e-7 * inst.scale


@settings(max_examples=120, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(1, 10),
    st.integers(0, 2**32),
)
def test_star_and_restatement_agree(n_f, n_c, seed):
    inst = random_instance(np.random.default_rng(seed), n_f, n_c, metric=False)
    a, b = greedy1_star(inst), greedy1_restatement(inst)
    assert a.solution.open == b.solution.open
    assert a.solution.assign == b.solution.assign
    assert a.solution.total == pytest.approx(b.solution.total, rel=1e-6)


def test_ratios_against_lp_and_overtightness():
    for inst in metric_batch(30, max_c=20, max_f=8, seed=7):
        bound = lp_bound(inst)
        g1, g2 = greedy1_restatement(inst), greedy2(inst)
        assert g1.solution.total <= 1.861 * bound + 1e-6
        assert g2.solution.total <= 1.61 * bound + 1e-6
        assert check_overtight(inst, g1.cert, 1.861).min() >= -1e-6
        assert check_overtight(inst, g2.cert, 1.61).min() >= -1e-6


def test_greedy2_tradeoff_against_opt(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(1, 7)), int(rng.integers(1, 9)))
        opt = brute_force_opt(inst)
        assert greedy2(inst).solution.total <= opt.facility_cost + 2 * opt.connection_cost + 1e-6
