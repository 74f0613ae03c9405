import numpy as np
import pytest

from facloc.errors import ParameterError
from facloc.model import brute_force_opt, iter_subsets
from facloc.solvers import greedy1, greedy2
from facloc.variants import (
    cost_shares,
    lmp_greedy2,
    solve_fault_tolerant_uniform,
    solve_k_facility,
    solve_robust,
    solve_soft_capacitated,
    solve_with_demands,
    solve_with_penalties,
)

from tests.helpers import make, random_instance


def replicate(inst):
    reps = np.repeat(np.arange(inst.n_c), inst.d.astype(int))
    return make(inst.f, inst.c[:, reps])


def robust_opt(inst, l):
    keep = inst.n_c - l
    return min(inst.f[list(S)].sum() + np.sort(inst.c[list(S)].min(axis=0))[:keep].sum() for S in iter_subsets(inst.n_f))


def k_opt(inst, k):
    return min(inst.f[list(S)].sum() + inst.c[list(S)].min(axis=0).sum() for S in iter_subsets(inst.n_f, k))


class TestDemands:
    def test_hand_example(self):
        out = solve_with_demands(make([4], [[1]], d=[2]))
        assert out.cert.alpha.tolist() == [3.0]
        assert out.solution.total == 6.0 == out.cert.alpha @ np.array([2.0])

    def test_unit_demands_match_base(self, rng):
        inst = random_instance(rng, 5, 8)
        a, b = solve_with_demands(inst), greedy2(inst)
        assert a.solution == b.solution and np.array_equal(a.cert.alpha, b.cert.alpha)

    @pytest.mark.parametrize("alg", ["greedy1", "greedy2"])
    def test_replication(self, rng, alg):
        solver = greedy1 if alg == "greedy1" else greedy2
        for _ in range(20):
            inst = random_instance(rng, 5, 8)
            inst = inst.replace(d=rng.integers(1, 4, inst.n_c).astype(float))
            assert solve_with_demands(inst, alg).solution.total == pytest.approx(solver(replicate(inst)).solution.total, rel=1e-6)

    def test_nonpositive_demand(self):
        with pytest.raises(ParameterError):
            solve_with_demands(make([1], [[1]], d=[0]))

    def test_unknown_algorithm(self):
        with pytest.raises(ParameterError):
            solve_with_demands(make([1], [[1]]), "jv")


class TestPenalties:
    def test_penalty_cheaper_than_star(self):
        sol = solve_with_penalties(make([10], [[0]], p=[3])).solution
        assert sol.total == 3 and sol.unconnected == (0,)

    def test_shared_facility(self):
        out = solve_with_penalties(make([2], [[0, 0]], p=[3, 3]))
        assert out.solution.total == 2 and out.cert.alpha.tolist() == [1.0, 1.0]

    @pytest.mark.parametrize("alg", ["greedy1", "greedy2"])
    def test_infinite_penalties_match_base(self, rng, alg):
        base = greedy1 if alg == "greedy1" else greedy2
        for _ in range(10):
            inst = random_instance(rng, 4, 7)
            a = solve_with_penalties(inst.replace(p=np.full(inst.n_c, np.inf)), alg)
            b = base(inst)
            assert a.solution == b.solution and np.array_equal(a.cert.alpha, b.cert.alpha)
            assert solve_with_penalties(inst, alg).solution == b.solution

    def test_large_penalties_reproduce_base(self, rng):
        for _ in range(10):
            inst = random_instance(rng, 4, 7)
            b = greedy2(inst)
            p = np.full(inst.n_c, b.cert.alpha.max() + 1.0)
            assert solve_with_penalties(inst.replace(p=p)).solution.total == pytest.approx(b.solution.total)

    def test_dual_pays(self, rng):
        for _ in range(20):
            inst = random_instance(rng, 4, 7)
            inst = inst.replace(p=rng.random(inst.n_c) * 0.5)
            out = solve_with_penalties(inst)
            assert out.cert.alpha @ inst.d == pytest.approx(out.solution.total)


class TestFaultTolerant:
    def test_r1_matches_base(self, rng):
        for alg, base in (("greedy1", greedy1), ("greedy2", greedy2)):
            inst = random_instance(rng, 5, 8)
            a, b = solve_fault_tolerant_uniform(inst, 1, alg), base(inst)
            assert a.solution == b.solution and np.array_equal(a.cert.alpha, b.cert.alpha)

    def test_forced_full_opening(self):
        sol = solve_fault_tolerant_uniform(make([1, 1], [[0], [0]]), 2).solution
        assert sol.open == {0, 1} and sol.total == 2

    def test_two_distinct_facilities(self, rng):
        for _ in range(10):
            inst = random_instance(rng, 5, 8)
            out = solve_fault_tolerant_uniform(inst, 2)
            for a in out.solution.assign:
                assert len(a) == 2 and len(set(a)) == 2 and set(a) <= out.solution.open
            assert out.cert.alpha.sum() == pytest.approx(out.solution.total)

    def test_bad_requirement(self):
        with pytest.raises(ParameterError):
            solve_fault_tolerant_uniform(make([1], [[1]]), 2)


class TestRobust:
    def test_full_coverage(self, rng):
        inst = random_instance(rng, 4, 6)
        sol = solve_robust(inst, 0)
        assert not sol.unconnected

    def test_single_city_kept(self):
        inst = make([1], [[3, 1, 2]])
        sol = solve_robust(inst, 2)
        assert sol.assign == ((), (0,), ())
        assert sol.total == 2

    def test_bad_l(self):
        with pytest.raises(ParameterError):
            solve_robust(make([1], [[1]]), 1)

    def test_within_twice_optimum(self, rng):
        for _ in range(30):
            inst = random_instance(rng, 4, 6)
            for l in range(3):
                sol = solve_robust(inst, l)
                assert inst.n_c - len(sol.unconnected) >= inst.n_c - l
                assert sol.total <= 2 * robust_opt(inst, l) + 1e-9


class TestKFacility:
    def test_single_facility(self, rng):
        for _ in range(10):
            inst = random_instance(rng, 5, 8)
            sol = solve_k_facility(inst, 1)
            assert sol.total == pytest.approx(min(inst.f + inst.c.sum(axis=1)))

    def test_slack_constraint(self, rng):
        inst = random_instance(rng, 5, 8)
        assert solve_k_facility(inst, inst.n_f).total <= lmp_greedy2(inst).total + 1e-9

    def test_within_four_times_optimum(self, rng):
        for _ in range(30):
            inst = random_instance(rng, 5, 8)
            for k in (1, 2, 3):
                sol = solve_k_facility(inst, k)
                assert len(sol.open) <= k
                assert sol.total <= 4 * k_opt(inst, k) + 1e-9

    def test_bad_k(self):
        with pytest.raises(ParameterError):
            solve_k_facility(make([1], [[1]]), 0)


def test_lmp_property(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(1, 7)), int(rng.integers(1, 9)))
        sol = lmp_greedy2(inst)
        opt = brute_force_opt(inst).total
        assert sol.connection_cost <= 2 * (opt - sol.facility_cost) + 1e-6


class TestSoftCapacity:
    def test_copies(self):
        sol = solve_soft_capacitated(make([4], [[0, 0, 0]]), 2)
        assert sol.multiplicity == ((0, 2),) and sol.total == 8

    def test_unit_capacity(self, rng):
        inst = random_instance(rng, 4, 9)
        sol = solve_soft_capacitated(inst, 1)
        served = {i: sum(1 for a in sol.assign if a == (i,)) for i in sol.open}
        assert dict(sol.multiplicity) == served

    def test_large_capacity_near_uncapacitated(self, rng):
        for _ in range(10):
            inst = random_instance(rng, 4, 9)
            sol = solve_soft_capacitated(inst, inst.n_c)
            assert all(m == 1 for _, m in sol.multiplicity)
            assert sol.total <= 2 * greedy2(inst).solution.total + 1e-9

    def test_bad_capacity(self):
        with pytest.raises(ParameterError):
            solve_soft_capacitated(make([1], [[1]]), 0)


class TestCostShares:
    def test_single(self):
        assert cost_shares(greedy2(make([5], [[3]]))).tolist() == [8.0]

    def test_sum_and_symmetry(self, rng):
        inst = random_instance(rng, 4, 6)
        out = greedy1(inst)
        assert cost_shares(out).sum() == pytest.approx(out.solution.total)
        row = rng.random((3, 1))
        shares = cost_shares(greedy2(make([1, 2, 3], np.hstack([row, row]))))
        assert shares[0] == shares[1]

    def test_demand_weighting(self):
        inst = make([4], [[1]], d=[2])
        assert cost_shares(solve_with_demands(inst), inst).tolist() == [6.0]
