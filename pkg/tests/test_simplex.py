import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from facloc.errors import StructuralError
from facloc.lp import LpBuilder, LpModel, simplex_solve


def highs(model: LpModel):
    sign = -1.0 if model.maximize else 1.0
    ub = [model.A[r] if s == "<=" else -model.A[r] for r, s in enumerate(model.senses) if s != "="]
    bu = [model.rhs[r] if s == "<=" else -model.rhs[r] for r, s in enumerate(model.senses) if s != "="]
    eq = [r for r, s in enumerate(model.senses) if s == "="]
    res = linprog(
        sign * model.objective,
        A_ub=np.array(ub) if ub else None,
        b_ub=np.array(bu) if bu else None,
        A_eq=model.A[eq] if eq else None,
        b_eq=model.rhs[eq] if eq else None,
        bounds=list(zip(model.lower, model.upper)),
        method="highs",
    )
    return res


def test_trivial_max():
    m = LpModel(np.array([1.0]), np.array([[1.0]]), ("<=",), np.array([1.0]), maximize=True)
    sol = simplex_solve(m)
    assert sol.optimal and sol.objective == pytest.approx(1.0)


def test_trivial_min():
    m = LpModel(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), (">=",), np.array([2.0]))
    assert simplex_solve(m).objective == pytest.approx(2.0)


def test_infeasible():
    m = LpModel(np.array([1.0]), np.array([[1.0], [1.0]]), ("<=", ">="), np.array([1.0, 2.0]))
    assert simplex_solve(m).status == "infeasible"


def test_unbounded():
    m = LpModel(np.array([1.0]), np.zeros((1, 1)), ("<=",), np.array([1.0]), maximize=True)
    assert simplex_solve(m).status == "unbounded"


def test_iteration_limit():
    m = LpModel(np.ones(3), -np.eye(3), ("<=",) * 3, np.full(3, -1.0))
    assert simplex_solve(m, max_iters=1).status == "iteration-limit"


def test_beale_cycling_example():
    # Dantzig's rule with largest-coefficient ties cycles here without anti-cycling
    m = LpModel(
        np.array([-0.75, 20.0, -0.5, 6.0]),
        np.array([[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]]),
        ("<=", "<=", "<="),
        np.array([0.0, 0.0, 1.0]),
    )
    sol = simplex_solve(m)
    assert sol.optimal and sol.objective == pytest.approx(-1.25)


def test_bounds_and_free_variables():
    # min x - y with x free, 1 <= y <= 2, x + y >= -3
    m = LpModel(
        np.array([1.0, -1.0]),
        np.array([[1.0, 1.0]]),
        (">=",),
        np.array([-3.0]),
        lower=np.array([-np.inf, 1.0]),
        upper=np.array([np.inf, 2.0]),
    )
    sol = simplex_solve(m)
    assert sol.objective == pytest.approx(-7.0)
    assert sol.x == pytest.approx([-5.0, 2.0])


def test_redundant_equalities():
    m = LpModel(np.array([1.0, 2.0]), np.array([[1.0, 1.0], [2.0, 2.0]]), ("=", "="), np.array([1.0, 2.0]))
    sol = simplex_solve(m)
    assert sol.optimal and sol.objective == pytest.approx(1.0)


def test_model_validation():
    with pytest.raises(StructuralError):
        LpModel(np.ones(2), np.ones((1, 2)), ("<=", "<="), np.ones(1))
    with pytest.raises(StructuralError):
        LpModel(np.ones(1), np.ones((1, 1)), ("<",), np.ones(1))
    with pytest.raises(StructuralError):
        LpModel(np.ones(1), np.ones((1, 1)), ("<=",), np.array([np.inf]))


def test_builder_names():
    b = LpBuilder(maximize=True)
    b.var("u")
    b.var("v")
    b.objective({"u": 1.0, "v": 2.0})
    b.row({"u": 1.0, "v": 1.0}, "<=", 4.0, "cap")
    m = b.build()
    assert m.var_names == ("u", "v") and m.row_names == ("cap",)
    sol = simplex_solve(m)
    assert sol.value(m, "v") == pytest.approx(4.0)
    with pytest.raises(StructuralError):
        b.var("u")


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(1, 6),
    st.integers(0, 2**32),
    st.booleans(),
)
def test_agrees_with_highs(n, m, seed, maximize):
    rng = np.random.default_rng(seed)
    # small integer data makes degenerate vertices common
    A = rng.integers(-3, 4, (m, n)).astype(float)
    senses = tuple(rng.choice(["<=", ">=", "="], m))
    rhs = rng.integers(-4, 5, m).astype(float)
    lower = np.where(rng.random(n) < 0.2, -np.inf, rng.integers(-2, 1, n).astype(float))
    upper = np.where(rng.random(n) < 0.5, np.inf, lower + rng.integers(1, 4, n))
    upper = np.where(np.isfinite(upper), upper, np.inf)
    model = LpModel(rng.integers(-3, 4, n).astype(float), A, senses, rhs, maximize=maximize, lower=lower, upper=upper)
    ours = simplex_solve(model)
    ref = highs(model)
    if ref.status == 2:
        assert ours.status == "infeasible"
    elif ref.status == 3:
        assert ours.status == "unbounded"
    else:
        assert ours.optimal
        value = -ref.fun if maximize else ref.fun
        assert ours.objective == pytest.approx(value, abs=1e-7)
        assert model.max_violation(ours.x) <= 1e-7
        assert model.objective @ ours.x == pytest.approx(ours.objective, abs=1e-7)
