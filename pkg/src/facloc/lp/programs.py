"""LP builders: the facility-location relaxation and the factor-revealing programs.

Factor-revealing programs are parameterised by the number ``k`` of cities in
a star. Variables are ordered ``a1..ak`` (city duals), ``d1..dk`` (distances
to the star's facility), ``f`` (its opening cost), then auxiliaries:

* ``alg1``: ``x_j_l`` for ``j <= l`` bounds ``max(a_j - d_l, 0)``.
* ``alg2`` / ``tradeoff``: ``r_j_i`` for ``j < i`` is the connection cost of
  city ``j`` just before city ``i`` first connects; ``g_i_j`` bounds
  ``max(r_j_i - d_j, 0)`` and ``h_i_j`` (``i <= j``) bounds ``max(a_i - d_j, 0)``.

Ratio objectives are normalised by fixing the denominator to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from facloc.errors import ParameterError
from facloc.lp.model import LpBuilder, LpModel, LpSolution
from facloc.lp.simplex import simplex_solve
from facloc.model import Instance

#: Largest ``n_f * n_c`` accepted by :func:`build_fl_relaxation`.
FL_SIZE_LIMIT = 20_000

#: Largest star size solved in-process; beyond this, export the model instead.
FRLP_K_LIMIT = 60

KINDS = ("alg1", "alg2", "tradeoff")


def build_fl_relaxation(inst: Instance) -> LpModel:
    """Balinski relaxation: ``min sum f_i y_i + sum d_j c_ij x_ij``.

    Rows are ``sum_i x_ij >= 1`` for every city and ``x_ij <= y_i``.
    """
    n_f, n_c = inst.n_f, inst.n_c
    if n_f * n_c > FL_SIZE_LIMIT:
        raise ParameterError(
            f"relaxation has {n_f * n_c} assignment variables, above the dense limit "
            f"{FL_SIZE_LIMIT}; export the model and use an external solver"
        )
    n = n_f + n_f * n_c
    obj = np.concatenate([inst.f, (inst.c * inst.d[None, :]).ravel()])
    A = np.zeros((n_c + n_f * n_c, n))
    for j in range(n_c):
        A[j, n_f + np.arange(n_f) * n_c + j] = 1.0
    rows = n_c + np.arange(n_f * n_c)
    A[rows, n_f + np.arange(n_f * n_c)] = 1.0
    A[rows, np.repeat(np.arange(n_f), n_c)] = -1.0
    names = [f"y{i + 1}" for i in range(n_f)] + [f"x_{i + 1}_{j + 1}" for i in range(n_f) for j in range(n_c)]
    row_names = [f"cover{j + 1}" for j in range(n_c)] + [f"link_{i + 1}_{j + 1}" for i in range(n_f) for j in range(n_c)]
    return LpModel(
        objective=obj,
        A=A,
        senses=(">=",) * n_c + ("<=",) * (n_f * n_c),
        rhs=np.concatenate([np.ones(n_c), np.zeros(n_f * n_c)]),
        maximize=False,
        var_names=tuple(names),
        row_names=tuple(row_names),
    )


def lp_bound(inst: Instance) -> float:
    """Optimal value of the LP relaxation, a lower bound on any solution."""
    if inst.n_c == 0:
        return 0.0
    sol = simplex_solve(build_fl_relaxation(inst))
    if not sol.optimal:
        raise ParameterError(f"relaxation solve ended with status {sol.status}")
    return sol.objective


@dataclass(frozen=True)
class FrlpSpec:
    """Which factor-revealing program to build.

    ``gamma_f`` is the facility-cost weight and only applies to ``tradeoff``.
    """

    kind: str
    k: int
    gamma_f: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.k < 1:
            raise ParameterError("k must be at least 1")
        if self.gamma_f < 1:
            raise ParameterError("gamma_f must be at least 1")


def _base_vars(b: LpBuilder, k: int) -> None:
    for j in range(1, k + 1):
        b.var(f"a{j}")
    for j in range(1, k + 1):
        b.var(f"d{j}")
    b.var("f")


def _build_alg1(k: int) -> LpModel:
    b = LpBuilder(maximize=True)
    _base_vars(b, k)
    for j in range(1, k + 1):
        for l in range(j, k + 1):
            b.var(f"x_{j}_{l}")
    b.objective({f"a{j}": 1.0 for j in range(1, k + 1)})
    b.row({"f": 1.0, **{f"d{j}": 1.0 for j in range(1, k + 1)}}, "<=", 1.0, "norm")
    for j in range(1, k):
        b.row({f"a{j}": 1.0, f"a{j + 1}": -1.0}, "<=", 0.0, f"sorted{j}")
    # with the duals sorted, only pairs j > l can bind
    for j in range(1, k + 1):
        for l in range(1, j):
            b.row({f"a{j}": 1.0, f"a{l}": -1.0, f"d{j}": -1.0, f"d{l}": -1.0}, "<=", 0.0, f"tri_{j}_{l}")
    for j in range(1, k + 1):
        for l in range(j, k + 1):
            b.row({f"a{j}": 1.0, f"d{l}": -1.0, f"x_{j}_{l}": -1.0}, "<=", 0.0, f"excess_{j}_{l}")
    for j in range(1, k + 1):
        b.row({**{f"x_{j}_{l}": 1.0 for l in range(j, k + 1)}, "f": -1.0}, "<=", 0.0, f"paid{j}")
    return b.build()


def _build_alg2(k: int, gamma_f: float | None) -> LpModel:
    b = LpBuilder(maximize=True)
    _base_vars(b, k)
    for j in range(1, k + 1):
        for i in range(j + 1, k + 1):
            b.var(f"r_{j}_{i}")
    for i in range(1, k + 1):
        for j in range(1, i):
            b.var(f"g_{i}_{j}")
    for i in range(1, k + 1):
        for j in range(i, k + 1):
            b.var(f"h_{i}_{j}")

    alphas = {f"a{i}": 1.0 for i in range(1, k + 1)}
    dists = {f"d{i}": 1.0 for i in range(1, k + 1)}
    if gamma_f is None:
        b.objective(alphas)
        b.row({"f": 1.0, **dists}, "=", 1.0, "norm")
    else:
        b.objective({**alphas, "f": -gamma_f})
        b.row(dists, "=", 1.0, "norm")
    for i in range(1, k):
        b.row({f"a{i}": 1.0, f"a{i + 1}": -1.0}, "<=", 0.0, f"sorted{i}")
    for j in range(1, k + 1):
        for i in range(j + 1, k):
            b.row({f"r_{j}_{i + 1}": 1.0, f"r_{j}_{i}": -1.0}, "<=", 0.0, f"mono_{j}_{i}")
    for i in range(1, k + 1):
        for j in range(1, i):
            b.row({f"a{i}": 1.0, f"r_{j}_{i}": -1.0, f"d{i}": -1.0, f"d{j}": -1.0}, "<=", 0.0, f"tri_{j}_{i}")
    for i in range(1, k + 1):
        for j in range(1, i):
            b.row({f"r_{j}_{i}": 1.0, f"d{j}": -1.0, f"g_{i}_{j}": -1.0}, "<=", 0.0, f"switch_{i}_{j}")
    for i in range(1, k + 1):
        for j in range(i, k + 1):
            b.row({f"a{i}": 1.0, f"d{j}": -1.0, f"h_{i}_{j}": -1.0}, "<=", 0.0, f"excess_{i}_{j}")
    for i in range(1, k + 1):
        terms = {f"g_{i}_{j}": 1.0 for j in range(1, i)}
        terms.update({f"h_{i}_{j}": 1.0 for j in range(i, k + 1)})
        terms["f"] = -1.0
        b.row(terms, "<=", 0.0, f"offer{i}")
    return b.build()


def build_frlp(spec: FrlpSpec) -> LpModel:
    """Factor-revealing LP for the given algorithm and star size."""
    if spec.kind == "alg1":
        return _build_alg1(spec.k)
    if spec.kind == "alg2":
        return _build_alg2(spec.k, None)
    return _build_alg2(spec.k, spec.gamma_f)


def solve_frlp_full(spec: FrlpSpec) -> tuple[LpModel, LpSolution]:
    if spec.k > FRLP_K_LIMIT:
        raise ParameterError(
            f"k={spec.k} exceeds the in-process limit {FRLP_K_LIMIT}; export the LP and solve externally"
        )
    model = build_frlp(spec)
    sol = simplex_solve(model)
    if not sol.optimal:
        raise ParameterError(f"factor-revealing LP for {spec} ended with status {sol.status}")
    return model, sol


@lru_cache(maxsize=None)
def solve_frlp(spec: FrlpSpec) -> float:
    """Optimal value ``z_k`` of the factor-revealing program."""
    return solve_frlp_full(spec)[1].objective


def solve_frlp_cumulative(spec: FrlpSpec) -> float:
    """``max_{i <= k} z_i``; the form in which reference tables report values."""
    return max(solve_frlp(FrlpSpec(spec.kind, i, spec.gamma_f)) for i in range(1, spec.k + 1))


def tight_instance(model: LpModel, solution: LpSolution, margin: float = 1e-6) -> Instance:
    """Instance on which greedy1 pays the full value of an ``alg1`` LP point.

    City ``j`` sits at distance ``a_j`` from a free facility ``j`` and at
    distance ``d_j`` from facility ``k+1`` of cost ``f``; other edges are
    ``d_i + d_j + a_i``. ``margin`` is added to ``f`` so that facility ``k+1``
    is never paid for at the same instant a city reaches its free facility:
    the solvers open facilities before connecting cities on ties, and the
    construction needs the opposite order.
    """
    names = model.var_names
    if "x_1_1" not in names:
        raise ParameterError("tight instances are built from the alg1 program only")
    k = sum(1 for nm in names if nm.startswith("a"))
    x = solution.x
    if model.max_violation(x) > 1e-6:
        raise ParameterError("solution vector violates the factor-revealing LP")
    a = np.array([x[model.index(f"a{j}")] for j in range(1, k + 1)])
    d = np.array([x[model.index(f"d{j}")] for j in range(1, k + 1)])
    fac = float(x[model.index("f")])
    a = np.maximum(a, 0.0)
    d = np.maximum(d, 0.0)
    c = d[:, None] + d[None, :] + a[:, None]
    c[np.arange(k), np.arange(k)] = a
    c = np.vstack([c, d[None, :]])
    f = np.concatenate([np.zeros(k), [fac + margin]])
    return Instance(f=f, c=c, metric=True)
