"""Two-phase primal simplex on a dense tableau.

Pricing uses Dantzig's rule; after a run of degenerate pivots without
objective progress the solver switches to Bland's rule, which cannot cycle,
and returns to Dantzig once the objective moves again.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import blas

from facloc.lp.model import LpModel, LpSolution

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
STALL_LIMIT = 50


class _Tableau:
    """Minimisation tableau; row 0 holds reduced costs, column -1 the rhs."""

    def __init__(self, T: NDArray[np.float64], basis: NDArray[np.intp]):
        self.T = T
        self.basis = basis
        self.iterations = 0

    def pivot(self, r: int, col: int) -> None:
        T = self.T
        T[r] /= T[r, col]
        pcol = T[:, col].copy()
        pcol[r] = 0.0
        rows = np.nonzero(np.abs(pcol) > 1e-14)[0]
        if rows.size > T.shape[0] // 4:
            # in-place rank-1 update through the Fortran-ordered transpose view
            blas.dger(-1.0, T[r].copy(), pcol, a=T.T, overwrite_a=1)
        elif rows.size:
            T[rows] -= np.outer(pcol[rows], T[r])
        T[:, col] = 0.0
        T[r, col] = 1.0
        self.basis[r - 1] = col
        self.iterations += 1

    def run(self, ncols: int, max_iters: int) -> str:
        """Optimise over the first ``ncols`` columns; returns a status string."""
        T = self.T
        stall = 0
        best = T[0, -1]
        while True:
            if self.iterations >= max_iters:
                return "iteration-limit"
            red = T[0, :ncols]
            if stall >= STALL_LIMIT:
                cand = np.nonzero(red < -PIVOT_TOL)[0]
                if cand.size == 0:
                    return "optimal"
                col = int(cand[0])
            else:
                col = int(np.argmin(red))
                if red[col] >= -PIVOT_TOL:
                    return "optimal"
            a = T[1:, col]
            pos = np.nonzero(a > PIVOT_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = T[1:, -1][pos] / a[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
            if stall >= STALL_LIMIT:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(a[ties])])
            self.pivot(r + 1, col)
            # the rhs column stores -objective in row 0
            if T[0, -1] < best - 1e-12 * max(1.0, abs(best)):
                best = T[0, -1]
                stall = 0
            else:
                stall += 1


def _standard_form(model: LpModel):
    """Rewrite as ``min c@y, A y (sense) b, y >= 0`` with ``b >= 0``.

    Returns the pieces plus a function mapping ``y`` back to ``x``.
    """
    n = model.num_vars
    lo, hi = model.lower, model.upper
    free = ~np.isfinite(lo)
    shift = np.where(free, 0.0, lo)
    cols = [model.A]
    costs = [model.objective]
    if free.any():
        cols.append(-model.A[:, free])
        costs.append(-model.objective[free])
    A = np.hstack(cols)
    c = np.concatenate(costs)
    if model.maximize:
        c = -c
    b = model.rhs - model.A @ shift
    senses = list(model.senses)
    extra_rows = []
    for k in np.nonzero(np.isfinite(hi))[0]:
        row = np.zeros(A.shape[1])
        row[k] = 1.0
        if free[k]:
            row[n + int(np.sum(free[:k]))] = -1.0
        extra_rows.append((row, hi[k] - shift[k]))
    if extra_rows:
        A = np.vstack([A] + [r for r, _ in extra_rows])
        b = np.concatenate([b, [v for _, v in extra_rows]])
        senses += ["<="] * len(extra_rows)
    neg = b < 0
    A = A.copy()
    A[neg] *= -1
    b = np.abs(b)
    flip = {"<=": ">=", ">=": "<=", "=": "="}
    senses = [flip[s] if ng else s for s, ng in zip(senses, neg)]

    free_idx = np.nonzero(free)[0]

    def recover(y: NDArray[np.float64]) -> NDArray[np.float64]:
        x = y[:n] + shift
        if free_idx.size:
            x[free_idx] -= y[n:]
        return x

    return A, b, c, senses, recover


def simplex_solve(model: LpModel, max_iters: int = 200_000) -> LpSolution:
    """Solve ``model`` with the two-phase dense tableau simplex."""
    A, b, c, senses, recover = _standard_form(model)
    m, nv = A.shape
    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    ncols = nv + n_slack + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[1:, :nv] = A
    T[1:, -1] = b
    basis = np.empty(m, dtype=np.intp)
    s_col = nv
    a_col = nv + n_slack
    art_cols = []
    for r, s in enumerate(senses):
        if s == "<=":
            T[r + 1, s_col] = 1.0
            basis[r] = s_col
            s_col += 1
        else:
            if s == ">=":
                T[r + 1, s_col] = -1.0
                s_col += 1
            T[r + 1, a_col] = 1.0
            basis[r] = a_col
            art_cols.append(a_col)
            a_col += 1

    tab = _Tableau(T, basis)
    struct = nv + n_slack
    if art_cols:
        # phase 1: minimise the sum of artificials
        art_rows = [r for r in range(m) if basis[r] >= struct]
        T[0, :] = 0.0
        T[0, art_cols] = 1.0
        for r in art_rows:
            T[0] -= T[r + 1]
        status = tab.run(ncols, max_iters)
        if status == "iteration-limit":
            return LpSolution(status, float("nan"), np.full(model.num_vars, np.nan), tab.iterations)
        if -T[0, -1] > FEAS_TOL * max(1.0, float(b.max(initial=0.0))):
            return LpSolution("infeasible", float("nan"), np.full(model.num_vars, np.nan), tab.iterations)
        # drive remaining artificials out of the basis
        keep = np.ones(m + 1, dtype=bool)
        for r in range(m):
            if basis[r] >= struct:
                row = T[r + 1, :struct]
                nz = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
                if nz.size:
                    tab.pivot(r + 1, int(nz[0]))
                else:
                    keep[r + 1] = False
        if not keep.all():
            tab.basis = basis[keep[1:]]
            T = T[keep]
            tab.T = T
        T = np.ascontiguousarray(np.delete(T, art_cols, axis=1))
        tab.T = T
        basis = tab.basis
        m = T.shape[0] - 1

    # phase 2
    T[0, :] = 0.0
    T[0, :nv] = c
    for r in range(m):
        k = basis[r]
        if T[0, k] != 0.0:
            T[0] -= T[0, k] * T[r + 1]
    status = tab.run(struct, max_iters)
    y = np.zeros(struct)
    y[basis] = T[1:, -1]
    x = recover(y[:nv])
    obj = float(model.objective @ x)
    if status != "optimal":
        return LpSolution(status, float("nan") if status == "unbounded" else obj, x, tab.iterations)
    return LpSolution("optimal", obj, x, tab.iterations)
