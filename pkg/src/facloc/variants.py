"""Problem variants layered on the dual-ascent solvers."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from facloc.errors import ParameterError
from facloc.model import Instance, Solution, make_solution
from facloc.solvers import SolverOutput, _to_output, dual_ascent, greedy2

_MODES = {"greedy1": "withdraw", "greedy2": "switch"}

#: Binary-search steps used by :func:`solve_k_facility`.
K_SEARCH_STEPS = 64


def _mode(alg: str) -> str:
    try:
        return _MODES[alg]
    except KeyError:
        raise ParameterError(f"algorithm must be one of {sorted(_MODES)}, got {alg!r}") from None


def solve_with_demands(inst: Instance, alg: str = "greedy2") -> SolverOutput:
    """City ``j`` raises its dual at rate ``d_j``; cost counts ``d_j c_ij``.

    ``sum(d * cert.alpha)`` equals the total cost.
    """
    if (inst.d <= 0).any():
        raise ParameterError("every demand must be positive")
    return _to_output(inst, dual_ascent(inst, _mode(alg)))


def solve_with_penalties(inst: Instance, alg: str = "greedy2") -> SolverOutput:
    """Cities stop raising their dual at their penalty and may stay unconnected.

    A capped city keeps offering its frozen amount and can still join a
    facility that opens later. Cities with an infinite penalty behave as in
    the base problem.
    """
    if inst.p is None:
        base = inst.replace(p=np.full(inst.n_c, np.inf))
        return solve_with_penalties(base, alg)
    if (inst.d <= 0).any():
        raise ParameterError("every demand must be positive")
    caps = np.asarray(inst.p, dtype=np.float64) / inst.d
    state = dual_ascent(inst, _mode(alg), caps=caps)
    return _to_output(inst, state, penalize=True)


def solve_fault_tolerant_uniform(inst: Instance, r: int, alg: str = "greedy1") -> SolverOutput:
    """Every city ends connected to ``r`` distinct open facilities.

    A city keeps raising its dual and offering to unopened facilities until
    it has ``r`` connections. Switching offers are only made when ``r == 1``.
    ``cert.alpha[j]`` is the city's total payment, the sum of the times at
    which it gained each connection, so it still adds up to the total cost.
    """
    if not 1 <= r <= inst.n_f:
        raise ParameterError(f"requirement r={r} must lie in 1..{inst.n_f}")
    if (inst.d <= 0).any():
        raise ParameterError("every demand must be positive")
    state = dual_ascent(inst, _mode(alg), requirement=r)
    return _to_output(inst, state)


def solve_robust(inst: Instance, l: int) -> Solution:
    """Connect at least ``n_c - l`` cities, leaving the rest unserved.

    For every guess ``g`` of the most expensive facility used, facilities
    costlier than ``g`` are discarded, ``g`` is opened up front, and greedy1
    runs until ``n_c - l`` cities are connected. The cheapest guess wins, with
    ties going to the lower guess index.
    """
    n_c = inst.n_c
    if not 0 <= l < n_c:
        raise ParameterError(f"l={l} must satisfy 0 <= l < n_c={n_c}")
    base = inst.replace(p=None)
    best: Solution | None = None
    for g in range(inst.n_f):
        allowed = base.f <= base.f[g]
        state = dual_ascent(base, "withdraw", forced_open=g, allowed=allowed, stop_when_linked=n_c - l)
        sol = make_solution(base, np.nonzero(state.opened)[0], state.links, penalize_unconnected=False)
        if best is None or sol.total < best.total - base.tol:
            best = sol
    assert best is not None
    return best


def _nearest_assignment(inst: Instance, open_set: Sequence[int]) -> list[tuple[int, ...]]:
    opened = sorted(open_set)
    pick = np.argmin(inst.c[opened], axis=0)
    return [(opened[int(k)],) for k in pick]


def lmp_greedy2(inst: Instance, scale: float = 2.0) -> Solution:
    """greedy2 on the instance with opening costs multiplied by ``scale``.

    The returned solution is costed on the original instance.
    """
    scaled = inst.replace(f=inst.f * scale)
    out = greedy2(scaled)
    return make_solution(inst, out.solution.open, out.solution.assign, penalize_unconnected=False)


def solve_k_facility(inst: Instance, k: int) -> Solution:
    """Open at most ``k`` facilities, via a Lagrangian search over a uniform surcharge.

    Each probe runs the LMP-2 subroutine (greedy2 with doubled opening
    costs) after adding surcharge ``z`` to every opening cost; larger ``z``
    opens fewer facilities. Every probe with at most ``k`` open facilities is
    reassigned to nearest facilities and costed on the original instance; the
    best single facility is also a candidate, so a feasible answer always
    exists. Returns the cheapest candidate.
    """
    if not 1 <= k <= inst.n_f:
        raise ParameterError(f"k={k} must lie in 1..{inst.n_f}")
    base = inst.replace(p=None)
    singles = base.f + base.c @ base.d
    g = int(np.argmin(singles))
    best = make_solution(base, [g], [(g,)] * base.n_c, penalize_unconnected=False)

    def probe(z: float) -> int:
        nonlocal best
        out = greedy2(base.replace(f=2.0 * base.f + z))
        opened = sorted(out.solution.open)
        if len(opened) <= k:
            cand = make_solution(base, opened, _nearest_assignment(base, opened), penalize_unconnected=False)
            if cand.total < best.total - base.tol:
                best = cand
        return len(opened)

    if probe(0.0) > k:
        lo, hi = 0.0, base.n_c * (float(base.c.max(initial=0.0)) + float(base.f.max(initial=0.0))) + 1.0
        for _ in range(K_SEARCH_STEPS):
            mid = 0.5 * (lo + hi)
            if probe(mid) > k:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
    return best


def solve_soft_capacitated(inst: Instance, u: ArrayLike | int) -> Solution:
    """Facilities may be opened several times, each copy serving ``u_i`` cities.

    Solves the uncapacitated instance with ``c'_ij = c_ij + f_i/u_i`` using
    greedy2, then opens facility ``i`` ``ceil(k_i/u_i)`` times where
    ``k_i`` is the number of cities it serves.
    """
    cap = np.broadcast_to(np.asarray(u), (inst.n_f,)).astype(np.float64)
    if (cap < 1).any() or (cap != np.floor(cap)).any():
        raise ParameterError("capacities must be integers >= 1")
    base = inst.replace(p=None)
    surcharge = base.f / cap
    shifted = base.replace(c=base.c + surcharge[:, None], metric=False)
    out = greedy2(shifted)
    served: dict[int, int] = {}
    for a in out.solution.assign:
        for i in a:
            served[i] = served.get(i, 0) + 1
    copies = {i: math.ceil(n / cap[i]) for i, n in served.items()}
    return make_solution(base, copies.keys(), out.solution.assign, penalize_unconnected=False, multiplicity=copies)


def cost_shares(out: SolverOutput, inst: Instance | None = None) -> NDArray[np.float64]:
    """Each city's share of the total cost: its dual, weighted by demand if given."""
    alpha = np.asarray(out.cert.alpha, dtype=np.float64)
    if inst is not None:
        return alpha * inst.d
    return alpha.copy()


__all__ = [
    "cost_shares",
    "lmp_greedy2",
    "solve_fault_tolerant_uniform",
    "solve_k_facility",
    "solve_robust",
    "solve_soft_capacitated",
    "solve_with_demands",
    "solve_with_penalties",
]
