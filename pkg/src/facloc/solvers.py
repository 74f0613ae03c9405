"""Greedy dual-ascent solvers: greedy1 (two forms), greedy2 and the JV primal-dual baseline.

All three time-based algorithms share one event loop, :func:`dual_ascent`.
Every unconnected city raises its dual ``alpha_j`` at rate ``d_j`` and offers
part of it to unopened facilities; a facility opens once the offers cover its
cost. The algorithms differ only in what an already connected city offers:

``withdraw``
    nothing (greedy1).
``switch``
    the saving ``c[i', j] - c[i, j]`` it would get by moving from its current
    facility ``i'`` (greedy2).
``keep``
    its frozen contribution ``alpha_j - c[i, j]`` (phase 1 of JV).

Ties at equal times are broken deterministically: facility openings first,
then connections, then penalty freezes; within a kind the lowest index wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from facloc.errors import ParameterError
from facloc.model import DualCertificate, Event, EventTrace, Instance, Solution, make_solution

OFFER_MODES = ("withdraw", "switch", "keep")


@dataclass(frozen=True)
class SolverOutput:
    """Result of one solver run.

    ``cert.alpha`` sums to ``solution.total`` for the greedy algorithms (with
    demand weights: ``sum(d * alpha)``). For JV it is the phase-1 dual, which
    is feasible rather than cost-covering.
    """

    solution: Solution
    cert: DualCertificate
    trace: EventTrace


@dataclass
class AscentState:
    """Raw outcome of :func:`dual_ascent`, before conversion to a Solution."""

    alpha: NDArray[np.float64]
    paid: NDArray[np.float64]
    links: list[list[int]]
    opened: NDArray[np.bool_]
    open_time: NDArray[np.float64]
    events: list[Event]


def _opening_times(
    f: NDArray[np.float64],
    constant: NDArray[np.float64],
    weights: NDArray[np.float64],
    c_sorted: NDArray[np.float64],
    order: NDArray[np.intp],
    now: float,
    tol: float,
) -> NDArray[np.float64]:
    """Earliest ``t >= now`` with ``constant_i + sum_j w_j max(t - c_ij, 0) >= f_i``.

    The paid amount is convex piecewise linear in ``t`` with breakpoints at the
    sorted connection costs, so the root sits on the segment after the last
    breakpoint whose value is still below ``f_i``.
    """
    w = weights[order]
    W = np.cumsum(w, axis=1)
    S = np.cumsum(w * c_sorted, axis=1)
    val = constant[:, None] + c_sorted * W - S
    below = (val < f[:, None]).sum(axis=1)
    rows = np.arange(f.shape[0])
    k = np.maximum(below - 1, 0)
    Wk = W[rows, k] if W.shape[1] else np.zeros_like(f)
    Sk = S[rows, k] if S.shape[1] else np.zeros_like(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.where(Wk > 0, (f - constant + Sk) / Wk, np.inf)
    root = np.where((below == 0) | (constant >= f - tol), now, root)
    return np.maximum(root, now)


def dual_ascent(
    inst: Instance,
    mode: str,
    *,
    caps: NDArray[np.float64] | None = None,
    requirement: int = 1,
    forced_open: int | None = None,
    allowed: NDArray[np.bool_] | None = None,
    stop_when_linked: int | None = None,
) -> AscentState:
    """Run the continuous-time dual ascent until no city is still growing.

    Args:
        inst: the instance; ``inst.d`` gives each city's growth rate.
        mode: one of ``withdraw``, ``switch``, ``keep`` (see module docstring).
        caps: per-city ceilings on ``alpha`` (penalties). A city reaching its
            cap stops growing but keeps offering ``cap - c_ij``.
        requirement: number of distinct facilities each city must reach.
        forced_open: facility opened for free at time 0.
        allowed: mask of facilities that may be opened.
        stop_when_linked: halt once this many cities have a connection.
    """
    if mode not in OFFER_MODES:
        raise ParameterError(f"unknown offer mode {mode!r}")
    f, c, w = inst.f, inst.c, inst.d
    n_f, n_c = inst.n_f, inst.n_c
    tol = inst.tol
    cap = np.full(n_c, np.inf) if caps is None else np.asarray(caps, dtype=np.float64)
    allow = np.ones(n_f, dtype=bool) if allowed is None else np.asarray(allowed, dtype=bool)
    switching = mode == "switch" and requirement == 1

    order = np.argsort(c, axis=1, kind="stable")
    c_sorted = np.take_along_axis(c, order, axis=1)

    opened = np.zeros(n_f, dtype=bool)
    open_time = np.full(n_f, np.inf)
    linked = np.zeros((n_f, n_c), dtype=bool)
    growing = np.ones(n_c, dtype=bool)
    capped = np.zeros(n_c, dtype=bool)
    alpha = np.zeros(n_c)
    paid = np.zeros(n_c)
    links: list[list[int]] = [[] for _ in range(n_c)]
    events: list[Event] = []
    n_linked = 0
    t = 0.0

    if forced_open is not None:
        opened[forced_open] = True
        open_time[forced_open] = 0.0
        events.append(Event(0.0, "open", facility=forced_open, reason="forced"))

    def link(j: int, i: int, when: float, reason: str) -> None:
        nonlocal n_linked
        if not links[j]:
            n_linked += 1
        links[j].append(i)
        linked[i, j] = True
        if capped[j]:
            paid[j] += cap[j]
            capped[j] = False
        else:
            paid[j] += when
        if len(links[j]) >= requirement:
            if growing[j]:
                alpha[j] = when
            growing[j] = False
        events.append(Event(when, "connect", facility=i, city=j, reason=reason))

    while growing.any():
        if stop_when_linked is not None and n_linked >= stop_when_linked:
            break

        # offers that do not change while time advances
        constant = np.zeros(n_f)
        if capped.any():
            constant += np.maximum(cap[capped][None, :] - c[:, capped], 0.0) @ w[capped]
        settled = ~growing & ~capped
        if settled.any():
            if switching:
                idx = np.nonzero(settled)[0]
                cur = c[[links[j][0] for j in idx], idx]
                constant += np.maximum(cur[None, :] - c[:, idx], 0.0) @ w[idx]
            elif mode == "keep":
                constant += np.maximum(alpha[settled][None, :] - c[:, settled], 0.0) @ w[settled]

        t_open = _opening_times(f, constant, np.where(growing, w, 0.0), c_sorted, order, t, tol)
        t_open[opened | ~allow] = np.inf

        reach = np.where(opened[:, None] & ~linked, c, np.inf)
        t_conn = np.full(n_c, np.inf)
        t_conn[growing] = np.maximum(reach[:, growing].min(axis=0, initial=np.inf), t)
        t_frz = np.where(growing & np.isfinite(cap), np.maximum(cap, t), np.inf)

        T = min(t_open.min(initial=np.inf), t_conn.min(initial=np.inf), t_frz.min(initial=np.inf))
        if not np.isfinite(T):
            raise ParameterError("no facility can ever serve the remaining cities")
        limit = T + tol

        if (t_open <= limit).any():
            i = int(np.argmax(t_open <= limit))
            t = max(t, float(t_open[i]))
            alpha[growing] = t
            opened[i] = True
            open_time[i] = t
            events.append(Event(t, "open", facility=i))
            for j in np.nonzero(growing & (c[i] <= t + tol))[0]:
                link(int(j), i, t, "paid")
            for j in np.nonzero(capped & (c[i] <= cap + tol))[0]:
                link(int(j), i, t, "paid")
            if switching:
                for j in np.nonzero(settled)[0]:
                    j = int(j)
                    prev = links[j][0]
                    if c[prev, j] - c[i, j] > tol:
                        links[j][0] = i
                        linked[prev, j] = False
                        linked[i, j] = True
                        events.append(Event(t, "connect", facility=i, city=j, previous=prev, reason="switch"))
        elif (t_conn <= limit).any():
            j = int(np.argmax(t_conn <= limit))
            t = max(t, float(t_conn[j]))
            alpha[growing] = t
            i = int(np.argmin(reach[:, j]))
            link(j, i, t, "tight")
        else:
            j = int(np.argmax(t_frz <= limit))
            t = max(t, float(t_frz[j]))
            alpha[growing] = t
            alpha[j] = cap[j]
            growing[j] = False
            capped[j] = True
            events.append(Event(t, "freeze", city=j, reason="penalty"))

    alpha[growing] = t
    paid[capped] = cap[capped]
    return AscentState(alpha, paid, links, opened, open_time, events)


def _check_rates(inst: Instance) -> None:
    if (inst.d <= 0).any():
        raise ParameterError("all demands must be positive for the dual-ascent solvers")


def _to_output(inst: Instance, state: AscentState, *, penalize: bool = False) -> SolverOutput:
    sol = make_solution(
        inst, np.nonzero(state.opened)[0], state.links, penalize_unconnected=penalize
    )
    return SolverOutput(sol, DualCertificate(state.paid.copy()), EventTrace(tuple(state.events)))


def greedy1_restatement(inst: Instance) -> SolverOutput:
    """greedy1 as a dual ascent where connected cities withdraw their offers."""
    _check_rates(inst)
    return _to_output(inst, dual_ascent(inst, "withdraw"))


def greedy2(inst: Instance) -> SolverOutput:
    """greedy2: connected cities keep offering their switching savings."""
    _check_rates(inst)
    return _to_output(inst, dual_ascent(inst, "switch"))


def greedy1_star(inst: Instance) -> SolverOutput:
    """greedy1 in its direct form: repeatedly take the most cost-effective star.

    For each facility only prefixes of the unconnected cities sorted by
    connection cost are candidates. Ties go to the lowest ratio, then the
    lowest facility index, then the smallest star.
    """
    if not inst.has_unit_demands:
        raise ParameterError("the star form of greedy1 needs unit demands")
    f = inst.f.copy()
    c = inst.c
    n_f, n_c = inst.n_f, inst.n_c
    tol = inst.tol
    order = np.argsort(c, axis=1, kind="stable")
    c_sorted = np.take_along_axis(c, order, axis=1)
    unconnected = np.ones(n_c, dtype=bool)
    opened = np.zeros(n_f, dtype=bool)
    alpha = np.zeros(n_c)
    assign: list[list[int]] = [[] for _ in range(n_c)]
    events: list[Event] = []

    while unconnected.any():
        m = unconnected[order]
        size = np.cumsum(m, axis=1)
        total = np.cumsum(np.where(m, c_sorted, 0.0), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(m, (f[:, None] + total) / size, np.inf)
        best = ratio.min()
        hit = ratio <= best + tol
        i = int(np.argmax(hit.any(axis=1)))
        pos = int(np.argmax(hit[i]))
        r = float(ratio[i, pos])
        star = order[i, : pos + 1][m[i, : pos + 1]]
        if not opened[i]:
            opened[i] = True
            events.append(Event(r, "open", facility=i))
        f[i] = 0.0
        for j in sorted(int(x) for x in star):
            unconnected[j] = False
            alpha[j] = r
            assign[j].append(i)
            events.append(Event(r, "connect", facility=i, city=j, reason="star"))

    sol = make_solution(inst, np.nonzero(opened)[0], assign, penalize_unconnected=False)
    return SolverOutput(sol, DualCertificate(alpha), EventTrace(tuple(events)))


def greedy1(inst: Instance) -> SolverOutput:
    """Default entry point for greedy1 (the event-driven restatement)."""
    return greedy1_restatement(inst)


def jv(inst: Instance) -> SolverOutput:
    """JV primal-dual algorithm.

    Phase 1 grows duals without withdrawal and temporarily opens every facility
    that gets paid for. Phase 2 keeps a maximal set of temporarily open
    facilities, scanned by opening time, such that no city contributes
    positively to two of them; each city then goes to its nearest kept facility.
    """
    _check_rates(inst)
    state = dual_ascent(inst, "keep")
    tol = inst.tol
    alpha = state.alpha
    temp = [int(i) for i in np.argsort(state.open_time, kind="stable") if state.opened[i]]
    contributes = (alpha[None, :] - inst.c) > tol
    kept: list[int] = []
    for i in temp:
        if not any((contributes[i] & contributes[k]).any() for k in kept):
            kept.append(i)
    kept.sort()
    assign = [(kept[int(np.argmin(inst.c[kept, j]))],) for j in range(inst.n_c)]
    sol = make_solution(inst, kept, assign, penalize_unconnected=False)
    events = list(state.events)
    end = events[-1].time if events else 0.0
    for i in temp:
        if i not in kept:
            events.append(Event(end, "close", facility=i, reason="cleanup"))
    return SolverOutput(sol, DualCertificate(alpha.copy()), EventTrace(tuple(events)))


ALGORITHMS = {
    "greedy1": greedy1_restatement,
    "greedy1-star": greedy1_star,
    "greedy2": greedy2,
    "jv": jv,
}
