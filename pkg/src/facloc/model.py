"""Domain types and cost accounting for uncapacitated facility location.

An :class:`Instance` holds dense bipartite cost data: ``f[i]`` is the opening
cost of facility ``i`` and ``c[i, j]`` the cost of connecting city ``j`` to it.
Optional per-city demands and penalties ride along on the same type so every
file format round-trips through one structure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from facloc.errors import ParameterError, StructuralError

#: Absolute comparison tolerance before scaling by instance magnitude.
BASE_TOL = 1e-9

#: Largest facility count accepted by :func:`brute_force_opt`.
BRUTE_FORCE_MAX_FACILITIES = 20


def _frozen(a: ArrayLike, ndim: int, name: str) -> NDArray[np.float64]:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise StructuralError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ParameterError(f"{name} contains NaN")
    if (arr < 0).any():
        raise ParameterError(f"{name} must be nonnegative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Facility location instance with ``n_f`` facilities and ``n_c`` cities.

    Attributes:
        f: opening costs, shape ``(n_f,)``.
        c: connection costs, shape ``(n_f, n_c)``.
        d: city demands, shape ``(n_c,)``; all ones when not given.
        p: city penalties, shape ``(n_c,)``, or ``None`` for the base problem.
            ``inf`` entries mean the city must be connected.
        metric: set by generators whose costs satisfy the triangle inequality.
    """

    f: NDArray[np.float64]
    c: NDArray[np.float64]
    d: NDArray[np.float64] | None = None
    p: NDArray[np.float64] | None = None
    metric: bool = False

    def __post_init__(self) -> None:
        f = _frozen(self.f, 1, "f")
        c = _frozen(self.c, 2, "c")
        if c.shape[0] != f.shape[0]:
            raise StructuralError(f"c has {c.shape[0]} rows but there are {f.shape[0]} facilities")
        if np.isinf(f).any() or np.isinf(c).any():
            raise ParameterError("opening and connection costs must be finite")
        n_c = c.shape[1]
        d = np.ones(n_c) if self.d is None else self.d
        d = _frozen(d, 1, "d")
        if d.shape[0] != n_c:
            raise StructuralError(f"d has length {d.shape[0]}, expected {n_c}")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if self.p is not None:
            p = _frozen(self.p, 1, "p")
            if p.shape[0] != n_c:
                raise StructuralError(f"p has length {p.shape[0]}, expected {n_c}")
            object.__setattr__(self, "p", p)

    @property
    def n_f(self) -> int:
        return self.f.shape[0]

    @property
    def n_c(self) -> int:
        return self.c.shape[1]

    @property
    def has_unit_demands(self) -> bool:
        return bool(np.all(self.d == 1.0))

    @property
    def scale(self) -> float:
        """Largest finite cost magnitude, at least 1."""
        vals = [1.0]
        if self.f.size:
            vals.append(float(self.f.max()))
        if self.c.size:
            vals.append(float(self.c.max()))
        return max(vals)

    @property
    def tol(self) -> float:
        return BASE_TOL * self.scale

    def replace(self, **changes) -> "Instance":
        fields = {"f": self.f, "c": self.c, "d": self.d, "p": self.p, "metric": self.metric}
        fields.update(changes)
        return Instance(**fields)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        same_p = (self.p is None and other.p is None) or (
            self.p is not None and other.p is not None and np.array_equal(self.p, other.p)
        )
        return (
            self.metric == other.metric
            and np.array_equal(self.f, other.f)
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.d, other.d)
            and same_p
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Solution:
    """An integral solution with its stored cost breakdown.

    ``assign[j]`` lists the facilities serving city ``j``: one entry in the
    base problem, ``r`` under fault tolerance, none for a city that pays its
    penalty or is dropped by the robust variant. ``multiplicity`` is only set
    by the soft-capacity variant and counts copies opened per facility.
    """

    open: frozenset[int]
    assign: tuple[tuple[int, ...], ...]
    facility_cost: float
    connection_cost: float
    penalty_cost: float = 0.0
    multiplicity: tuple[tuple[int, int], ...] | None = None

    @property
    def total(self) -> float:
        return self.facility_cost + self.connection_cost + self.penalty_cost

    @property
    def unconnected(self) -> tuple[int, ...]:
        return tuple(j for j, a in enumerate(self.assign) if not a)


def make_solution(
    inst: Instance,
    open_set: Iterable[int],
    assign: Sequence[Sequence[int]],
    *,
    penalize_unconnected: bool | None = None,
    multiplicity: dict[int, int] | None = None,
) -> Solution:
    """Build a :class:`Solution` and compute its cost breakdown from scratch.

    Unconnected cities pay their penalty when ``penalize_unconnected`` is true
    (the default whenever the instance carries penalties).
    """
    open_fs = frozenset(int(i) for i in open_set)
    assign_t = tuple(tuple(int(i) for i in a) for a in assign)
    if len(assign_t) != inst.n_c:
        raise StructuralError(f"assignment covers {len(assign_t)} cities, expected {inst.n_c}")
    for i in open_fs:
        if not 0 <= i < inst.n_f:
            raise StructuralError(f"facility index {i} out of range")
    for j, a in enumerate(assign_t):
        for i in a:
            if i not in open_fs:
                raise StructuralError(f"city {j} assigned to facility {i}, which is not open")
    if penalize_unconnected is None:
        penalize_unconnected = inst.p is not None
    mult = None
    if multiplicity is not None:
        mult = tuple(sorted((int(i), int(m)) for i, m in multiplicity.items()))
    sol = Solution(open=open_fs, assign=assign_t, facility_cost=0.0, connection_cost=0.0, multiplicity=mult)
    F, C, P = _breakdown(inst, sol, penalize_unconnected)
    return Solution(open_fs, assign_t, F, C, P, mult)


def _breakdown(inst: Instance, sol: Solution, penalize: bool) -> tuple[float, float, float]:
    if len(sol.assign) != inst.n_c:
        raise StructuralError(f"assignment covers {len(sol.assign)} cities, expected {inst.n_c}")
    copies = dict(sol.multiplicity) if sol.multiplicity is not None else {}
    F = 0.0
    for i in sorted(sol.open):
        if not 0 <= i < inst.n_f:
            raise StructuralError(f"facility index {i} out of range")
        F += copies.get(i, 1) * float(inst.f[i])
    C = 0.0
    P = 0.0
    for j, a in enumerate(sol.assign):
        for i in a:
            if not 0 <= i < inst.n_f:
                raise StructuralError(f"facility index {i} out of range for city {j}")
            C += float(inst.d[j]) * float(inst.c[i, j])
        if not a and penalize:
            if inst.p is None or math.isinf(inst.p[j]):
                raise StructuralError(f"city {j} is unconnected but has no finite penalty")
            P += float(inst.p[j])
    return F, C, P


def total_cost(inst: Instance, sol: Solution) -> float:
    """Recompute ``F + C + penalties`` for ``sol`` from the instance data."""
    F, C, P = _breakdown(inst, sol, inst.p is not None)
    return F + C + P


def check_metric(inst: Instance, tol: float = 1e-9) -> bool:
    """Bipartite triangle inequality ``c[i,j] <= c[i,j'] + c[i',j'] + c[i',j]``.

    For a facility pair the worst case pairs the city maximising
    ``c[i,j] - c[i',j]`` with the city minimising ``c[i,j'] + c[i',j']``, so
    the check costs ``O(n_f^2 n_c)`` rather than enumerating quadruples.
    """
    c = inst.c
    if c.size == 0:
        return True
    for i in range(inst.n_f):
        lhs = (c[i][None, :] - c).max(axis=1)
        rhs = (c[i][None, :] + c).min(axis=1)
        if (lhs > rhs + tol).any():
            return False
    return True


@dataclass(frozen=True)
class DualCertificate:
    """Per-city dual values produced by a solver run plus a shrink factor."""

    alpha: NDArray[np.float64]
    gamma: float | None = None

    def with_gamma(self, gamma: float) -> "DualCertificate":
        return DualCertificate(self.alpha, gamma)


def check_overtight(inst: Instance, cert: DualCertificate, gamma: float | None = None) -> NDArray[np.float64]:
    """Per-facility slack ``f_i - sum_j d_j max(alpha_j/gamma - c_ij, 0)``.

    The shrunk dual is feasible iff every entry is ``>= -tol``. ``gamma``
    overrides the certificate's own factor; 1 is used when neither is set.
    """
    g = gamma if gamma is not None else cert.gamma
    if g is None:
        g = 1.0
    if not g > 0:
        raise ParameterError(f"gamma must be positive, got {g}")
    alpha = np.asarray(cert.alpha, dtype=np.float64)
    if alpha.shape != (inst.n_c,):
        raise StructuralError(f"alpha has shape {alpha.shape}, expected ({inst.n_c},)")
    excess = np.maximum(alpha[None, :] / g - inst.c, 0.0)
    return inst.f - excess @ inst.d


@dataclass(frozen=True)
class Event:
    """One step of a dual-ascent run.

    ``kind`` is ``"open"``, ``"connect"`` or ``"freeze"``. A connect event
    whose ``previous`` is set records a city switching facilities.
    """

    time: float
    kind: str
    facility: int | None = None
    city: int | None = None
    previous: int | None = None
    reason: str = ""


@dataclass(frozen=True)
class EventTrace:
    events: tuple[Event, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]


def _subset_city_costs(c: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row ``m`` holds each city's cheapest connection among facilities in bitmask ``m``."""
    n, n_c = c.shape
    table = np.full((1 << n, n_c), np.inf)
    for b in range(n):
        lo = 1 << b
        table[lo : 2 * lo] = np.minimum(table[0:lo], c[b])
    return table


def brute_force_opt(inst: Instance) -> Solution:
    """Exact optimum by enumerating every facility subset.

    Each city goes to its cheapest open facility, or pays its penalty when
    that is cheaper. Among optimal subsets the lexicographically smallest
    sorted index tuple wins.
    """
    n_f, n_c = inst.n_f, inst.n_c
    if n_f > BRUTE_FORCE_MAX_FACILITIES:
        raise ParameterError(f"brute force supports at most {BRUTE_FORCE_MAX_FACILITIES} facilities, got {n_f}")
    if n_f == 0 and n_c > 0 and inst.p is None:
        raise ParameterError("instance has cities but no facilities")
    d = inst.d
    pen = inst.p if inst.p is not None else np.full(n_c, np.inf)

    lo_bits = min(n_f, 12)
    hi_bits = n_f - lo_bits
    lo_table = _subset_city_costs(inst.c[:lo_bits])
    hi_rows = inst.c[lo_bits:]
    lo_f = np.array([sum(inst.f[b] for b in range(lo_bits) if m >> b & 1) for m in range(1 << lo_bits)])

    totals = np.empty(1 << n_f)
    for hi in range(1 << hi_bits):
        members = [b for b in range(hi_bits) if hi >> b & 1]
        base = hi_rows[members].min(axis=0) if members else np.full(n_c, np.inf)
        with np.errstate(invalid="ignore"):
            weighted = np.nan_to_num(np.minimum(lo_table, base) * d, nan=0.0, posinf=np.inf)
        conn = np.minimum(weighted, pen).sum(axis=1)
        hi_f = float(sum(inst.f[lo_bits + b] for b in members))
        totals[hi << lo_bits : (hi + 1) << lo_bits] = lo_f + hi_f + conn

    opt = totals.min()
    if not np.isfinite(opt):
        raise ParameterError("no feasible solution")
    tol = inst.tol * max(1, n_c + n_f)
    cands = np.nonzero(totals <= opt + tol)[0]
    masks = min(cands, key=lambda m: tuple(b for b in range(n_f) if m >> b & 1))
    open_set = [b for b in range(n_f) if masks >> b & 1]

    assign: list[tuple[int, ...]] = []
    for j in range(n_c):
        if open_set:
            costs = inst.c[open_set, j]
            k = int(np.argmin(costs))
            if d[j] * costs[k] <= pen[j]:
                assign.append((open_set[k],))
                continue
        assign.append(())
    return make_solution(inst, open_set, assign, penalize_unconnected=inst.p is not None)


def iter_subsets(n: int, max_size: int | None = None):
    """Nonempty index subsets of ``range(n)`` up to ``max_size`` elements."""
    top = n if max_size is None else min(n, max_size)
    for size in range(1, top + 1):
        yield from itertools.combinations(range(n), size)
