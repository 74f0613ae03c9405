"""Instance generators, the OR-Library reader and the native text format.

All randomness comes from numpy's PCG64 bit generator seeded from
``GenSpec.seed``, so a given :class:`GenSpec` yields the same instance on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from facloc.errors import GenerationError, ParameterError, ParseError
from facloc.model import Instance

NATIVE_HEADER = "FACLOC v1"
GNP_MAX_RETRIES = 64
HOCHBAUM_MAX_CITIES = 20_000


@dataclass(frozen=True)
class GenSpec:
    """Parameters for one generated instance.

    ``kind`` selects the generator: ``grid`` uses ``side``; ``gnp`` uses
    ``nodes`` (defaults to ``n_f + n_c``), ``edge_p`` and ``w_max``;
    ``hochbaum`` uses ``base`` and ``levels`` and ignores ``n_f``/``n_c``.
    """

    kind: str
    n_c: int = 0
    n_f: int = 0
    seed: int = 0
    cost_max: int = 9999
    side: int = 10_000
    nodes: int | None = None
    edge_p: float = 0.1
    w_max: int = 100
    base: int = 2
    levels: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("grid", "gnp", "hochbaum"):
            raise ParameterError(f"unknown generator kind {self.kind!r}")
        if self.n_c < 0 or self.n_f < 0:
            raise ParameterError("counts must be nonnegative")
        if self.kind == "grid" and self.side <= 0:
            raise ParameterError("grid side must be positive")
        if self.kind == "gnp":
            if not 0 < self.edge_p <= 1:
                raise ParameterError("edge probability must lie in (0, 1]")
            if self.w_max < 1:
                raise ParameterError("w_max must be at least 1")
            if self.nodes is not None and self.nodes < self.n_f + self.n_c:
                raise ParameterError("graph needs at least n_f + n_c nodes")
        if self.kind == "hochbaum" and (self.base < 2 or self.levels < 2):
            raise ParameterError("hochbaum family needs base >= 2 and levels >= 2")


def _rng(seed: int, salt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([seed & (2**64 - 1), salt]))


def gen_grid(spec: GenSpec) -> Instance:
    """Random integer points on a ``side x side`` grid with Euclidean costs.

    Facilities are drawn first, then cities, then opening costs uniform on
    ``0..cost_max`` inclusive.
    """
    if spec.kind != "grid":
        raise ParameterError("gen_grid needs a grid spec")
    rng = _rng(spec.seed)
    fac = rng.integers(0, spec.side, size=(spec.n_f, 2))
    city = rng.integers(0, spec.side, size=(spec.n_c, 2))
    f = rng.integers(0, spec.cost_max + 1, size=spec.n_f).astype(np.float64)
    c = np.sqrt(((fac[:, None, :] - city[None, :, :]) ** 2).sum(axis=2).astype(np.float64))
    return Instance(f=f, c=c, metric=True)


def gen_gnp(spec: GenSpec) -> Instance:
    """Shortest-path costs on a connected G(n, p) graph with integer weights.

    Nodes ``0..n_f-1`` are facilities and the next ``n_c`` are cities.
    Disconnected draws are rejected and redrawn with a new salt.
    """
    if spec.kind != "gnp":
        raise ParameterError("gen_gnp needs a gnp spec")
    n = spec.nodes if spec.nodes is not None else spec.n_f + spec.n_c
    for salt in range(GNP_MAX_RETRIES):
        rng = _rng(spec.seed, salt)
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < spec.edge_p
        w = rng.integers(1, spec.w_max + 1, size=int(keep.sum())).astype(np.float64)
        graph = csr_matrix((w, (iu[keep], ju[keep])), shape=(n, n))
        if n > 1 and connected_components(graph, directed=False)[0] != 1:
            continue
        f = rng.integers(0, spec.cost_max + 1, size=spec.n_f).astype(np.float64)
        dist = shortest_path(graph, method="D", directed=False, indices=np.arange(spec.n_f))
        c = dist[:, spec.n_f : spec.n_f + spec.n_c]
        return Instance(f=f, c=c, metric=True)
    raise GenerationError(f"no connected graph after {GNP_MAX_RETRIES} draws; raise edge_p")


def gen_hochbaum(spec: GenSpec) -> Instance:
    """Co-located facilities that defeat the plain set-cover greedy.

    ``levels`` facilities each cost ``base**levels``; group ``i`` (for
    ``i = 1..levels-1``) has ``base**(levels-i+1)`` cities at distance
    ``1 + base + ... + base**(i-1)`` from every facility.
    """
    if spec.kind != "hochbaum":
        raise ParameterError("gen_hochbaum needs a hochbaum spec")
    p, k = spec.base, spec.levels
    sizes = [p ** (k - i + 1) for i in range(1, k)]
    if sum(sizes) > HOCHBAUM_MAX_CITIES:
        raise ParameterError(f"family would have {sum(sizes)} cities, above {HOCHBAUM_MAX_CITIES}")
    dist = np.concatenate([np.full(s, float(sum(p ** (j - 1) for j in range(1, i + 1)))) for i, s in enumerate(sizes, 1)])
    f = np.full(k, float(p**k))
    c = np.tile(dist, (k, 1))
    return Instance(f=f, c=c, metric=True)


def generate(spec: GenSpec) -> Instance:
    return {"grid": gen_grid, "gnp": gen_gnp, "hochbaum": gen_hochbaum}[spec.kind](spec)


def _number(tok: str, pos: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", pos) from None
    if not math.isfinite(v):
        raise ParseError(f"expected a finite number, got {tok!r}", pos)
    return v


def parse_orlib(text: str) -> Instance:
    """Read the OR-Library uncapacitated/capacitated warehouse format.

    Layout: ``n_f n_c``; per facility ``capacity cost``; per city ``demand``
    followed by ``n_f`` allocation costs. Capacities are ignored. Allocation
    costs in the file are totals for the whole demand, so they are divided by
    the demand (when positive) and the demand is kept on the instance.
    """
    toks = text.split()
    if len(toks) < 2:
        raise ParseError("missing header", len(toks))
    n_f_raw, n_c_raw = _number(toks[0], 0), _number(toks[1], 1)
    if n_f_raw != int(n_f_raw) or n_c_raw != int(n_c_raw) or n_f_raw < 0 or n_c_raw < 0:
        raise ParseError("header counts must be nonnegative integers", 0)
    n_f, n_c = int(n_f_raw), int(n_c_raw)
    expected = 2 + 2 * n_f + n_c * (1 + n_f)
    if len(toks) != expected:
        raise ParseError(f"expected {expected} tokens for {n_f} facilities and {n_c} cities, found {len(toks)}", min(len(toks), expected))
    pos = 2
    f = np.empty(n_f)
    for i in range(n_f):
        _number(toks[pos], pos)
        f[i] = _number(toks[pos + 1], pos + 1)
        if f[i] < 0:
            raise ParseError("negative opening cost", pos + 1)
        pos += 2
    d = np.empty(n_c)
    c = np.empty((n_f, n_c))
    for j in range(n_c):
        d[j] = _number(toks[pos], pos)
        if d[j] < 0:
            raise ParseError("negative demand", pos)
        pos += 1
        for i in range(n_f):
            v = _number(toks[pos], pos)
            if v < 0:
                raise ParseError("negative allocation cost", pos)
            c[i, j] = v / d[j] if d[j] > 0 else v
            pos += 1
    return Instance(f=f, c=c, d=d)


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def to_native(inst: Instance) -> str:
    """Serialise to the line-oriented ``FACLOC v1`` format (lossless)."""
    lines = [NATIVE_HEADER, f"dims {inst.n_f} {inst.n_c}", f"metric {int(inst.metric)}"]
    lines.append(("f " + _fmt(inst.f)).rstrip())
    if inst.n_c:
        lines.extend("c " + _fmt(row) for row in inst.c)
    if not inst.has_unit_demands:
        lines.append("d " + _fmt(inst.d))
    if inst.p is not None:
        lines.append("p " + _fmt(inst.p))
    lines.append("end")
    return "\n".join(lines) + "\n"


def from_native(text: str) -> Instance:
    """Parse text produced by :func:`to_native`."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != NATIVE_HEADER:
        raise ParseError(f"expected header {NATIVE_HEADER!r}", 0)
    try:
        key, a, b = lines[1].split()
        assert key == "dims"
        n_f, n_c = int(a), int(b)
    except (ValueError, AssertionError, IndexError):
        raise ParseError("expected 'dims <n_f> <n_c>'", 1) from None
    metric = False
    f = None
    rows: list[list[float]] = []
    d = p = None
    seen_end = False
    for ln_no, ln in enumerate(lines[2:], start=2):
        if seen_end:
            raise ParseError("content after 'end'", ln_no)
        key, *vals = ln.split()
        if key == "end":
            seen_end = True
            continue
        try:
            nums = [float(v) for v in vals]
        except ValueError:
            raise ParseError(f"non-numeric value in '{key}' line", ln_no) from None
        if key == "metric":
            metric = bool(int(nums[0])) if nums else False
        elif key == "f":
            f = nums
        elif key == "c":
            if len(nums) != n_c:
                raise ParseError(f"cost row has {len(nums)} entries, expected {n_c}", ln_no)
            rows.append(nums)
        elif key == "d":
            d = nums
        elif key == "p":
            p = nums
        else:
            raise ParseError(f"unknown section {key!r}", ln_no)
    if not seen_end:
        raise ParseError("missing 'end'", len(lines))
    if f is None or len(f) != n_f:
        raise ParseError(f"expected {n_f} opening costs", 2)
    if n_c and len(rows) != n_f:
        raise ParseError(f"expected {n_f} cost rows, found {len(rows)}", 2)
    for name, vec in (("d", d), ("p", p)):
        if vec is not None and len(vec) != n_c:
            raise ParseError(f"'{name}' has {len(vec)} entries, expected {n_c}", 2)
    c = np.array(rows, dtype=np.float64).reshape(n_f, n_c)
    return Instance(f=np.array(f), c=c, d=None if d is None else np.array(d), p=None if p is None else np.array(p), metric=metric)


def read_instance(path: str, fmt: str = "native") -> Instance:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "native":
        return from_native(text)
    if fmt == "orlib":
        return parse_orlib(text)
    raise ParameterError(f"unknown format {fmt!r}")


def write_instance(path: str, inst: Instance) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_native(inst))
