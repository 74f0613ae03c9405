"""Dense linear program containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from facloc.errors import StructuralError

SENSES = ("<=", "=", ">=")


@dataclass(frozen=True, eq=False)
class LpModel:
    """``max``/``min`` ``objective @ x`` subject to ``A x (sense) rhs`` and bounds.

    Lower bounds default to 0 and upper bounds to ``inf``.
    """

    objective: NDArray[np.float64]
    A: NDArray[np.float64]
    senses: tuple[str, ...]
    rhs: NDArray[np.float64]
    maximize: bool = False
    lower: NDArray[np.float64] | None = None
    upper: NDArray[np.float64] | None = None
    var_names: tuple[str, ...] = ()
    row_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.objective)
        A = np.asarray(self.A, dtype=np.float64).reshape(-1, n)
        object.__setattr__(self, "objective", np.asarray(self.objective, dtype=np.float64))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", np.asarray(self.rhs, dtype=np.float64))
        if len(self.senses) != A.shape[0] or self.rhs.shape != (A.shape[0],):
            raise StructuralError("row count mismatch between A, senses and rhs")
        if any(s not in SENSES for s in self.senses):
            raise StructuralError(f"row senses must be among {SENSES}")
        if not np.isfinite(self.rhs).all():
            raise StructuralError("rhs must be finite")
        lo = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=np.float64)
        hi = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=np.float64)
        if lo.shape != (n,) or hi.shape != (n,):
            raise StructuralError("bound vectors must have one entry per variable")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not self.var_names:
            object.__setattr__(self, "var_names", tuple(f"x{k + 1}" for k in range(n)))
        if not self.row_names:
            object.__setattr__(self, "row_names", tuple(f"r{k + 1}" for k in range(A.shape[0])))
        if len(self.var_names) != n or len(self.row_names) != A.shape[0]:
            raise StructuralError("name lists must match the model dimensions")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    def max_violation(self, x: NDArray[np.float64]) -> float:
        """Largest violation of any row or bound at point ``x``."""
        act = self.A @ x
        viol = [0.0]
        for sense, want in (("<=", 1.0), (">=", -1.0)):
            mask = np.array([s == sense for s in self.senses], dtype=bool)
            if mask.any():
                viol.append(float(np.max(want * (act[mask] - self.rhs[mask]))))
        eq = np.array([s == "=" for s in self.senses], dtype=bool)
        if eq.any():
            viol.append(float(np.max(np.abs(act[eq] - self.rhs[eq]))))
        viol.append(float(np.max(self.lower - x, initial=0.0)))
        viol.append(float(np.max(x - self.upper, initial=0.0)))
        return max(viol)


@dataclass(frozen=True)
class LpSolution:
    """Status is one of ``optimal``, ``infeasible``, ``unbounded``, ``iteration-limit``."""

    status: str
    objective: float
    x: NDArray[np.float64]
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def value(self, model: LpModel, name: str) -> float:
        return float(self.x[model.index(name)])


@dataclass
class LpBuilder:
    """Incremental construction of an :class:`LpModel` by variable name."""

    maximize: bool = False
    names: list[str] = field(default_factory=list)
    _index: dict[str, int] = field(default_factory=dict)
    _obj: dict[int, float] = field(default_factory=dict)
    _rows: list[tuple[dict[int, float], str, float, str]] = field(default_factory=list)

    def var(self, name: str) -> int:
        if name in self._index:
            raise StructuralError(f"duplicate variable {name}")
        self._index[name] = len(self.names)
        self.names.append(name)
        return self._index[name]

    def __getitem__(self, name: str) -> int:
        return self._index[name]

    def objective(self, terms: dict[str, float]) -> None:
        for name, coef in terms.items():
            k = self._index[name]
            self._obj[k] = self._obj.get(k, 0.0) + coef

    def row(self, terms: dict[str, float], sense: str, rhs: float, name: str | None = None) -> None:
        coefs: dict[int, float] = {}
        for var, coef in terms.items():
            k = self._index[var]
            coefs[k] = coefs.get(k, 0.0) + coef
        self._rows.append((coefs, sense, float(rhs), name or f"r{len(self._rows) + 1}"))

    def build(self) -> LpModel:
        n = len(self.names)
        obj = np.zeros(n)
        for k, v in self._obj.items():
            obj[k] = v
        A = np.zeros((len(self._rows), n))
        for r, (coefs, _, _, _) in enumerate(self._rows):
            for k, v in coefs.items():
                A[r, k] = v
        return LpModel(
            objective=obj,
            A=A,
            senses=tuple(r[1] for r in self._rows),
            rhs=np.array([r[2] for r in self._rows]),
            maximize=self.maximize,
            var_names=tuple(self.names),
            row_names=tuple(r[3] for r in self._rows),
        )
