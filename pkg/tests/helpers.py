import numpy as np

from facloc.instances import GenSpec, gen_gnp, gen_grid
from facloc.model import Instance


def make(f, c, **kw) -> Instance:
    return Instance(np.asarray(f, dtype=float), np.asarray(c, dtype=float), **kw)


def random_instance(rng: np.random.Generator, n_f: int, n_c: int, metric: bool = True) -> Instance:
    """Points in the unit square (metric) or i.i.d. uniform costs."""
    if metric:
        fac = rng.random((n_f, 2))
        city = rng.random((n_c, 2))
        c = np.linalg.norm(fac[:, None] - city[None], axis=2)
    else:
        c = rng.random((n_f, n_c))
    return Instance(rng.random(n_f) * rng.uniform(0.1, 2.0), c, metric=metric)


def metric_batch(count: int, max_c: int = 60, max_f: int = 15, seed: int = 0):
    """Seeded grid and gnp instances with alternating kinds."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(count):
        n_c = int(rng.integers(1, max_c + 1))
        n_f = int(rng.integers(1, max_f + 1))
        if t % 2 == 0:
            out.append(gen_grid(GenSpec("grid", n_c=n_c, n_f=n_f, seed=seed * 1000 + t)))
        else:
            out.append(gen_gnp(GenSpec("gnp", n_c=n_c, n_f=n_f, seed=seed * 1000 + t, edge_p=0.3)))
    return out


#: (criterion, passed, detail) tuples filled in by the acceptance tests.
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def record(criterion: int, passed: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})"
    ACCEPTANCE_RESULTS.append((criterion, passed, detail))
    print(line)
    assert passed, line
