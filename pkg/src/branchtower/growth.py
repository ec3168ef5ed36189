"""p-adic growth of spanning-tree counts along a tower."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .graph import is_connected
from .iwasawa import char_element, char_of_jacobian
from .jacobian import kappa
from .tower import MAX_LAYER_VERTICES, TowerError, TowerSpec, build_layer, ord_p, projected_vertex_count

log = logging.getLogger(__name__)


class DisconnectedLayerError(TowerError):
    def __init__(self, n: int):
        super().__init__(f"layer {n} is not connected")
        self.n = n


@dataclass(frozen=True)
class LayerStats:
    n: int
    vertices: int
    edges: int
    kappa: int
    kappa_ord: int


@dataclass(frozen=True)
class GrowthSeries:
    p: int
    d: int
    values: tuple
    layers: tuple = field(default=(), repr=False)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1


def layer_stats(spec: TowerSpec, n: int) -> LayerStats:
    layer = build_layer(spec, n)
    g = layer.graph
    if not is_connected(g):
        raise DisconnectedLayerError(n)
    k = kappa(g)
    return LayerStats(n, len(g.vertices), g.num_edges, k, ord_p(k, spec.p))


def _stats_job(args):
    spec, n = args
    return layer_stats(spec, n)


def ord_series(spec: TowerSpec, n_max: int, workers: int = 1, guard: int = MAX_LAYER_VERTICES) -> GrowthSeries:
    """ord_p(κ(X_n)) for n = 0..n_max; ``workers > 1`` builds layers in separate processes."""
    for n in range(n_max + 1):
        nv = projected_vertex_count(spec, n)
        if nv > guard:
            raise TowerError(f"layer {n} would have {nv} vertices, above the guardrail {guard}")
    jobs = [(spec, n) for n in range(n_max + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(_stats_job, jobs))
    else:
        stats = [_stats_job(j) for j in jobs]
    values = tuple(s.kappa_ord for s in stats)
    if any(b < a for a, b in zip(values, values[1:])):
        log.warning("ord_p(kappa) series is not monotone: %s", values)
    return GrowthSeries(spec.p, spec.d, values, tuple(stats))


@dataclass(frozen=True)
class D1Fit:
    mu: int
    lam: int
    nu: int
    n0: int


def fit_d1(s: GrowthSeries) -> D1Fit | None:
    """Exact fit values[n] = μp^n + λn + ν on a tail n0..n_max, smallest n0; ``None`` if no fit."""
    if s.d != 1:
        raise ValueError("fit_d1 needs a rank-one series")
    v = list(s.values)
    N = len(v) - 1
    if N < 3:
        raise ValueError("fit_d1 needs at least four values")
    p = s.p
    # solve from the last three points n = N-2, N-1, N
    n = N - 2
    d1 = v[n + 1] - v[n]
    d2 = v[n + 2] - v[n + 1]
    denom = p ** n * (p - 1) ** 2
    if (d2 - d1) % denom:
        return None
    mu = (d2 - d1) // denom
    lam = d1 - mu * p ** n * (p - 1)
    nu = v[n] - mu * p ** n - lam * n
    if mu < 0 or lam < 0:
        return None
    n0 = N - 2
    while n0 > 0 and v[n0 - 1] == mu * p ** (n0 - 1) + lam * (n0 - 1) + nu:
        n0 -= 1
    return D1Fit(mu, lam, nu, n0)


@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    residuals: tuple
    slack: int


def check_growth(s: GrowthSeries, mu: int, lam: int, slack: int | None = None) -> GrowthReport:
    """Residuals r_n = v_n − μp^{nd} − λnp^{(d−1)n}.

    For d ≥ 2 passes iff |r_n| ≤ C·p^{n(d−1)} for n ≥ 1, with C defaulting to
    max(1, |r_1|).  For d = 1 the slack must be 0 and the check asks for a
    constant residual (the ν of the exact formula).
    """
    p, d = s.p, s.d
    res = tuple(v - mu * p ** (n * d) - lam * n * p ** ((d - 1) * n) for n, v in enumerate(s.values))
    if d == 1:
        if slack not in (None, 0):
            raise ValueError("rank-one growth is exact; slack must be 0")
        tail = res[1:]
        return GrowthReport(len(set(tail)) <= 1, res, 0)
    if slack is None:
        slack = max(1, abs(res[1])) if len(res) > 1 else 1
    ok = all(abs(r) <= slack * p ** (n * (d - 1)) for n, r in enumerate(res) if n >= 1)
    return GrowthReport(ok, res, slack)


@dataclass(frozen=True)
class Verdict:
    consistent: bool
    predicted: tuple
    observed: tuple | None
    series: GrowthSeries
    char_pic: str
    char_jac: str
    residuals: tuple = ()
    nu: int | None = None
    slack: int | None = None

    def to_dict(self) -> dict:
        out = {
            "consistent": self.consistent,
            "predicted": {"mu": self.predicted[0], "lambda": self.predicted[1]},
            "observed": None if self.observed is None else {"mu": self.observed[0], "lambda": self.observed[1]},
            "series": list(self.series.values),
            "char_pic": self.char_pic,
            "char_jac": self.char_jac,
            "residuals": list(self.residuals),
        }
        if self.nu is not None:
            out["nu"] = self.nu
        if self.slack is not None:
            out["slack"] = self.slack
        return out


def consistency(spec: TowerSpec, n_max: int, slack: int | None = None, workers: int = 1) -> Verdict:
    """Compare (μ, λ) of the Jacobian characteristic element against the observed series."""
    series = ord_series(spec, n_max, workers=workers)
    pic = char_element(spec)
    jac = char_of_jacobian(pic, spec.d)
    predicted = (jac.mu, jac.lam)
    if spec.d == 1:
        fit = fit_d1(series)
        observed = None if fit is None else (fit.mu, fit.lam)
        report = check_growth(series, *predicted, slack=0)
        return Verdict(observed == predicted and report.passed, predicted, observed, series,
                       str(pic.poly), str(jac.poly), report.residuals, None if fit is None else fit.nu)
    report = check_growth(series, *predicted, slack=slack)
    return Verdict(report.passed, predicted, None, series, str(pic.poly), str(jac.poly),
                   report.residuals, None, report.slack)


def growth_csv(series: GrowthSeries, residuals: Sequence[int]) -> str:
    lines = ["n,vertices,edges,kappa_ord,residual"]
    for st, r in zip(series.layers, residuals):
        lines.append(f"{st.n},{st.vertices},{st.edges},{st.kappa_ord},{r}")
    return "\n".join(lines) + "\n"
