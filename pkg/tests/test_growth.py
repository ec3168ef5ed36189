import logging

import pytest
from hypothesis import given, settings, strategies as st

from branchtower.growth import (
    DisconnectedLayerError,
    GrowthSeries,
    check_growth,
    consistency,
    fit_d1,
    growth_csv,
    ord_series,
)
from branchtower.iwasawa import char_element, char_of_jacobian
from branchtower.graph import Graph
from branchtower.tower import GroupSpec, TowerSpec
from conftest import corpus


def series(values, p, d=1):
    return GrowthSeries(p, d, tuple(values), ())


def test_ord_series_examples():
    assert ord_series(corpus("cycle_c9").spec, 3).values == (2, 6, 18, 54)
    assert ord_series(corpus("z3sq_flower_full").spec, 2).values == (0, 0, 0)
    assert ord_series(corpus("unramified_triangle").spec, 3).values == (0, 1, 2, 3)


def test_ord_series_workers_agree():
    spec = corpus("ramified_triangle").spec
    assert ord_series(spec, 3, workers=2).values == ord_series(spec, 3).values


def test_ord_series_disconnected():
    base = Graph.from_edges("AB", [("e", "A", "B"), ("f", "A", "B")])
    spec = TowerSpec(base, GroupSpec(2, 1), {"e": (0,), "e~": (0,), "f": (0,), "f~": (0,)})
    with pytest.raises(DisconnectedLayerError) as info:
        ord_series(spec, 2)
    assert info.value.n == 1


def test_fit_examples():
    f = fit_d1(series([2, 6, 18, 54], 3))
    assert (f.mu, f.lam, f.nu, f.n0) == (2, 0, 0, 0)
    f = fit_d1(series([0, 1, 2, 3], 2))
    assert (f.mu, f.lam, f.nu, f.n0) == (0, 1, 0, 0)
    f = fit_d1(series([4, 4, 4, 4], 5))
    assert (f.mu, f.lam, f.nu, f.n0) == (0, 0, 4, 0)
    with pytest.raises(ValueError):
        fit_d1(series([0, 0, 0], 2))
    with pytest.raises(ValueError):
        fit_d1(series([0, 0, 0, 0], 2, d=2))


def test_fit_finds_late_start():
    # the formula only holds from n = 2 on
    f = fit_d1(series([7, 0, 5, 9, 17], 2))
    assert (f.mu, f.lam, f.nu, f.n0) == (1, 0, 1, 2)


def test_fit_rejects_negative_lambda():
    assert fit_d1(series([0, 3, 2, 1], 2)) is None


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 4), st.integers(0, 6), st.integers(-20, 20), st.integers(3, 5))
def test_fit_recovers_parameters(p, mu, lam, nu, n_max):
    values = [mu * p ** n + lam * n + nu for n in range(n_max + 1)]
    f = fit_d1(series(values, p))
    assert (f.mu, f.lam, f.nu, f.n0) == (mu, lam, nu, 0)


def test_check_growth_examples():
    rep = check_growth(series([0, 0, 0], 3, d=2), 0, 0)
    assert rep.passed and rep.residuals == (0, 0, 0)
    rep = check_growth(series([3, 4, 5, 6], 2), 0, 1, slack=0)
    assert rep.passed and set(rep.residuals) == {3}
    assert not check_growth(series([2, 6, 18, 54], 3), 3, 0, slack=0).passed
    assert not check_growth(series([0, 9, 81], 3, d=2), 0, 0, slack=1).passed
    with pytest.raises(ValueError):
        check_growth(series([0, 1, 2, 3], 2), 0, 1, slack=2)


def test_check_growth_default_slack():
    rep = check_growth(series([0, 2, 5], 3, d=2), 0, 0)
    assert rep.slack == 2 and rep.passed
    rep = check_growth(series([0, 0, 10], 3, d=2), 0, 0)
    assert rep.slack == 1 and not rep.passed


def test_consistency_examples():
    v = consistency(corpus("flower_p3").spec, 3)
    assert v.consistent and v.predicted == (0, 0) and v.observed == (0, 0)
    v = consistency(corpus("cycle_c9").spec, 3)
    assert v.consistent and v.predicted == (2, 0) and v.nu == 0
    v = consistency(corpus("unramified_triangle").spec, 3)
    assert v.char_jac in ("T", "-T") and v.consistent and v.predicted == (0, 1)
    v = consistency(corpus("z3sq_flower_full").spec, 2)
    assert v.consistent and v.residuals == (0, 0, 0)


def test_corpus_d1_fit_matches_char(all_specs):
    for sf in all_specs:
        spec = sf.spec
        if spec.d != 1:
            continue
        jac = char_of_jacobian(char_element(spec), 1)
        fit = fit_d1(ord_series(spec, 3))
        assert fit is not None and (fit.mu, fit.lam) == (jac.mu, jac.lam), spec.name


def test_corpus_d2_residuals_vanish(all_specs):
    for sf in all_specs:
        if sf.spec.d == 2:
            assert set(consistency(sf.spec, 2).residuals) == {0}


def test_monotone_warning(caplog, monkeypatch):
    import branchtower.growth as growth

    fake = iter([5, 3, 4, 6])
    real = growth.layer_stats

    def stats(spec, n):
        st_ = real(spec, n)
        return type(st_)(st_.n, st_.vertices, st_.edges, st_.kappa, next(fake))

    monkeypatch.setattr(growth, "layer_stats", stats)
    with caplog.at_level(logging.WARNING, logger="branchtower"):
        s = ord_series(corpus("unramified_triangle").spec, 3)
    assert s.values == (5, 3, 4, 6)
    assert any("monotone" in r.message for r in caplog.records)


def test_growth_csv():
    s = ord_series(corpus("unramified_triangle").spec, 2)
    text = growth_csv(s, (0, 0, 0))
    assert text.splitlines() == ["n,vertices,edges,kappa_ord,residual", "0,3,3,0,0", "1,6,6,1,0", "2,12,12,2,0"]
