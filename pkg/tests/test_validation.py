import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from faas_dessim import stats
from faas_dessim.errors import InputError
from faas_dessim.stats import Moments
from faas_dessim.validation import (
    PERCENTILE_ROWS,
    SHAPE_DIVERGENT,
    SHAPE_VALID,
    compare,
    ks_distance,
    percentile_table,
    shape_verdict,
    summary_text,
)


def _runs(seed, k=4, n=300, mean=19.0, sigma=0.25):
    rng = np.random.default_rng(seed)
    mu = np.log(mean) - sigma ** 2 / 2
    return [rng.lognormal(mu, sigma, n) for _ in range(k)]


def _mom(g1, b2):
    return Moments(mean=1.0, median=1.0, skewness=g1, kurtosis=b2, n=100)


def test_ks_examples():
    e = stats.ecdf
    assert ks_distance(e([1, 2, 3]), e([1, 2, 3])) == 0.0
    assert ks_distance(e([1, 2]), e([3, 4])) == 1.0
    assert ks_distance(e([1, 2, 3, 4]), e([1, 2, 3, 10])) == 0.25


@settings(max_examples=100)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=30),
       st.lists(st.integers(0, 20), min_size=1, max_size=30))
def test_ks_matches_brute_force(a, b):
    assert ks_distance(stats.ecdf(a), stats.ecdf(b)) == oracles.ks_brute(a, b)
    assert ks_distance(stats.ecdf(a), stats.ecdf(b)) == ks_distance(stats.ecdf(b), stats.ecdf(a))


def test_verdict_thresholds():
    assert shape_verdict(_mom(1.0, 4.0), _mom(1.0, 4.0)).label == SHAPE_VALID
    assert shape_verdict(_mom(1.0, 4.0), _mom(1.4, 4.4)).label == SHAPE_VALID
    v = shape_verdict(_mom(1.0, 4.0), _mom(3.0, 4.0))
    assert v.label == SHAPE_DIVERGENT
    assert v.checks == {"skewness": False, "kurtosis": True}
    assert shape_verdict(_mom(1.0, 4.0), _mom(1.0, 5.2)).checks["kurtosis"] is False


def test_verdict_undefined_moments():
    with pytest.raises(InputError):
        shape_verdict(_mom(float("nan"), 3.0), _mom(0.0, 3.0))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(1, 10), st.floats(1, 10),
       st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_verdict_monotone_in_tolerance(g_m, g_s, b_m, b_s, st1, st2, kt1, kt2):
    tight = shape_verdict(_mom(g_m, b_m), _mom(g_s, b_s), min(st1, st2), min(kt1, kt2))
    loose = shape_verdict(_mom(g_m, b_m), _mom(g_s, b_s), max(st1, st2), max(kt1, kt2))
    if tight.shape_valid:
        assert loose.shape_valid


def test_self_comparison():
    runs = _runs(1)
    rep = compare(runs, runs)
    assert rep.ks_distance == 0.0
    assert rep.moments["measured"] == rep.moments["simulated"]
    assert rep.verdict.label == SHAPE_VALID
    assert [r.percentile for r in rep.percentiles] == list(PERCENTILE_ROWS)
    for row in rep.percentiles:
        assert row.measured == row.simulated
    assert rep.mean_difference.point == 0.0


def test_swap_symmetry():
    a, b = _runs(1), _runs(2, mean=21.0)
    ab, ba = compare(a, b), compare(b, a)
    assert ab.ks_distance == ba.ks_distance
    assert ab.mean_difference.lower == pytest.approx(-ba.mean_difference.upper)
    assert ab.mean_difference.upper == pytest.approx(-ba.mean_difference.lower)
    for r1, r2 in zip(ab.percentiles, ba.percentiles):
        assert r1.measured == r2.simulated and r1.simulated == r2.measured
    assert ab.verdict.label == ba.verdict.label


def test_shifted_distribution_still_shape_valid():
    meas = [r + 3.9 for r in _runs(3)]
    sim = _runs(4)
    rep = compare(meas, sim)
    assert rep.verdict.shape_valid
    assert rep.mean_difference.lower > 3 and rep.mean_difference.upper < 5
    assert rep.ks_distance > 0.2


def test_divergent_shape():
    rng = np.random.default_rng(5)
    sym = [rng.normal(19, 1, 400) for _ in range(4)]
    skewed = [rng.lognormal(np.log(19), 0.9, 400) for _ in range(4)]
    assert compare(sym, skewed).verdict.label == SHAPE_DIVERGENT


def test_ks_tolerance_check():
    meas = [r + 3.9 for r in _runs(3)]
    rep = compare(meas, _runs(4), ks_tol=0.05)
    assert rep.verdict.checks["ks"] is False
    assert rep.verdict.label == SHAPE_DIVERGENT


def test_empty_side():
    with pytest.raises(InputError):
        compare([], _runs(1))
    with pytest.raises(InputError):
        compare(_runs(1), [[]])


def test_single_run_uses_bootstrap():
    rep = compare(_runs(1, k=1), _runs(2))
    assert rep.percentiles[0].measured.method == "bootstrap"
    assert rep.percentiles[0].simulated.method == "t"


def test_table_and_summary():
    rep = compare(_runs(1), _runs(2))
    lines = percentile_table(rep).splitlines()
    assert lines[0] == "percentile\tmeasured_ms\tsimulated_ms"
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["50th", "95th", "99th", "99.9th"]
    assert "verdict: shape-valid" in summary_text(rep)
