import math

import numpy as np
import pytest
from scipy.stats import genpareto

from gesnorm.anomaly import DetectorConfig, detect, gpd_fit_mle, gpd_tail_quantile
from gesnorm.anomaly.pot import GpdFit, gpd_loglik, pot_detect


def _gpd_sample(xi, beta, n, seed):
    u = np.random.default_rng(seed).uniform(size=n)
    if xi == 0:
        return -beta * np.log1p(-u)
    return beta / xi * ((1 - u) ** (-xi) - 1)


@pytest.mark.parametrize("xi", [-0.3, 0.0, 0.2, 0.8])
def test_fit_is_at_least_as_likely_as_scipy(xi):
    y = _gpd_sample(xi, 2.0, 400, seed=int(10 * xi) + 50)
    fit = gpd_fit_mle(y)
    c, _, scale = genpareto.fit(y, floc=0)
    if -0.5 <= c <= 2.0:
        assert gpd_loglik(fit.xi, fit.beta, y) >= gpd_loglik(c, scale, y) - 1e-6


def test_negative_shape_support_covers_data():
    y = _gpd_sample(-0.4, 1.0, 300, seed=3)
    fit = gpd_fit_mle(y, threshold=0.0)
    assert fit.xi < 0
    assert fit.upper_bound > y.max()


def test_too_few_exceedances():
    with pytest.raises(ValueError, match="at least 10"):
        gpd_fit_mle([1.0, 2.0, 3.0])


def test_nonpositive_exceedance():
    with pytest.raises(ValueError):
        gpd_fit_mle(np.r_[np.ones(12), 0.0])


def test_cdf_sanity():
    fit = GpdFit(0.25, 1.5, threshold=2.0)
    x = np.linspace(2.0, 200.0, 500)
    G = fit.cdf(x)
    assert fit.cdf(2.0) == 0.0
    assert np.all(np.diff(G) >= 0)
    assert fit.cdf(1e9) == pytest.approx(1.0)
    bounded = GpdFit(-0.5, 1.0, threshold=0.0)
    assert bounded.cdf(bounded.upper_bound) == 1.0


def test_quantile_inverts_cdf():
    fit = GpdFit(0.3, 0.8, threshold=1.0)
    zeta, v = 0.1, 0.99
    q = gpd_tail_quantile(fit, v, zeta)
    # P(X > q) = zeta * (1 - G(q)) = 1 - v
    assert zeta * (1 - fit.cdf(q)) == pytest.approx(1 - v)


def test_quantile_exponential_limit():
    u, beta, zeta, v = 0.5, 0.7, 0.1, 0.99
    q0 = gpd_tail_quantile(GpdFit(0.0, beta, u), v, zeta)
    assert q0 == pytest.approx(u + beta * math.log(zeta / (1 - v)))
    for xi in (1e-6, -1e-6):
        assert gpd_tail_quantile(GpdFit(xi, beta, u), v, zeta) == pytest.approx(q0, rel=1e-5)


def test_injected_point_flagged():
    rng = np.random.default_rng(12)
    r = rng.normal(0, 0.01, size=260)
    r[230] = 0.5
    det = pot_detect(r, DetectorConfig("pot", 180))
    assert det.flags[230]
    r[240] = -0.5
    assert pot_detect(r, DetectorConfig("pot", 180)).flags[240]


def test_identical_window_falls_back():
    r = np.full(80, 0.01)
    det = pot_detect(r, DetectorConfig("pot", 60))
    assert det.count == 0
    assert det.aux["fallback"][60:].all()


def test_empirical_rule():
    rng = np.random.default_rng(2)
    r = rng.normal(size=100)
    det = pot_detect(r, DetectorConfig("pot", 60, pot_rule="empirical"))
    t = 70
    assert det.statistic[t] == pytest.approx(np.quantile(r[t - 59:t], 0.99))
    assert not det.aux["fallback"].any()


def test_window_minimum():
    with pytest.raises(ValueError):
        pot_detect(np.zeros(100), DetectorConfig("pot", 30))
