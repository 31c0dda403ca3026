import math

import numpy as np
import pytest
from scipy import integrate

from estatistica.exceptions import ConvergenceError, DomainError
from estatistica import specfun
from estatistica.specfun import (
    ln_gamma, norm_cdf, norm_quantile, reg_inc_beta, t_cdf, t_pdf, t_quantile,
)

DFS = [1, 2, 5, 10, 38, 100, 1000]


def t_density(t, df):
    log_norm = ln_gamma((df + 1) / 2) - ln_gamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(log_norm - (df + 1) / 2 * math.log1p(t * t / df))


def t_cdf_oracle(t, df):
    """Adaptive quadrature of the t density from 0 to t, plus one half."""
    area, _ = integrate.quad(t_density, 0.0, t, args=(df,), epsabs=1e-14, epsrel=1e-13, limit=200)
    return 0.5 + area


def beta_oracle(a, b, x):
    log_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    area, _ = integrate.quad(
        lambda u: math.exp((a - 1) * math.log(u) + (b - 1) * math.log1p(-u) - log_beta),
        0.0, x, epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return area


@pytest.mark.parametrize('x, expected', [
    (1.0, 0.0),
    (0.5, 0.5723649429247001),
    (10.0, 12.801827480081469),
])
def test_ln_gamma_known_values(x, expected):
    assert ln_gamma(x) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize('x', [0.0, -1.0, -0.5])
def test_ln_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


def test_reg_inc_beta_identity_and_symmetry():
    assert reg_inc_beta(1, 1, 0.3) == pytest.approx(0.3, abs=1e-14)
    assert reg_inc_beta(2, 2, 0.5) == pytest.approx(0.5, abs=1e-14)


def test_reg_inc_beta_matches_quadrature():
    assert reg_inc_beta(2.5, 3.5, 0.4) == pytest.approx(beta_oracle(2.5, 3.5, 0.4), abs=1e-10)


@pytest.mark.parametrize('a, b, x', [(0.0, 1.0, 0.5), (1.0, -2.0, 0.5), (1.0, 1.0, 1.5), (1.0, 1.0, -0.1)])
def test_reg_inc_beta_domain(a, b, x):
    with pytest.raises(DomainError):
        reg_inc_beta(a, b, x)


def test_reg_inc_beta_reflection():
    rng = np.random.default_rng(11)
    for a, b, x in zip(rng.uniform(0.2, 40, 1000), rng.uniform(0.2, 40, 1000), rng.uniform(0, 1, 1000)):
        assert reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) == pytest.approx(1.0, abs=1e-12)


def test_continued_fraction_failure_is_reported(monkeypatch):
    monkeypatch.setattr(specfun, 'MAX_ITERATIONS', 1)
    with pytest.raises(ConvergenceError):
        reg_inc_beta(50.0, 60.0, 0.45)


@pytest.mark.parametrize('t, df, expected', [
    (1.5, 38, 0.929),
    (7.0, 2, 0.9901),
])
def test_t_cdf_examples(t, df, expected):
    assert t_cdf(t, df) == pytest.approx(expected, abs=5e-4)


@pytest.mark.parametrize('df', DFS + [3.7])
def test_t_cdf_is_one_half_at_zero(df):
    assert t_cdf(0.0, df) == 0.5


@pytest.mark.parametrize('df', DFS)
def test_t_cdf_agrees_with_quadrature(df):
    for t in np.linspace(-8.0, 8.0, 161):
        assert t_cdf(float(t), df) == pytest.approx(t_cdf_oracle(float(t), df), abs=1e-8)


def test_t_cdf_non_integer_df():
    assert t_cdf(1.3, 7.42) == pytest.approx(t_cdf_oracle(1.3, 7.42), abs=1e-8)


def test_t_cdf_rejects_bad_df():
    with pytest.raises(DomainError):
        t_cdf(1.0, 0.0)


def test_t_cdf_symmetry():
    rng = np.random.default_rng(3)
    for t, df in zip(rng.normal(0, 4, 1000), rng.uniform(0.5, 500, 1000)):
        assert t_cdf(t, df) + t_cdf(-t, df) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('df', [1, 5, 38, 1000])
def test_t_cdf_strictly_increasing(df):
    values = [t_cdf(float(t), df) for t in np.linspace(-6.0, 6.0, 1000)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_t_cdf_large_df_limit():
    for t in np.linspace(-4.0, 4.0, 81):
        assert abs(t_cdf(float(t), 1000) - norm_cdf(float(t))) < 1e-3


def test_t_pdf_matches_density():
    assert t_pdf(0.7, 9) == pytest.approx(t_density(0.7, 9), rel=1e-12)


@pytest.mark.parametrize('p, df, expected', [
    (0.975, 10, 2.2281),
    (0.95, 9, 1.8331),
])
def test_t_quantile_table_values(p, df, expected):
    assert t_quantile(p, df) == pytest.approx(expected, abs=1e-4)


def test_t_quantile_median_is_zero():
    assert t_quantile(0.5, 7) == 0.0


@pytest.mark.parametrize('p', [0.0, 1.0, -0.1, 1.2])
def test_t_quantile_domain(p):
    with pytest.raises(DomainError):
        t_quantile(p, 5)


@pytest.mark.parametrize('df', [1, 2, 5, 10, 38, 100])
def test_t_quantile_round_trip(df):
    for p in np.linspace(0.001, 0.999, 999):
        assert t_cdf(t_quantile(float(p), df), df) == pytest.approx(float(p), abs=1e-9)


def test_normal_functions():
    assert norm_cdf(0.0) == 0.5
    assert norm_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    for z in (0.5, 1.0, 2.0):
        assert norm_cdf(z) + norm_cdf(-z) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        norm_quantile(1.0)
