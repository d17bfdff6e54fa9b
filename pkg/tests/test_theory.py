import math

import numpy as np
import pytest

from mmes import (
    DomainError,
    GaussianModel,
    Histogram,
    asymptotic_kappa2,
    balanced_typical_mean,
    balanced_typical_variance,
    compare,
    gaussian_prediction,
    haar_energy_samples,
    ks_critical,
    typical_mean,
    typical_variance,
)


def test_typical_mean_known_values():
    assert typical_mean(2, 2) == pytest.approx(8 / 17, rel=0, abs=1e-15)
    assert typical_mean(1, 1) == pytest.approx(4 / 5, rel=0, abs=1e-15)
    assert typical_mean(1, 2) == pytest.approx(6 / 9, rel=0, abs=1e-15)


def test_typical_variance_known_values():
    assert typical_variance(1, 1) == pytest.approx(18 / 1050, rel=1e-12)
    assert typical_variance(2, 2) == pytest.approx(450 / 98838, rel=1e-12)


def test_typical_moments_symmetry_and_domain():
    assert typical_mean(3, 5) == typical_mean(5, 3)
    assert typical_variance(2, 6) == typical_variance(6, 2)
    with pytest.raises(DomainError):
        typical_mean(0, 3)
    with pytest.raises(DomainError):
        typical_variance(-1, 2)


def test_balanced_wrappers():
    assert balanced_typical_mean(4) == typical_mean(2, 2)
    assert balanced_typical_mean(5) == typical_mean(2, 3)
    assert balanced_typical_variance(6) == typical_variance(3, 3)


def test_typical_mean_matches_haar_sampling():
    samples = haar_energy_samples(4, 4000, seed=3)
    mu = balanced_typical_mean(4)
    assert samples.flat.mean() == pytest.approx(mu, abs=4 * samples.flat.std() / 63)


def test_asymptotic_kappa2_closed_form():
    assert asymptotic_kappa2(10) == pytest.approx(2.2785e-7, rel=1e-3)
    # doubling n multiplies by 2^(n(log2 3 - 4)) twice over
    ratio = asymptotic_kappa2(12) / asymptotic_kappa2(10)
    assert ratio == pytest.approx(2 ** (2 * (math.log2(3) - 4)), rel=1e-12)


def test_gaussian_model_fields_and_prediction():
    mu, s2 = balanced_typical_mean(10), asymptotic_kappa2(10)
    m = gaussian_prediction(mu, s2, beta=0.0)
    assert m.predicted_mean == pytest.approx(mu)
    assert m.beta_star == pytest.approx(mu / s2, rel=1e-12)
    assert m.beta_star == pytest.approx(2.74e5, rel=1e-2)
    shifted = gaussian_prediction(mu, s2, beta=1000.0)
    assert shifted.predicted_mean == pytest.approx(mu - 1000.0 * s2, rel=1e-12)
    assert shifted.wall_clear is None
    floored = gaussian_prediction(mu, s2, beta=1000.0, floor=0.0)
    assert floored.wall_clear is True
    crashed = gaussian_prediction(mu, s2, beta=2 * mu / s2, floor=0.0)
    assert crashed.wall_clear is False


def test_gaussian_model_pdf_cdf():
    m = GaussianModel(mu=0.0, sigma2=4.0, beta=0.0, predicted_mean=0.0,
                      beta_star=math.inf, wall_clear=True)
    x = np.linspace(-10, 10, 2001)
    pdf = m.pdf(x)
    assert np.trapezoid(pdf, x) == pytest.approx(1.0, abs=1e-6)
    assert m.cdf(0.0) == pytest.approx(0.5, abs=1e-12)
    assert m.cdf(2.0) - m.cdf(-2.0) == pytest.approx(0.6826894921, abs=1e-9)


def test_histogram_from_samples_invariants():
    rng = np.random.default_rng(0)
    x = rng.normal(size=5000)
    h = Histogram.from_samples(x, bins=40)
    assert h.n_samples == 5000
    widths = np.diff(h.edges)
    assert h.density is True
    assert np.sum(h.weights * widths) == pytest.approx(1.0, abs=1e-9)
    assert h.mean() == pytest.approx(x.mean(), abs=0.05)
    assert 0 < h.variance() < x.var() + 0.1


def test_histogram_weighted_effective_count():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    w = np.array([1.0, 1.0, 1.0, 1.0])
    h = Histogram.from_samples(x, bins=4, weights=w)
    assert h.n_samples == pytest.approx(4.0)
    w2 = np.array([1.0, 0.0, 0.0, 0.0])
    h2 = Histogram.from_samples(x, bins=4, weights=w2)
    assert h2.n_samples == pytest.approx(1.0)


def test_histogram_validation():
    with pytest.raises(DomainError):
        Histogram(edges=np.array([0.0, 1.0, 0.5]), weights=np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        Histogram(edges=np.array([0.0, 1.0]), weights=np.array([-1.0]))
    with pytest.raises(DomainError):
        Histogram.from_samples(np.array([]), bins=4)


def test_ks_critical_values():
    # one-sample asymptotic constants: c(0.05) = 1.3581, c(0.01) = 1.6276
    assert ks_critical(0.05, 100) == pytest.approx(0.13581, rel=1e-3)
    assert ks_critical(0.01, 100) == pytest.approx(0.16276, rel=1e-3)
    two = ks_critical(0.01, 100, 400)
    assert two == pytest.approx(1.6276 * math.sqrt(1 / 100 + 1 / 400), rel=1e-3)


def test_compare_haar_against_gaussian_model():
    # at n = 10 the canonical-weight landscape is already close to Gaussian
    samples = haar_energy_samples(10, 3000, seed=1)
    x = samples.flat
    h = Histogram.from_samples(x, bins=60)
    model = gaussian_prediction(x.mean(), x.var(ddof=1), beta=0.0)
    report = compare(h, model)
    assert report.ks < report.ks_critical_1pct
    assert abs(report.mean_z) < 4


def test_compare_histogram_vs_histogram():
    rng = np.random.default_rng(5)
    a = Histogram.from_samples(rng.normal(size=4000), bins=50)
    b = Histogram.from_samples(rng.normal(size=4000), bins=37)
    report = compare(a, b)
    assert report.ks < report.ks_critical_1pct
    c = Histogram.from_samples(rng.normal(loc=3.0, size=4000), bins=50)
    bad = compare(a, c)
    assert bad.ks > bad.ks_critical_1pct


def test_histogram_plot_rows():
    h = Histogram.from_samples(np.random.default_rng(2).normal(size=1000), bins=10)
    rows = h.plot_rows()
    assert len(rows) == 10
    centers = np.array([c for c, _ in rows])
    dens = np.array([d for _, d in rows])
    assert np.allclose(centers, h.centers)
    assert np.allclose(dens, h.weights)
