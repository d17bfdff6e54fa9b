"""Closed-form reference values and distribution comparison helpers.

For a Haar-random pure state split into parts of dimensions d_A and d_Abar
(total N = d_A * d_Abar), the purity of part A has

    mean     (d_A + d_Abar) / (N + 1)
    variance 2 (d_A^2 - 1)(d_Abar^2 - 1) / ((N + 1)^2 (N + 2)(N + 3))

For the balanced average over bipartitions the variance does not self-average
down to variance/#bipartitions: correlations between overlapping bipartitions
leave a second cumulant scaling as 3*sqrt(2) * N^(log2(3) - 4).  A weak
quadratic coupling merely shifts a Gaussian energy distribution rigidly by
beta * variance, which is what GaussianModel encodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

_ERF = np.vectorize(math.erf, otypes=[np.float64])


def _check_part(name: str, value: int) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise DomainError(f"{name} must be at least 1, got {value}")
    return value


def typical_mean(n_a: int, n_abar: int) -> float:
    """Haar-average purity of a part with n_a of n_a+n_abar qubits."""
    n_a = _check_part("n_a", n_a)
    n_abar = _check_part("n_abar", n_abar)
    dim_a, dim_abar = 1 << n_a, 1 << n_abar
    # Exact rational first: the integers overflow float64 near n=2100, and
    # Fraction-to-float conversion rounds correctly for any size.
    return float(Fraction(dim_a + dim_abar, dim_a * dim_abar + 1))


def typical_variance(n_a: int, n_abar: int) -> float:
    """Haar variance of the same purity."""
    n_a = _check_part("n_a", n_a)
    n_abar = _check_part("n_abar", n_abar)
    dim_a, dim_abar = 1 << n_a, 1 << n_abar
    total = dim_a * dim_abar
    num = 2 * (dim_a**2 - 1) * (dim_abar**2 - 1)
    den = (total + 1) ** 2 * (total + 2) * (total + 3)
    return float(Fraction(num, den))


def balanced_typical_mean(n: int) -> float:
    """typical_mean at the balanced split of n qubits (also the mean potential)."""
    n = _check_part("n", n)
    if n < 2:
        raise DomainError(f"need at least 2 qubits, got n={n}")
    return typical_mean(n // 2, n - n // 2)


def balanced_typical_variance(n: int) -> float:
    n = _check_part("n", n)
    if n < 2:
        raise DomainError(f"need at least 2 qubits, got n={n}")
    return typical_variance(n // 2, n - n // 2)


def asymptotic_kappa2(n: int) -> float:
    """Large-n second cumulant of the potential, 3*sqrt(2) * N^(log2(3) - 4)."""
    n = _check_part("n", n)
    return 3.0 * math.sqrt(2.0) * 2.0 ** (n * (math.log2(3.0) - 4.0))


@dataclass(frozen=True)
class GaussianModel:
    """Gaussian energy distribution rigidly shifted by the inverse temperature.

    predicted_mean = mu - beta * sigma2.  The shift picture holds while the
    moving mean stays clear of the spectral floor; beta_star = mu / sigma2
    marks where the predicted mean would reach zero.  wall_clear records
    whether predicted_mean - sigma stays above a supplied floor estimate
    (None when no floor was given).
    """

    mu: float
    sigma2: float
    beta: float
    predicted_mean: float
    beta_star: float
    wall_clear: bool | None

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.sigma2 == 0.0:
            raise DomainError("degenerate model has no density")
        s2 = self.sigma2
        return np.exp(-((x - self.predicted_mean) ** 2) / (2.0 * s2)) / math.sqrt(2.0 * math.pi * s2)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.sigma2 == 0.0:
            return (x >= self.predicted_mean).astype(np.float64)
        scale = math.sqrt(2.0 * self.sigma2)
        return 0.5 * (1.0 + _ERF((x - self.predicted_mean) / scale))

    def mean(self) -> float:
        return self.predicted_mean

    def variance(self) -> float:
        return self.sigma2


def gaussian_prediction(mu: float, sigma2: float, beta: float,
                        floor: float | None = None) -> GaussianModel:
    mu, sigma2, beta = float(mu), float(sigma2), float(beta)
    if not math.isfinite(mu) or not math.isfinite(sigma2) or not math.isfinite(beta):
        raise DomainError("mu, sigma2 and beta must be finite")
    if sigma2 < 0.0:
        raise DomainError(f"sigma2 must be non-negative, got {sigma2}")
    predicted = mu - beta * sigma2
    beta_star = mu / sigma2 if sigma2 > 0.0 else math.inf
    wall_clear = None
    if floor is not None:
        wall_clear = bool(predicted - math.sqrt(sigma2) >= float(floor))
    return GaussianModel(mu=mu, sigma2=sigma2, beta=beta,
                         predicted_mean=predicted, beta_star=beta_star,
                         wall_clear=wall_clear)


@dataclass(frozen=True)
class Histogram:
    """Binned distribution; weights are densities when density=True else counts.

    n_samples keeps the (effective) number of raw samples so comparisons can
    attach standard errors; None when unknown.
    """

    edges: np.ndarray
    weights: np.ndarray
    density: bool = False
    n_samples: float | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise DomainError("need at least two bin edges")
        if np.any(np.diff(edges) <= 0.0):
            raise DomainError("bin edges must be strictly increasing")
        if weights.shape != (edges.size - 1,):
            raise DomainError(f"need {edges.size - 1} weights for {edges.size} edges")
        if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
            raise DomainError("weights must be finite and non-negative")
        mass = float(np.sum(weights * np.diff(edges))) if self.density else float(weights.sum())
        if mass <= 0.0:
            raise DomainError("histogram has no mass")
        if self.density and abs(mass - 1.0) > 1e-9:
            raise DomainError(f"density must integrate to 1, got {mass!r}")
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_samples(cls, values, bins: int = 100, range=None, weights=None,
                     density: bool = True, n_samples: float | None = None) -> "Histogram":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise DomainError("cannot histogram an empty sample set")
        if not isinstance(bins, (int, np.integer)) or int(bins) < 1:
            raise DomainError(f"bins must be a positive integer, got {bins!r}")
        counts, edges = np.histogram(values, bins=int(bins), range=range,
                                     weights=weights, density=density)
        if n_samples is None:
            if weights is None:
                n_samples = float(values.size)
            else:
                w = np.asarray(weights, dtype=np.float64)
                n_samples = float(w.sum() ** 2 / np.sum(w**2))
        return cls(edges=edges, weights=counts, density=density, n_samples=n_samples)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def bin_masses(self) -> np.ndarray:
        if self.density:
            return self.weights * np.diff(self.edges)
        return self.weights / self.weights.sum()

    def cdf_at_edges(self) -> np.ndarray:
        masses = self.bin_masses
        c = np.concatenate(([0.0], np.cumsum(masses)))
        return c / c[-1]

    def mean(self) -> float:
        return float(np.dot(self.bin_masses, self.centers))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot(self.bin_masses, (self.centers - m) ** 2))

    def plot_rows(self) -> list[tuple[float, float]]:
        """Two-column plot data: (bin center, density)."""
        dens = self.weights if self.density else self.bin_masses / np.diff(self.edges)
        return [(float(c), float(d)) for c, d in zip(self.centers, dens)]


def ks_critical(alpha: float, m: float, m2: float | None = None) -> float:
    """Asymptotic Kolmogorov-Smirnov critical distance at significance alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if m <= 0:
        raise DomainError("need a positive sample count")
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    if m2 is None:
        return c / math.sqrt(m)
    if m2 <= 0:
        raise DomainError("need a positive sample count")
    return c * math.sqrt((m + m2) / (m * m2))


@dataclass(frozen=True)
class CompareReport:
    """Histogram-vs-model or histogram-vs-histogram comparison.

    ks is the sup-distance between cumulative distributions evaluated on the
    bin grid; mean_z and variance_z are moment differences in standard-error
    units (nan when sample counts are unknown).
    """

    ks: float
    ks_critical_1pct: float
    mean_difference: float
    variance_difference: float
    mean_z: float
    variance_z: float


def compare(hist: Histogram, other: Histogram | GaussianModel) -> CompareReport:
    if not isinstance(hist, Histogram):
        raise DomainError("first argument must be a Histogram")
    m1 = hist.n_samples
    if isinstance(other, GaussianModel):
        grid = hist.edges
        f1 = hist.cdf_at_edges()
        f2 = other.cdf(grid)
        crit = ks_critical(0.01, m1) if m1 else math.nan
        m2_count = None
    elif isinstance(other, Histogram):
        grid = np.union1d(hist.edges, other.edges)
        f1 = np.interp(grid, hist.edges, hist.cdf_at_edges(), left=0.0, right=1.0)
        f2 = np.interp(grid, other.edges, other.cdf_at_edges(), left=0.0, right=1.0)
        m2_count = other.n_samples
        crit = ks_critical(0.01, m1, m2_count) if m1 and m2_count else math.nan
    else:
        raise DomainError(f"cannot compare a Histogram with {type(other).__name__}")

    ks = float(np.max(np.abs(f1 - f2)))
    mean_diff = hist.mean() - other.mean()
    var_diff = hist.variance() - other.variance()

    # Standard errors from a normal approximation on the binned moments.
    def moment_ses(count, var):
        if not count or count <= 1:
            return math.nan, math.nan
        return math.sqrt(var / count), var * math.sqrt(2.0 / (count - 1))

    se_m1, se_v1 = moment_ses(m1, hist.variance())
    if isinstance(other, Histogram):
        se_m2, se_v2 = moment_ses(m2_count, other.variance())
        se_mean = math.hypot(se_m1, se_m2)
        se_var = math.hypot(se_v1, se_v2)
    else:
        se_mean, se_var = se_m1, se_v1
    mean_z = mean_diff / se_mean if se_mean and math.isfinite(se_mean) and se_mean > 0 else math.nan
    var_z = var_diff / se_var if se_var and math.isfinite(se_var) and se_var > 0 else math.nan
    return CompareReport(ks=ks, ks_critical_1pct=crit,
                         mean_difference=float(mean_diff),
                         variance_difference=float(var_diff),
                         mean_z=float(mean_z), variance_z=float(var_z))
