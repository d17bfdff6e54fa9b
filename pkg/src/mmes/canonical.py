"""Canonical-ensemble Monte Carlo over pure states.

The target density on the amplitude sphere is proportional to exp(-beta * E)
with E the entanglement potential.  Proposals add an isotropic Gaussian kick
and renormalize; that kernel is symmetric, so plain Metropolis acceptance
min(1, exp(-beta * dE)) is correct.  beta may take any sign: positive weights
push toward highly entangled states, negative toward separable ones, zero
reproduces the Haar ensemble.

Chains are reproducible: every chain derives its generator from the master
seed and its stream index, so results do not depend on how many workers run.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .entanglement import _potential_amps
from .errors import DegenerateWeightsError, DomainError, NumericalError
from .state import _check_n, _haar_amplitudes, stream_rng
from .theory import Histogram

_STEP_MIN, _STEP_MAX = 1e-7, 10.0


@dataclass(frozen=True)
class CanonicalConfig:
    """Chain parameters.  steps counts all Metropolis proposals per chain;
    energies are recorded every thin steps once burn_in has passed.  During
    burn-in only, the kick size is adapted toward target_acceptance by a
    Robbins-Monro recursion, then frozen so the recorded stretch is a proper
    fixed-kernel chain."""

    beta: float
    steps: int = 20000
    burn_in: int = 2000
    thin: int = 1
    step_size: float = 0.1
    adapt: bool = True
    target_acceptance: float = 0.35
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        if not math.isfinite(float(self.beta)):
            raise DomainError(f"beta must be finite, got {self.beta!r}")
        for name in ("steps", "burn_in", "thin", "chains"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise DomainError(f"{name} must be an integer, got {v!r}")
        if self.burn_in < 0:
            raise DomainError(f"burn_in must be non-negative, got {self.burn_in}")
        if self.steps <= self.burn_in:
            raise DomainError(f"steps ({self.steps}) must exceed burn_in ({self.burn_in})")
        if self.thin < 1:
            raise DomainError(f"thin must be at least 1, got {self.thin}")
        if self.chains < 1:
            raise DomainError(f"chains must be at least 1, got {self.chains}")
        if not (math.isfinite(self.step_size) and self.step_size > 0.0):
            raise DomainError(f"step_size must be positive, got {self.step_size!r}")
        if not 0.0 < self.target_acceptance < 1.0:
            raise DomainError(f"target_acceptance must be in (0, 1), got {self.target_acceptance}")


@dataclass(frozen=True)
class EnergySamples:
    """Recorded potential values, one row per chain, plus chain metadata."""

    beta: float
    n: int
    seed: int
    energies: np.ndarray
    acceptance_rates: tuple[float, ...]
    step_sizes: tuple[float, ...]
    thin: int = 1
    burn_in: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.energies, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("energies must be a non-empty (chains, samples) array")
        floor = 1.0 / (1 << (self.n // 2))
        if not np.all(np.isfinite(arr)):
            raise NumericalError("recorded energies contain non-finite values")
        if arr.min() < floor - 1e-10 or arr.max() > 1.0 + 1e-10:
            raise DomainError("recorded energies fall outside the valid potential range")
        arr.setflags(write=False)
        object.__setattr__(self, "energies", arr)

    @property
    def chains(self) -> int:
        return self.energies.shape[0]

    @property
    def per_chain(self) -> int:
        return self.energies.shape[1]

    @property
    def flat(self) -> np.ndarray:
        return self.energies.reshape(-1)

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.acceptance_rates))

    def to_csv_text(self) -> str:
        lines = ["step,E"]
        # repr of a Python float round-trips exactly; numpy scalars do not
        lines.extend(f"{i},{float(e)!r}" for i, e in enumerate(self.flat))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        mean, se = mean_and_se(self)
        return {
            "beta": self.beta,
            "n": self.n,
            "seed": self.seed,
            "chains": self.chains,
            "samples": int(self.flat.size),
            "mean": mean,
            "std_error": se,
            "ess": effective_samples(self),
            "acceptance": self.acceptance_rate,
            "warnings": list(self.warnings),
        }


def _run_chain(n: int, cfg: CanonicalConfig, stream: tuple[int, ...]):
    rng = stream_rng(cfg.seed, *stream)
    dim2 = 1 << (n + 1)
    z = _haar_amplitudes(n, rng)
    energy = _potential_amps(z, n)
    step = cfg.step_size
    log_step = math.log(step)
    beta = float(cfg.beta)
    recorded = np.empty((cfg.steps - cfg.burn_in + cfg.thin - 1) // cfg.thin)
    k = accepted = 0
    for t in range(cfg.steps):
        kick = rng.standard_normal(dim2).view(np.complex128)
        w = z + step * kick
        w /= np.linalg.norm(w)
        new_energy = _potential_amps(w, n)
        arg = -beta * (new_energy - energy)
        u = rng.random()
        if arg >= 0.0 or u < math.exp(arg):
            z, energy = w, new_energy
            moved = 1.0
        else:
            moved = 0.0
        if t < cfg.burn_in:
            if cfg.adapt:
                log_step += (moved - cfg.target_acceptance) / (1.0 + t) ** 0.6
                step = min(max(math.exp(log_step), _STEP_MIN), _STEP_MAX)
        else:
            accepted += moved
            if (t - cfg.burn_in) % cfg.thin == 0:
                recorded[k] = energy
                k += 1
    rate = accepted / (cfg.steps - cfg.burn_in)
    return recorded, rate, step


def metropolis_chain(n: int, config: CanonicalConfig, *,
                     stream: tuple[int, ...] = (), workers: int = 1) -> EnergySamples:
    """Run config.chains independent chains and stack their recorded energies."""
    n = _check_n(n)
    if workers < 1:
        raise DomainError(f"workers must be at least 1, got {workers}")

    def one(c: int):
        return _run_chain(n, config, stream + (c,))

    indices = range(config.chains)
    if workers > 1 and config.chains > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(c) for c in indices]

    energies = np.stack([r[0] for r in results])
    rates = tuple(float(r[1]) for r in results)
    warnings = tuple(
        f"chain {c}: acceptance rate {rate:.4f} below 0.01 after adaptation"
        for c, rate in enumerate(rates) if rate < 0.01
    )
    return EnergySamples(beta=float(config.beta), n=n, seed=int(config.seed),
                         energies=energies, acceptance_rates=rates,
                         step_sizes=tuple(float(r[2]) for r in results),
                         thin=config.thin, burn_in=config.burn_in, warnings=warnings)


def haar_energy_samples(n: int, count: int, seed: int | None = 0) -> EnergySamples:
    """Independent Haar draws of the potential, packaged as beta=0 samples."""
    n = _check_n(n)
    if not isinstance(count, (int, np.integer)) or int(count) < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    rng = stream_rng(seed)
    energies = np.empty(int(count))
    for i in range(int(count)):
        energies[i] = _potential_amps(_haar_amplitudes(n, rng), n)
    return EnergySamples(beta=0.0, n=n, seed=0 if seed is None else int(seed),
                         energies=energies[np.newaxis, :],
                         acceptance_rates=(1.0,), step_sizes=(math.nan,))


def _batch_values(x: np.ndarray, stat) -> np.ndarray:
    """stat evaluated on ~sqrt(len) equal batches of a single chain."""
    m = x.size
    nb = max(2, math.isqrt(m))
    b = m // nb
    if b < 1:
        return np.array([stat(x)])
    trimmed = x[: nb * b].reshape(nb, b)
    return np.array([stat(row) for row in trimmed])


def mean_and_se(samples: EnergySamples) -> tuple[float, float]:
    """Pooled mean and a batch-means standard error honest about autocorrelation."""
    arr = samples.energies
    mean = float(arr.mean())
    if arr.shape[1] < 4:
        return mean, math.nan
    batch_means = np.concatenate([_batch_values(row, np.mean) for row in arr])
    if batch_means.size < 2:
        return mean, math.nan
    se = float(batch_means.std(ddof=1) / math.sqrt(batch_means.size))
    return mean, se


def _ess_one(x: np.ndarray) -> float:
    m = x.size
    centered = x - x.mean()
    var = float(np.dot(centered, centered)) / m
    if var == 0.0 or m < 4:
        return float(m)
    size = 1 << (2 * m - 1).bit_length()
    f = np.fft.rfft(centered, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:m].real / m
    rho = acov / acov[0]
    # Geyer pairing: sum rho in adjacent pairs while the pair sums stay positive.
    tau = -1.0
    for k in range(0, m - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
    tau = max(tau, 1.0)
    return m / tau


def effective_samples(samples: EnergySamples | np.ndarray) -> float:
    """Autocorrelation-adjusted sample count, summed over chains."""
    arr = samples.energies if isinstance(samples, EnergySamples) else np.atleast_2d(samples)
    return float(sum(_ess_one(np.asarray(row, dtype=np.float64)) for row in arr))


@dataclass(frozen=True)
class ReweightResult:
    """Importance-reweighted estimate of the mean potential at a new beta."""

    beta_source: float
    beta: float
    mean: float
    std_error: float
    ess: float
    histogram: Histogram
    log_weights: np.ndarray


def reweight(samples: EnergySamples, beta: float, *, bins: int = 100,
             min_ess: float = 10.0) -> ReweightResult:
    """Reuse samples from beta_source at another beta via weights exp(-(b-b0)E).

    Refuses when the effective sample size (sum w)^2 / sum w^2 falls below
    min_ess; lower the threshold explicitly for degenerate but intentional
    cases such as a single sample.
    """
    beta = float(beta)
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta!r}")
    energies = samples.flat
    log_w = -(beta - samples.beta) * energies
    w = np.exp(log_w - log_w.max())
    ess = float(w.sum() ** 2 / np.sum(w**2))
    if ess < min_ess:
        raise DegenerateWeightsError(
            f"effective sample size {ess:.2f} below {min_ess} when reweighting "
            f"beta {samples.beta} -> {beta}")
    mean = float(np.dot(w, energies) / w.sum())

    # Jackknife over contiguous batches (per chain) for the ratio estimator.
    per = samples.per_chain
    nb = max(2, math.isqrt(per))
    b = per // nb
    nums, dens = [], []
    for c in range(samples.chains):
        wc = w[c * per:(c + 1) * per]
        ec = energies[c * per:(c + 1) * per]
        for i in range(nb):
            sl = slice(i * b, (i + 1) * b)
            nums.append(float(np.dot(wc[sl], ec[sl])))
            dens.append(float(wc[sl].sum()))
    nums, dens = np.array(nums), np.array(dens)
    se = math.nan
    if nums.size >= 2 and dens.sum() > 0:
        total_n, total_d = nums.sum(), dens.sum()
        keep = total_d - dens > 0
        if np.all(keep):
            loo = (total_n - nums) / (total_d - dens)
            nbatch = loo.size
            se = float(math.sqrt((nbatch - 1) / nbatch * np.sum((loo - loo.mean()) ** 2)))

    hist = Histogram.from_samples(energies, bins=bins, weights=w, density=True,
                                  n_samples=ess)
    return ReweightResult(beta_source=float(samples.beta), beta=beta, mean=mean,
                          std_error=se, ess=ess, histogram=hist, log_weights=log_w)


@dataclass(frozen=True)
class MeanEnergyPoint:
    beta: float
    mean: float
    std_error: float
    ess: float
    acceptance: float


def mean_energy_scan(n: int, betas, config: CanonicalConfig, *,
                     workers: int = 1) -> list[MeanEnergyPoint]:
    """Mean potential at each beta from one independent chain set per beta.

    Rows come back sorted by beta.  Stream indices are assigned after sorting,
    so the same seed and beta set reproduce identical numbers regardless of
    the order betas were passed in.
    """
    n = _check_n(n)
    values = sorted(float(b) for b in betas)
    if not values:
        raise DomainError("need at least one beta")
    if any(not math.isfinite(b) for b in values):
        raise DomainError("betas must be finite")
    rows = []
    for idx, beta in enumerate(values):
        samples = metropolis_chain(n, replace(config, beta=beta),
                                   stream=(idx,), workers=workers)
        mean, se = mean_and_se(samples)
        rows.append(MeanEnergyPoint(beta=beta, mean=mean, std_error=se,
                                    ess=effective_samples(samples),
                                    acceptance=samples.acceptance_rate))
    return rows


@dataclass(frozen=True)
class CumulantEstimate:
    order: int
    value: float
    std_error: float

    def __post_init__(self):
        if self.order == 2 and math.isfinite(self.std_error):
            if self.value < -3.0 * self.std_error - 1e-15:
                raise NumericalError(
                    f"second cumulant {self.value!r} is negative beyond its error bar")


def _k_statistics(x: np.ndarray, max_order: int) -> list[float]:
    """Unbiased cumulant estimators (k-statistics) up to max_order."""
    m = x.size
    mean = float(x.mean())
    out = [mean]
    if max_order >= 2:
        d = x - mean
        m2 = float(np.mean(d**2))
        out.append(m * m2 / (m - 1))
        if max_order >= 3:
            m3 = float(np.mean(d**3))
            out.append(m * m * m3 / ((m - 1) * (m - 2)))
            if max_order >= 4:
                m4 = float(np.mean(d**4))
                num = m * m * ((m + 1) * m4 - 3 * (m - 1) * m2 * m2)
                out.append(num / ((m - 1) * (m - 2) * (m - 3)))
    return out


_MIN_EFF = {1: 100.0, 2: 100.0, 3: 10000.0, 4: 10000.0}


def cumulants(samples: EnergySamples, max_order: int = 2) -> list[CumulantEstimate]:
    """k-statistics of the recorded energies with batch-based standard errors."""
    if not isinstance(max_order, (int, np.integer)) or not 1 <= int(max_order) <= 4:
        raise DomainError(f"max_order must be between 1 and 4, got {max_order!r}")
    max_order = int(max_order)
    eff = effective_samples(samples)
    needed = _MIN_EFF[max_order]
    if eff < needed:
        raise DomainError(
            f"order {max_order} cumulants need at least {needed:.0f} effective "
            f"samples, got {eff:.1f}")
    pooled = samples.flat
    values = _k_statistics(pooled, max_order)
    estimates = []
    for order in range(1, max_order + 1):
        def stat(row, order=order):
            return _k_statistics(row, order)[order - 1]
        batches = np.concatenate([_batch_values(row, stat) for row in samples.energies])
        se = float(batches.std(ddof=1) / math.sqrt(batches.size)) if batches.size >= 2 else math.nan
        estimates.append(CumulantEstimate(order=order, value=values[order - 1], std_error=se))
    return estimates
