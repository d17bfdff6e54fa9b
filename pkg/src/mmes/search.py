"""Extremal entanglement search: simulated annealing plus gradient polish.

Minimizing the potential hunts maximally multipartite entangled states, whose
purity profile is as flat and low as the qubit count allows; maximizing walks
out to product states where every purity is 1.  Annealing sweeps the inverse
temperature through a ladder while adapting the kick size, keeps the best
energy ever observed, and optionally finishes with projected gradient descent
on the sphere.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entanglement import (PurityProfile, _potential_amps, _tangent_gradient_amps,
                           potential, purity_profile)
from .errors import DomainError, NumericalError
from .state import PureState, _check_n, _haar_amplitudes, stream_rng

_STEP_MIN, _STEP_MAX = 1e-7, 10.0
_POLISH_GRAD_TOL = 1e-9
_POLISH_MAX_ITER = 10000
_ARMIJO = 1e-4


@dataclass(frozen=True)
class AnnealSchedule:
    """Annealing plan.  The ladder runs from beta_start to beta_end over
    `levels` rungs (geometric spacing by default), spending sweeps_per_level
    Metropolis proposals on each; the whole ladder restarts from fresh Haar
    states `restarts` times.  Defaults finish in minutes up to n=7."""

    beta_start: float = 1.0
    beta_end: float = 1e5
    levels: int = 60
    sweeps_per_level: int = 2000
    geometric: bool = True
    restarts: int = 8
    polish: bool = True
    seed: int = 0
    step_size: float = 0.5
    target_acceptance: float = 0.35

    def __post_init__(self):
        for name in ("levels", "sweeps_per_level", "restarts"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if not (math.isfinite(self.beta_start) and math.isfinite(self.beta_end)):
            raise DomainError("beta_start and beta_end must be finite")
        if self.beta_start < 0.0 or self.beta_end <= self.beta_start:
            raise DomainError(
                f"need beta_end > beta_start >= 0, got {self.beta_start} .. {self.beta_end}")
        if self.geometric and self.beta_start <= 0.0:
            raise DomainError("a geometric ladder needs beta_start > 0")
        if not (math.isfinite(self.step_size) and self.step_size > 0.0):
            raise DomainError(f"step_size must be positive, got {self.step_size!r}")
        if not 0.0 < self.target_acceptance < 1.0:
            raise DomainError(f"target_acceptance must be in (0, 1), got {self.target_acceptance}")

    def ladder(self) -> np.ndarray:
        if self.geometric:
            return np.geomspace(self.beta_start, self.beta_end, self.levels)
        return np.linspace(self.beta_start, self.beta_end, self.levels)


@dataclass(frozen=True)
class MmesResult:
    """Best state found by anneal(); energy is recomputed from the state."""

    state: PureState
    energy: float
    profile: PurityProfile
    gap: float
    direction: str
    best_restart: int
    best_sweep: int
    grad_norm: float
    polish_iterations: int

    def __post_init__(self):
        if abs(self.energy - potential(self.state)) > 1e-12:
            raise NumericalError("result energy disagrees with its state")
        if self.direction == "minimize" and self.gap < -1e-10:
            raise NumericalError(f"energy fell below the purity floor (gap {self.gap!r})")


def _anneal_restart(n: int, schedule: AnnealSchedule, sign: float, restart: int):
    rng = stream_rng(schedule.seed, restart)
    dim2 = 1 << (n + 1)
    z = _haar_amplitudes(n, rng)
    energy = _potential_amps(z, n)
    best_z, best_energy, best_sweep = z.copy(), energy, 0
    step = schedule.step_size
    sweep = 0
    for beta in schedule.ladder():
        log_step = math.log(step)
        for local in range(schedule.sweeps_per_level):
            kick = rng.standard_normal(dim2).view(np.complex128)
            w = z + step * kick
            w /= np.linalg.norm(w)
            new_energy = _potential_amps(w, n)
            sweep += 1
            if sign * (new_energy - best_energy) < 0.0:
                best_z, best_energy, best_sweep = w.copy(), new_energy, sweep
            arg = -beta * sign * (new_energy - energy)
            u = rng.random()
            if arg >= 0.0 or u < math.exp(arg):
                z, energy = w, new_energy
                moved = 1.0
            else:
                moved = 0.0
            log_step += (moved - schedule.target_acceptance) / (1.0 + local) ** 0.6
            step = min(max(math.exp(log_step), _STEP_MIN), _STEP_MAX)
    return best_z, best_energy, best_sweep


def _polish(z: np.ndarray, n: int, sign: float):
    """Projected gradient descent on the sphere with Armijo backtracking."""
    v = z.view(np.float64).copy()
    energy = sign * _potential_amps(v.view(np.complex128), n)
    alpha = 1.0
    grad_norm = math.inf
    iterations = 0
    for iterations in range(1, _POLISH_MAX_ITER + 1):
        grad = sign * _tangent_gradient_amps(v.view(np.complex128), n)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < _POLISH_GRAD_TOL:
            iterations -= 1
            break
        alpha = min(2.0 * alpha, 1.0)
        while True:
            trial = v - alpha * grad
            trial /= np.linalg.norm(trial)
            trial_energy = sign * _potential_amps(trial.view(np.complex128), n)
            if trial_energy <= energy - _ARMIJO * alpha * grad_norm**2:
                v, energy = trial, trial_energy
                break
            alpha *= 0.5
            if alpha < 1e-18:  # no descent direction left at double precision
                return v.view(np.complex128), iterations, grad_norm
    return v.view(np.complex128), iterations, grad_norm


def anneal(n: int, schedule: AnnealSchedule | None = None,
           direction: str = "minimize", *, workers: int = 1) -> MmesResult:
    """Search for the extremal potential; returns the best over all restarts.

    Ties across restarts resolve to the lowest restart index.  With a fixed
    schedule seed the result is identical no matter how many workers run.
    """
    n = _check_n(n)
    if direction not in ("minimize", "maximize"):
        raise DomainError(f"direction must be 'minimize' or 'maximize', got {direction!r}")
    if schedule is None:
        schedule = AnnealSchedule()
    if workers < 1:
        raise DomainError(f"workers must be at least 1, got {workers}")
    sign = 1.0 if direction == "minimize" else -1.0

    def one(r: int):
        return _anneal_restart(n, schedule, sign, r)

    indices = range(schedule.restarts)
    if workers > 1 and schedule.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, indices))
    else:
        outcomes = [one(r) for r in indices]

    best = None
    for restart, (z, energy, sweep) in enumerate(outcomes):
        if best is None or sign * (energy - best[1]) < 0.0:
            best = (z, energy, sweep, restart)
    z, energy, sweep, restart = best

    iterations = 0
    if schedule.polish:
        z, iterations, grad_norm = _polish(z, n, sign)
    else:
        grad_norm = float(np.linalg.norm(_tangent_gradient_amps(z, n)))
    if not math.isfinite(energy):
        raise NumericalError("annealing produced a non-finite energy")

    state = PureState(n, z / np.linalg.norm(z))
    final_energy = potential(state)
    return MmesResult(state=state, energy=final_energy,
                      profile=purity_profile(state),
                      gap=final_energy - 1.0 / (1 << (n // 2)),
                      direction=direction, best_restart=restart,
                      best_sweep=sweep, grad_norm=float(grad_norm),
                      polish_iterations=iterations)


@dataclass(frozen=True)
class CertifyReport:
    """Recomputed-from-scratch audit of a candidate extremal state."""

    n: int
    energy: float
    gap: float
    spread: float
    grad_norm: float
    perfect: bool
    masks: tuple[int, ...]
    purities: np.ndarray


def certify(candidate: MmesResult | PureState) -> CertifyReport:
    """Audit a result (or bare state): fresh profile, gap to the purity floor,
    tangent gradient norm, and whether the state is a perfect minimizer
    (every balanced purity at its floor, within 1e-6 on the gap)."""
    state = candidate.state if isinstance(candidate, MmesResult) else candidate
    if not isinstance(state, PureState):
        raise DomainError(f"cannot certify a {type(candidate).__name__}")
    prof = purity_profile(state)
    energy = potential(state)
    gap = energy - 1.0 / (1 << (state.n // 2))
    grad_norm = float(np.linalg.norm(_tangent_gradient_amps(state.amplitudes, state.n)))
    return CertifyReport(n=state.n, energy=energy, gap=gap,
                         spread=prof.max - prof.min, grad_norm=grad_norm,
                         perfect=bool(gap < 1e-6), masks=prof.masks,
                         purities=prof.purities)
