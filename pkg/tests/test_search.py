import numpy as np
import pytest

from mmes import (
    AnnealSchedule,
    DomainError,
    MmesResult,
    NumericalError,
    anneal,
    certify,
    ghz,
    haar_sample,
    potential,
    potential_gradient,
)

FAST = AnnealSchedule(levels=25, sweeps_per_level=400, restarts=2, seed=0)


def test_schedule_validation():
    with pytest.raises(DomainError):
        AnnealSchedule(levels=0)
    with pytest.raises(DomainError):
        AnnealSchedule(beta_start=-1.0)
    with pytest.raises(DomainError):
        AnnealSchedule(beta_start=100.0, beta_end=1.0)
    with pytest.raises(DomainError):
        AnnealSchedule(restarts=0)


def test_schedule_ladder():
    s = AnnealSchedule(beta_start=1.0, beta_end=100.0, levels=3)
    ladder = s.ladder()
    assert np.allclose(ladder, [1.0, 10.0, 100.0])
    lin = AnnealSchedule(beta_start=1.0, beta_end=3.0, levels=3, geometric=False)
    assert np.allclose(lin.ladder(), [1.0, 2.0, 3.0])


def test_anneal_two_qubits_hits_bell_floor():
    r = anneal(2, FAST)
    assert r.energy == pytest.approx(0.5, abs=1e-9)
    assert r.gap == pytest.approx(0.0, abs=1e-9)
    assert r.direction == "minimize"
    assert potential(r.state) == pytest.approx(r.energy, abs=1e-12)


def test_anneal_three_qubits_reaches_ghz_level():
    # every 1|2 cut of a 3-qubit pure state has purity >= 1/2, so the floor
    # of the balanced average is 1/2, attained by GHZ-class states
    r = anneal(3, FAST)
    assert r.energy == pytest.approx(0.5, abs=1e-9)


def test_anneal_maximize_reaches_product_states():
    r = anneal(3, FAST, direction="maximize")
    assert r.direction == "maximize"
    assert r.energy == pytest.approx(1.0, abs=1e-9)
    # gap is always measured against the purity floor, so here it is large
    assert r.gap == pytest.approx(0.5, abs=1e-9)


def test_anneal_determinism():
    a = anneal(2, FAST)
    b = anneal(2, FAST)
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)
    assert a.best_restart == b.best_restart
    assert a.best_sweep == b.best_sweep


def test_anneal_workers_do_not_change_result():
    sched = AnnealSchedule(levels=20, sweeps_per_level=300, restarts=3, seed=1)
    a = anneal(3, sched, workers=1)
    b = anneal(3, sched, workers=3)
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)


def test_anneal_beats_random_search():
    r = anneal(4, AnnealSchedule(levels=30, sweeps_per_level=600, restarts=2, seed=2))
    baseline = min(potential(haar_sample(4, seed=s)) for s in range(200))
    assert r.energy < baseline - 0.02
    assert r.energy == pytest.approx(1 / 3, abs=1e-3)


def test_anneal_seed_changes_path_not_quality():
    energies = [anneal(2, AnnealSchedule(levels=20, sweeps_per_level=300,
                                         restarts=1, seed=s)).energy
                for s in (3, 4, 5)]
    assert max(energies) - min(energies) < 1e-9


def test_anneal_rejects_bad_direction():
    with pytest.raises(DomainError):
        anneal(3, FAST, direction="sideways")


def test_result_gradient_is_stationary():
    r = anneal(3, FAST)
    assert r.grad_norm <= 1e-6
    assert np.linalg.norm(potential_gradient(r.state)) == pytest.approx(
        r.grad_norm, abs=1e-12)


def test_certify_ghz_is_perfect():
    rep = certify(ghz(3))
    assert rep.perfect
    assert rep.gap < 1e-6
    assert rep.energy == pytest.approx(0.5, abs=1e-12)
    assert len(rep.purities) == 3


def test_certify_accepts_anneal_result():
    r = anneal(4, AnnealSchedule(levels=25, sweeps_per_level=400, restarts=2, seed=6))
    rep = certify(r)
    assert rep.energy == pytest.approx(r.energy, abs=1e-12)
    # no 4-qubit state reaches the 1/4 floor on every balanced cut
    assert not rep.perfect
    assert rep.gap > 0.05


def test_certify_random_state_not_perfect():
    rep = certify(haar_sample(5, seed=9))
    assert not rep.perfect
    assert rep.spread > 0


def test_result_validation_guards():
    r = anneal(2, FAST)
    with pytest.raises(NumericalError):
        MmesResult(state=r.state, energy=r.energy + 0.1, profile=r.profile,
                   gap=r.gap, direction=r.direction, best_restart=0, best_sweep=0,
                   grad_norm=0.0, polish_iterations=0)
