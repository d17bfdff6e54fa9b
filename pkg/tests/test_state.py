import json

import numpy as np
import pytest

from mmes import (
    PureState,
    ValidationError,
    FormatError,
    DomainError,
    ResourceError,
    apply_local_unitary,
    basis_state,
    deserialize,
    ghz,
    haar_sample,
    load_state,
    perturb,
    save_state,
    serialize,
    stream_rng,
    w_state,
)
from mmes.state import _MAGIC


def test_state_validation():
    with pytest.raises(DomainError):
        PureState(2, np.zeros(4, dtype=complex))
    with pytest.raises(DomainError):
        PureState(2, np.ones(3, dtype=complex) / np.sqrt(3))
    with pytest.raises(DomainError):
        PureState(0, np.array([1.0 + 0j]))


def test_state_is_immutable():
    s = basis_state(2, 0)
    with pytest.raises((ValueError, AttributeError)):
        s.amplitudes[0] = 0.0


def test_normalized_constructor():
    s = PureState.normalized(np.array([3.0, 4.0, 0.0, 0.0], dtype=complex))
    assert s.n == 2
    assert np.isclose(abs(s.amplitudes[0]), 0.6)
    with pytest.raises(DomainError):
        PureState.normalized(np.zeros(4, dtype=complex))


def test_haar_sample_reproducible():
    a = haar_sample(3, seed=7)
    b = haar_sample(3, seed=7)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    c = haar_sample(3, seed=8)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


def test_haar_sample_norm_and_moments():
    # first moment of |amplitude|^2 is 1/dim for Haar states
    rng_states = [haar_sample(4, seed=s) for s in range(200)]
    probs = np.array([np.abs(s.amplitudes) ** 2 for s in rng_states])
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    assert abs(probs.mean() - 1 / 16) < 5e-4


def test_haar_qubit_guard():
    with pytest.raises(DomainError):
        haar_sample(0)
    with pytest.raises(ResourceError):
        haar_sample(25, max_n=10)


def test_stream_rng_distinct_streams():
    a = stream_rng(1, 0).random(4)
    b = stream_rng(1, 1).random(4)
    assert not np.allclose(a, b)
    again = stream_rng(1, 0).random(4)
    assert np.array_equal(a, again)


def test_perturb_stays_normalized():
    rng = stream_rng(3)
    s = haar_sample(3, seed=0)
    for _ in range(10):
        s = perturb(s, 0.3, rng)
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-12


def test_named_states():
    g = ghz(3)
    assert np.isclose(abs(g.amplitudes[0]), 1 / np.sqrt(2))
    assert np.isclose(abs(g.amplitudes[7]), 1 / np.sqrt(2))
    w = w_state(3)
    # one-hot weight on the three single-excitation basis states
    hot = np.flatnonzero(np.abs(w.amplitudes) > 1e-12)
    assert sorted(hot.tolist()) == [1, 2, 4]


def test_apply_local_unitary_preserves_norm_and_checks_unitarity():
    s = haar_sample(3, seed=11)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    t = apply_local_unitary(s, 1, h)
    assert abs(np.linalg.norm(t.amplitudes) - 1.0) < 1e-12
    with pytest.raises(ValidationError):
        apply_local_unitary(s, 0, np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(DomainError):
        apply_local_unitary(s, 5, h)


def test_apply_local_unitary_msb_convention():
    # X on qubit 0 of |00> must land on index 2 (qubit 0 = most significant bit)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    s = apply_local_unitary(basis_state(2, 0), 0, x)
    assert np.isclose(abs(s.amplitudes[2]), 1.0)
    s = apply_local_unitary(basis_state(2, 0), 1, x)
    assert np.isclose(abs(s.amplitudes[1]), 1.0)


def test_binary_round_trip_bit_exact():
    s = haar_sample(5, seed=42)
    blob = serialize(s, "binary")
    assert blob[:4] == _MAGIC
    t = deserialize(blob)
    assert t.n == 5
    assert np.array_equal(s.amplitudes, t.amplitudes)


def test_binary_layout_n2_is_76_bytes():
    blob = serialize(basis_state(2, 1), "binary")
    assert len(blob) == 76


def test_json_round_trip_bit_exact():
    s = haar_sample(4, seed=9)
    text = serialize(s, "json")
    payload = json.loads(text)
    assert payload["n"] == 4
    t = deserialize(text)
    assert np.array_equal(s.amplitudes, t.amplitudes)


def test_file_round_trip(tmp_path):
    s = haar_sample(3, seed=13)
    p = tmp_path / "state.bin"
    save_state(s, p)
    assert np.array_equal(load_state(p).amplitudes, s.amplitudes)
    q = tmp_path / "state.json"
    save_state(s, q)
    assert np.array_equal(load_state(q).amplitudes, s.amplitudes)


def test_deserialize_rejects_garbage():
    with pytest.raises(FormatError):
        deserialize(b"not a state at all")
    with pytest.raises(FormatError):
        deserialize(b'{"n": 2}')


def test_deserialize_norm_policy():
    s = basis_state(2, 0)
    payload = json.loads(serialize(s, "json"))
    # slightly off norm: accepted and rescaled
    payload["amplitudes"][0] = [1.0 + 1e-10, 0.0]
    t = deserialize(json.dumps(payload).encode())
    assert abs(np.linalg.norm(t.amplitudes) - 1.0) < 1e-12
    # badly off norm: refused
    payload["amplitudes"][0] = [1.1, 0.0]
    with pytest.raises(FormatError):
        deserialize(json.dumps(payload).encode())
