"""Pure states of n qubits: construction, Haar sampling, perturbation, file formats.

A state is a unit vector of 2**n complex amplitudes.  Qubit 0 corresponds to
the most significant bit of the basis index, so for n=2 the basis order is
|00>, |01>, |10>, |11>.
"""
from __future__ import annotations

import json
import math
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FormatError, ResourceError, ValidationError

NORM_TOL = 1e-12          # internal unit-norm tolerance
FILE_NORM_TOL = 1e-9      # looser on ingestion: file values may be rounded decimals
DEFAULT_MAX_QUBITS = 20

_MAGIC = b"MMES"
_BINARY_VERSION = 1


def max_qubits() -> int:
    """Qubit-count cap for fresh allocations; MMES_MAX_N overrides the default."""
    raw = os.environ.get("MMES_MAX_N")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ResourceError(f"MMES_MAX_N must be an integer, got {raw!r}") from exc
    if value < 2:
        raise ResourceError(f"MMES_MAX_N must be at least 2, got {value}")
    return value


def stream_rng(seed: int | None, *stream: int) -> np.random.Generator:
    """Independent generator for a (seed, stream-index...) pair.

    Splitting off a spawn key gives streams that are independent of each other
    and of how many of them run concurrently, so a fixed seed reproduces the
    same numbers no matter the degree of parallelism.
    """
    if seed is None:
        seed = int.from_bytes(os.urandom(8), "little")
    entropy = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=tuple(stream)))


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable n-qubit pure state.

    amplitudes must already be normalized to unit 2-norm within NORM_TOL; the
    operations in this module take care of that.  PureState.normalized rescales
    arbitrary nonzero vectors.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise DomainError(f"qubit count must be an integer, got {n!r}")
        n = int(n)
        if n < 2:
            raise DomainError(f"need at least 2 qubits, got n={n}")
        arr = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if arr.ndim != 1:
            raise DomainError(f"amplitudes must be one-dimensional, got shape {arr.shape}")
        if arr.size != 1 << n:
            raise DomainError(f"expected {1 << n} amplitudes for n={n}, got {arr.size}")
        norm_sq = float(np.sum(arr.real**2 + arr.imag**2))
        if not math.isfinite(norm_sq):
            raise DomainError("amplitudes contain non-finite values")
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized: sum of squared moduli is {norm_sq!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        """Build a state from any nonzero vector of length 2**n, rescaling it."""
        arr = np.asarray(amplitudes, dtype=np.complex128)
        if arr.ndim != 1:
            raise DomainError(f"amplitudes must be one-dimensional, got shape {arr.shape}")
        n = _infer_n(arr.size)
        norm = float(np.linalg.norm(arr))
        if not math.isfinite(norm) or norm == 0.0:
            raise DomainError("cannot normalize a zero or non-finite vector")
        return cls(n, arr / norm)

    def __repr__(self) -> str:
        return f"PureState(n={self.n}, dim={self.dim})"


def _infer_n(size: int) -> int:
    n = int(size).bit_length() - 1
    if size < 4 or (1 << n) != size:
        raise DomainError(f"amplitude count must be a power of two >= 4, got {size}")
    return n


def _check_n(n: int, max_n: int | None = None) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"qubit count must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise DomainError(f"need at least 2 qubits, got n={n}")
    cap = max_qubits() if max_n is None else int(max_n)
    if n > cap:
        raise ResourceError(f"n={n} exceeds the cap of {cap} qubits (set MMES_MAX_N to raise it)")
    return n


def _haar_amplitudes(n: int, rng: np.random.Generator) -> np.ndarray:
    # 2**(n+1) standard normals viewed as real/imaginary pairs, then projected
    # onto the unit sphere; the resulting direction is uniform.
    z = rng.standard_normal(1 << (n + 1)).view(np.complex128)
    z /= np.linalg.norm(z)
    return z


def haar_sample(n: int, seed: int | np.random.Generator | None = None, *,
                max_n: int | None = None) -> PureState:
    """Draw a state uniformly (Haar measure) on the 2**n-dimensional sphere."""
    n = _check_n(n, max_n)
    rng = seed if isinstance(seed, np.random.Generator) else stream_rng(seed)
    return PureState(n, _haar_amplitudes(n, rng))


def perturb(state: PureState, step: float,
            rng: int | np.random.Generator | None = None) -> PureState:
    """Add an isotropic Gaussian kick of scale ``step`` and renormalize.

    The proposal density is symmetric between old and new state, which is what
    makes the plain Metropolis rule correct without a Hastings factor.
    """
    step = float(step)
    if not math.isfinite(step) or step <= 0.0:
        raise DomainError(f"step must be positive and finite, got {step}")
    gen = rng if isinstance(rng, np.random.Generator) else stream_rng(rng)
    kick = gen.standard_normal(1 << (state.n + 1)).view(np.complex128)
    z = state.amplitudes + step * kick
    z /= np.linalg.norm(z)
    return PureState(state.n, z)


def apply_local_unitary(state: PureState, qubit: int, u: np.ndarray) -> PureState:
    """Apply a 2x2 unitary to one qubit; all bipartition purities are invariant."""
    if not isinstance(qubit, (int, np.integer)) or isinstance(qubit, bool):
        raise DomainError(f"qubit must be an integer, got {qubit!r}")
    qubit = int(qubit)
    if not 0 <= qubit < state.n:
        raise DomainError(f"qubit {qubit} out of range for n={state.n}")
    mat = np.asarray(u, dtype=np.complex128)
    if mat.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 matrix, got shape {mat.shape}")
    defect = np.max(np.abs(mat.conj().T @ mat - np.eye(2)))
    if defect > 1e-10:
        raise ValidationError(f"matrix is not unitary (defect {defect:.3e})")
    tensor = state.amplitudes.reshape([2] * state.n)
    out = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [qubit])), 0, qubit)
    return PureState(state.n, np.ascontiguousarray(out.reshape(state.dim)))


def basis_state(n: int, index: int) -> PureState:
    """Computational basis vector |index> on n qubits."""
    n = _check_n(n)
    index = int(index)
    if not 0 <= index < (1 << n):
        raise DomainError(f"basis index {index} out of range for n={n}")
    z = np.zeros(1 << n, dtype=np.complex128)
    z[index] = 1.0
    return PureState(n, z)


def ghz(n: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2); for n=2 this is the Bell state."""
    n = _check_n(n)
    z = np.zeros(1 << n, dtype=np.complex128)
    z[0] = z[-1] = 1.0 / math.sqrt(2.0)
    return PureState(n, z)


def w_state(n: int) -> PureState:
    """Equal superposition of the n single-excitation basis states."""
    n = _check_n(n)
    z = np.zeros(1 << n, dtype=np.complex128)
    amp = 1.0 / math.sqrt(n)
    for q in range(n):
        z[1 << (n - 1 - q)] = amp
    return PureState(n, z)


def serialize(state: PureState, fmt: str = "binary") -> bytes:
    """Encode a state as bytes.

    binary: magic "MMES", version and n as little-endian u32, then 2**(n+1)
    little-endian doubles, real and imaginary parts interleaved.
    json: {"n": int, "amplitudes": [[re, im], ...]} with full-precision floats.
    """
    if fmt == "binary":
        header = _MAGIC + struct.pack("<II", _BINARY_VERSION, state.n)
        return header + state.amplitudes.astype("<c16").tobytes()
    if fmt == "json":
        pairs = [[float(a.real), float(a.imag)] for a in state.amplitudes]
        return json.dumps({"n": state.n, "amplitudes": pairs}).encode("ascii")
    raise DomainError(f"unknown serialization format {fmt!r}")


def deserialize(data: bytes) -> PureState:
    """Decode bytes produced by serialize (either format, detected from content)."""
    if not isinstance(data, (bytes, bytearray)):
        raise FormatError(f"expected bytes, got {type(data).__name__}")
    data = bytes(data)
    if data[:4] == _MAGIC:
        return _from_binary(data)
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unrecognized state encoding: {exc}") from exc
    return _from_json(doc)


def _from_binary(data: bytes) -> PureState:
    if len(data) < 12:
        raise FormatError(f"binary state truncated: {len(data)} bytes")
    version, n = struct.unpack("<II", data[4:12])
    if version != _BINARY_VERSION:
        raise FormatError(f"unsupported binary version {version}")
    if n < 2:
        raise FormatError(f"binary state declares invalid qubit count {n}")
    expected = 12 + (1 << n) * 16
    if len(data) != expected:
        raise FormatError(f"binary state for n={n} must be {expected} bytes, got {len(data)}")
    z = np.frombuffer(data, dtype="<c16", offset=12).astype(np.complex128)
    return _ingest(int(n), z)


def _from_json(doc) -> PureState:
    if not isinstance(doc, dict) or "n" not in doc or "amplitudes" not in doc:
        raise FormatError('JSON state needs keys "n" and "amplitudes"')
    n = doc["n"]
    if not isinstance(n, int) or n < 2:
        raise FormatError(f"JSON state declares invalid qubit count {n!r}")
    pairs = doc["amplitudes"]
    if not isinstance(pairs, list) or len(pairs) != 1 << n:
        raise FormatError(f"JSON state for n={n} needs {1 << n} amplitude pairs")
    try:
        arr = np.asarray(pairs, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"amplitude entries are not numeric: {exc}") from exc
    if arr.shape != (1 << n, 2):
        raise FormatError(f"each amplitude must be a [re, im] pair, got shape {arr.shape}")
    return _ingest(n, arr[:, 0] + 1j * arr[:, 1])


def _ingest(n: int, z: np.ndarray) -> PureState:
    norm_sq = float(np.sum(z.real**2 + z.imag**2))
    if not math.isfinite(norm_sq):
        raise FormatError("state file contains non-finite amplitudes")
    if abs(norm_sq - 1.0) > FILE_NORM_TOL:
        raise FormatError(f"state file is not normalized: sum of squared moduli is {norm_sq!r}")
    # Keep bits untouched when already inside the internal tolerance so a
    # serialize/deserialize round trip is exact; only rounded files get rescaled.
    if abs(norm_sq - 1.0) > NORM_TOL:
        z = z / math.sqrt(norm_sq)
    return PureState(n, z)


def save_state(state: PureState, path: str, fmt: str | None = None) -> None:
    """Write a state file; format inferred from the .json suffix when not given."""
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "binary"
    with open(path, "wb") as fh:
        fh.write(serialize(state, fmt))


def load_state(path: str) -> PureState:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
