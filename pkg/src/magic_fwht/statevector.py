"""Dense pure-state vectors and gate application.

Qubits are numbered ``1..N`` and qubit 1 is the most significant bit of the
basis index, so ``|b_1 b_2 ... b_N>`` lives at index ``sum_j b_j 2^(N-j)``.
The same convention is used by the Pauli masks and the Walsh-Hadamard
kernels.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

NORM_TOL = 1e-10
UNITARY_TOL = 1e-12

_DUMP_MAGIC = b"MFW1"


@dataclass
class StateVector:
    """Normalized state of ``num_qubits`` qubits stored as ``2**num_qubits`` amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be >= 1, got {self.num_qubits}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.num_qubits:
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.size}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        self.amplitudes = amps

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise ValueError(f"amplitude count must be a power of two >= 2, got {amps.size}")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self, other: "StateVector") -> "StateVector":
        """``self`` on qubits 1..N followed by ``other`` on the remaining qubits."""
        return StateVector(self.num_qubits + other.num_qubits, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class GateMatrix:
    """Unitary acting on one or two qubits.

    For two-qubit gates the first target is the more significant bit of the
    4x4 row/column index.
    """

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"gate matrix must be 2x2 or 4x4, got shape {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"gate {self.name or '<unnamed>'} is not unitary (max deviation {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape[0] == 2 else 2

    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.matrix.conj().T, name=f"{self.name}^dag" if self.name else "")

    def is_diagonal(self) -> bool:
        return not np.any(self.matrix - np.diag(np.diag(self.matrix)))


_S2 = 1 / np.sqrt(2)

I = GateMatrix(np.eye(2), "I")
X = GateMatrix([[0, 1], [1, 0]], "X")
Y = GateMatrix([[0, -1j], [1j, 0]], "Y")
Z = GateMatrix([[1, 0], [0, -1]], "Z")
H = GateMatrix([[_S2, _S2], [_S2, -_S2]], "H")
S = GateMatrix([[1, 0], [0, 1j]], "S")
T = GateMatrix([[1, 0], [0, np.exp(1j * np.pi / 4)]], "T")
CNOT = GateMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], "CNOT")
CZ = GateMatrix(np.diag([1, 1, 1, -1]), "CZ")
SWAP = GateMatrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], "SWAP")
ISWAP = GateMatrix([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], "ISWAP")


def make_basis_state(num_qubits: int, bitstring) -> StateVector:
    """Computational basis state ``|bitstring>``.

    ``bitstring`` is either a string of ``'0'``/``'1'`` (qubit 1 first), a
    sequence of bits, or an integer basis index.
    """
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be >= 1, got {num_qubits}")
    if isinstance(bitstring, (int, np.integer)):
        index = int(bitstring)
        if not 0 <= index < 1 << num_qubits:
            raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    else:
        bits = [int(c) for c in bitstring]
        if len(bits) != num_qubits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"bitstring {bitstring!r} is not {num_qubits} bits")
        index = 0
        for b in bits:
            index = (index << 1) | b
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def make_haar_random_state(num_qubits: int, seed=None) -> StateVector:
    """Haar-random pure state from normalized i.i.d. complex Gaussians."""
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be >= 1, got {num_qubits}")
    rng = np.random.default_rng(seed)
    d = 1 << num_qubits
    amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    amps /= np.linalg.norm(amps)
    return StateVector(num_qubits, amps)


def product_state(single_qubit_states: Sequence[np.ndarray]) -> StateVector:
    """Tensor product of 2-amplitude vectors, first entry on qubit 1."""
    amps = np.ones(1, dtype=np.complex128)
    for v in single_qubit_states:
        amps = np.kron(amps, np.asarray(v, dtype=np.complex128))
    return StateVector(len(single_qubit_states), amps)


def _check_targets(num_qubits: int, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    for t in targets:
        if not 1 <= t <= num_qubits:
            raise ValueError(f"target qubit {t} outside [1, {num_qubits}]")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    return targets


def apply_gate(state: StateVector, gate: GateMatrix, targets: Sequence[int] | int) -> StateVector:
    """Apply ``gate`` to ``targets`` (1-based) in place and return ``state``.

    Works on a strided view of the amplitude array, so the cost is
    ``O(2^N)`` per gate.
    """
    if isinstance(targets, (int, np.integer)):
        targets = (targets,)
    targets = _check_targets(state.num_qubits, targets)
    if len(targets) != gate.arity:
        raise ValueError(f"{gate.arity}-qubit gate given {len(targets)} targets")

    n = state.num_qubits
    amps = state.amplitudes
    g = gate.matrix
    if gate.arity == 1:
        q = targets[0]
        view = amps.reshape(1 << (q - 1), 2, 1 << (n - q))
        if gate.is_diagonal():
            if g[0, 0] != 1:
                view[:, 0, :] *= g[0, 0]
            if g[1, 1] != 1:
                view[:, 1, :] *= g[1, 1]
        else:
            a0 = view[:, 0, :].copy()
            a1 = view[:, 1, :]
            view[:, 0, :] = g[0, 0] * a0 + g[0, 1] * a1
            view[:, 1, :] = g[1, 0] * a0 + g[1, 1] * a1
        return state

    axes = [t - 1 for t in targets]
    psi = amps.reshape((2,) * n)
    out = np.tensordot(g.reshape(2, 2, 2, 2), psi, axes=([2, 3], axes))
    out = np.moveaxis(out, [0, 1], axes)
    amps[:] = out.reshape(-1)
    return state


def dump_state(state: StateVector, path) -> None:
    """Write ``MFW1`` header, N as little-endian uint32, then interleaved (re, im) float64."""
    data = np.empty(2 * state.dim, dtype="<f8")
    data[0::2] = state.amplitudes.real
    data[1::2] = state.amplitudes.imag
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<I", state.num_qubits))
        fh.write(data.tobytes())


def load_state(path) -> StateVector:
    raw = Path(path).read_bytes()
    if raw[:4] != _DUMP_MAGIC:
        raise ValueError(f"{path}: bad magic bytes {raw[:4]!r}")
    (n,) = struct.unpack("<I", raw[4:8])
    if n < 1 or n > 40:
        raise ValueError(f"{path}: implausible qubit count {n}")
    expected = 8 + 16 * (1 << n)
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for N={n}, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=8)
    return StateVector(n, data[0::2] + 1j * data[1::2])
