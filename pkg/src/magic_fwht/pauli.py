"""Binary (x, z) Pauli labels and their correlators on dense states.

A label ``(x, z)`` stands for the Pauli string built from ``X^x`` and
``Z^z``; bit ``N - j`` of each mask belongs to qubit ``j`` (qubit 1 is the
most significant bit). The phase is fixed so that

    corr(x, z) = sum_b conj(psi(b)) (-1)^(z.b) psi(b ^ x) = <psi| Z^z X^x |psi>,

which differs from ``<psi| X^x Z^z |psi>`` only by the sign ``(-1)^(x.z)``.
Every quantity built on top of it uses ``|corr|`` alone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .fwht import fwht_kernel, parity_table
from .statevector import StateVector

_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {c: xz for xz, c in _CHAR.items()}

MAX_MASK_QUBITS = 63


@dataclass(frozen=True)
class PauliLabel:
    x: int
    z: int
    num_qubits: int

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_MASK_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_MASK_QUBITS}], got {self.num_qubits}")
        limit = 1 << self.num_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks ({self.x}, {self.z}) do not fit in {self.num_qubits} bits")

    @classmethod
    def from_string(cls, text: str) -> "PauliLabel":
        x = z = 0
        for c in text.upper():
            if c not in _BITS:
                raise ValueError(f"invalid Pauli character {c!r} in {text!r}")
            xb, zb = _BITS[c]
            x = (x << 1) | xb
            z = (z << 1) | zb
        return cls(x, z, len(text))

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def local(self, qubit: int) -> str:
        shift = self.num_qubits - qubit
        return _CHAR[((self.x >> shift) & 1, (self.z >> shift) & 1)]

    def __str__(self) -> str:
        return "".join(self.local(j) for j in range(1, self.num_qubits + 1))


def _check_mask(state: StateVector, mask: int, what: str) -> int:
    mask = int(mask)
    if not 0 <= mask < state.dim:
        raise ValueError(f"{what} mask {mask} does not fit in {state.num_qubits} bits")
    return mask


@njit(cache=True, nogil=True)
def fill_family(psi, x, out):
    # out[b] = conj(psi[b]) * psi[b ^ x]
    for b in range(psi.shape[0]):
        out[b] = psi[b].conjugate() * psi[b ^ x]


@njit(cache=True, nogil=True)
def family_kernel(psi, x, out):
    fill_family(psi, x, out)
    fwht_kernel(out)


@njit(cache=True, nogil=True)
def correlator_kernel(psi, x, z, parity):
    acc = 0j
    for b in range(psi.shape[0]):
        term = psi[b].conjugate() * psi[b ^ x]
        if parity[z & b]:
            acc -= term
        else:
            acc += term
    return acc


@dataclass
class FamilyCorrelators:
    """All ``2^N`` correlators sharing the X-mask ``x``; ``values[z] = corr(x, z)``."""

    x: int
    values: np.ndarray

    @property
    def num_qubits(self) -> int:
        return self.values.size.bit_length() - 1

    def label(self, z: int) -> PauliLabel:
        return PauliLabel(self.x, int(z), self.num_qubits)


def family_correlators(state: StateVector, x: int, out: np.ndarray | None = None) -> FamilyCorrelators:
    """Correlators of the whole family ``{(x, z)}_z`` via one FWHT.

    ``out`` may be passed as a reusable complex128 scratch buffer of length
    ``2^N``; it is overwritten and becomes ``values``.
    """
    x = _check_mask(state, x, "x")
    if out is None:
        out = np.empty(state.dim, dtype=np.complex128)
    elif out.shape != (state.dim,) or out.dtype != np.complex128:
        raise ValueError("scratch buffer must be complex128 of length 2^N")
    family_kernel(state.amplitudes, x, out)
    return FamilyCorrelators(x, out)


_parity_cache: dict[int, np.ndarray] = {}


def parity_for(num_qubits: int) -> np.ndarray:
    table = _parity_cache.get(num_qubits)
    if table is None:
        table = _parity_cache[num_qubits] = parity_table(num_qubits)
    return table


def single_correlator(state: StateVector, label: PauliLabel | tuple[int, int]) -> complex:
    """Direct ``O(2^N)`` evaluation of one correlator (the brute-force oracle)."""
    if isinstance(label, PauliLabel):
        if label.num_qubits != state.num_qubits:
            raise ValueError(f"label has {label.num_qubits} qubits, state has {state.num_qubits}")
        x, z = label.x, label.z
    else:
        x, z = label
    x = _check_mask(state, x, "x")
    z = _check_mask(state, z, "z")
    return complex(correlator_kernel(state.amplitudes, x, z, parity_for(state.num_qubits)))


def pauli_matrix(label: PauliLabel) -> np.ndarray:
    """Dense ``Z^z X^x`` matrix for ``label``; small-N test helper."""
    d = 1 << label.num_qubits
    b = np.arange(d)
    par = parity_for(label.num_qubits)
    m = np.zeros((d, d), dtype=np.complex128)
    # (Z^z X^x)|b> = (-1)^(z.(b^x)) |b^x>
    m[b ^ label.x, b] = 1.0 - 2.0 * par[label.z & (b ^ label.x)]
    return m
