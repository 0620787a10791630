"""Stabilizer Renyi entropies and stabilizer nullity by full Pauli-family sweeps."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from numba import njit

from .pauli import correlator_kernel, family_correlators, family_kernel, parity_for
from .statevector import StateVector

DEFAULT_ALPHA = 2.0
DEFAULT_EPS = 1e-7
BRUTE_FORCE_MAX_QUBITS = 10


class NumericalError(RuntimeError):
    """Raised when a result is impossible for a normalized state (e.g. no stabilizing Pauli)."""


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0 or alpha == 1.0 or not math.isfinite(alpha):
        raise ValueError(f"Renyi order must be positive and != 1, got {alpha}")
    return alpha


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0 < eps < 0.5:
        raise ValueError(f"nullity tolerance must be in (0, 0.5), got {eps}")
    return eps


@dataclass
class MagicReport:
    num_qubits: int
    renyi_order: float
    m_alpha_total: float
    M_alpha: float
    nullity: float | None
    stabilizer_count: int | None
    method: str
    sample_count: int = 0
    std_error: float = 0.0
    seed: int | None = None
    tolerance_eps: float = DEFAULT_EPS

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "MagicReport":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    @staticmethod
    def csv_header() -> list[str]:
        return [f.name for f in fields(MagicReport)]

    def csv_row(self) -> list:
        return ["" if v is None else v for v in asdict(self).values()]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.csv_header())
        writer.writerow(self.csv_row())
        return buf.getvalue()


@dataclass
class PartialMoment:
    x: int
    m_alpha_x: float
    nullity_hits: int


@njit(cache=True, nogil=True)
def _moment_of(values, alpha, eps):
    s = 0.0
    hits = 0
    for z in range(values.shape[0]):
        a2 = values[z].real * values[z].real + values[z].imag * values[z].imag
        if alpha == 2.0:
            s += a2 * a2
        else:
            s += a2**alpha
        if abs(math.sqrt(a2) - 1.0) < eps:
            hits += 1
    return s, hits


@njit(cache=True, nogil=True)
def sweep_kernel(psi, xs, alpha, eps, m_out, hits_out):
    """Partial moments and nullity hits for every mask in ``xs``."""
    d = psi.shape[0]
    scale = float(d) ** alpha
    buf = np.empty(d, dtype=np.complex128)
    for i in range(xs.shape[0]):
        family_kernel(psi, xs[i], buf)
        s, hits = _moment_of(buf, alpha, eps)
        m_out[i] = s / scale
        hits_out[i] = hits


@njit(cache=True, nogil=True)
def _brute_kernel(psi, parity, alpha, eps, m_out, hits_out):
    d = psi.shape[0]
    scale = float(d) ** alpha
    for x in range(d):
        s = 0.0
        hits = 0
        for z in range(d):
            c = correlator_kernel(psi, x, z, parity)
            a2 = c.real * c.real + c.imag * c.imag
            if alpha == 2.0:
                s += a2 * a2
            else:
                s += a2**alpha
            if abs(math.sqrt(a2) - 1.0) < eps:
                hits += 1
        m_out[x] = s / scale
        hits_out[x] = hits


def partial_moments(state: StateVector, xs=None, alpha: float = DEFAULT_ALPHA, eps: float = DEFAULT_EPS):
    """Vectorized partial moments ``m_{alpha;x}`` and hit counts for masks ``xs`` (all by default)."""
    alpha = check_alpha(alpha)
    eps = check_eps(eps)
    if xs is None:
        xs = np.arange(state.dim, dtype=np.int64)
    else:
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        if xs.size and (xs.min() < 0 or xs.max() >= state.dim):
            raise ValueError(f"x masks must lie in [0, {state.dim})")
    m = np.empty(xs.size, dtype=np.float64)
    hits = np.empty(xs.size, dtype=np.int64)
    sweep_kernel(state.amplitudes, xs, alpha, eps, m, hits)
    return m, hits


def partial_moment(state: StateVector, x: int, alpha: float = DEFAULT_ALPHA, eps: float = DEFAULT_EPS) -> PartialMoment:
    alpha = check_alpha(alpha)
    eps = check_eps(eps)
    fam = family_correlators(state, x)
    s, hits = _moment_of(fam.values, alpha, eps)
    return PartialMoment(fam.x, s / float(state.dim) ** alpha, int(hits))


def magic_from_moment(m_alpha_total: float, alpha: float, num_qubits: int) -> float:
    return math.log2(m_alpha_total) / (1.0 - alpha) - num_qubits


def _report(state, m, hits, alpha, eps, method) -> MagicReport:
    total = math.fsum(m)
    count = int(hits.sum())
    if count == 0:
        raise NumericalError("no Pauli string within tolerance of |c_P| = 1; the identity always is")
    return MagicReport(
        num_qubits=state.num_qubits,
        renyi_order=alpha,
        m_alpha_total=total,
        M_alpha=magic_from_moment(total, alpha, state.num_qubits),
        nullity=state.num_qubits - math.log2(count),
        stabilizer_count=count,
        method=method,
        tolerance_eps=eps,
    )


def exact_magic(state: StateVector, alpha: float = DEFAULT_ALPHA, eps: float = DEFAULT_EPS) -> MagicReport:
    """Exact ``M_alpha`` and nullity from one FWHT per X-mask, ``O(N 4^N)`` total.

    Masks are swept in ascending order and the per-mask moments are combined
    with ``math.fsum``, so results are bit-reproducible.
    """
    m, hits = partial_moments(state, None, alpha, eps)
    return _report(state, m, hits, alpha, eps, "exact")


def brute_force_magic(
    state: StateVector,
    alpha: float = DEFAULT_ALPHA,
    eps: float = DEFAULT_EPS,
    max_qubits: int = BRUTE_FORCE_MAX_QUBITS,
) -> MagicReport:
    """Same contract as :func:`exact_magic` but evaluates all ``4^N`` correlators directly (``O(8^N)``)."""
    alpha = check_alpha(alpha)
    eps = check_eps(eps)
    if state.num_qubits > max_qubits:
        raise ValueError(
            f"brute-force enumeration refused for N={state.num_qubits} > cap {max_qubits}; "
            "raise max_qubits explicitly if you really want O(8^N) work"
        )
    m = np.empty(state.dim, dtype=np.float64)
    hits = np.empty(state.dim, dtype=np.int64)
    _brute_kernel(state.amplitudes, parity_for(state.num_qubits), alpha, eps, m, hits)
    return _report(state, m, hits, alpha, eps, "brute")
