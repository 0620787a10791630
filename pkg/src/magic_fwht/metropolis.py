"""Metropolis-Hastings sampling of Pauli strings, the direct-sampling baseline.

The chain targets ``Pi(P) = |c_P|^2 / 2^N`` over labels ``(x, z)``. Under Pi
the mean of ``|c_P|^2`` equals ``sum_P |c_P|^4 / 4^N``, so
``M_2 = -log2(E_Pi[|c_P|^2])``.

The identity string always has ``Pi(I) = 2^-N`` and ``|c_I|^2 = 1``: a rare
but heavy term. A finite chain that misses it overestimates ``M_2`` while
reporting a small error bar. By default the chain therefore runs on the
non-identity strings only and the identity is added back exactly,
``E_Pi[|c|^2] = 2^-N + (1 - 2^-N) E_{Pi | P != I}[|c|^2]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .measures import MagicReport, NumericalError
from .pauli import PauliLabel, correlator_kernel, family_correlators, parity_for
from .statevector import StateVector

# local Pauli code -> (x bit, z bit): I, X, Y, Z
_LOCAL_X = np.array([0, 1, 1, 0], dtype=np.int64)
_LOCAL_Z = np.array([0, 0, 1, 1], dtype=np.int64)

ZERO_WEIGHT = 1e-300


@dataclass
class MhConfig:
    total_samples: int
    burn_in: int | None = None
    proposal: str = "local"
    seed: int | None = None
    initial: PauliLabel | None = None
    batches: int = 50
    keep_trace: bool = False
    identity_exact: bool = True

    def resolved_burn_in(self) -> int:
        burn = self.total_samples // 10 if self.burn_in is None else int(self.burn_in)
        if self.total_samples < 1:
            raise ValueError(f"total_samples must be >= 1, got {self.total_samples}")
        if not 0 <= burn < self.total_samples:
            raise ValueError(f"burn_in must lie in [0, total_samples), got {burn}")
        return burn


@dataclass
class MhResult:
    report: MagicReport
    acceptance_ratio: float
    chain_length: int
    autocorr_time: float
    restarted: bool = False
    trace: np.ndarray | None = None  # post-burn-in (x, z) labels when requested

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out.update(
            acceptance_ratio=self.acceptance_ratio,
            chain_length=self.chain_length,
            autocorr_time=self.autocorr_time,
            restarted=self.restarted,
        )
        return out


@njit(cache=True, nogil=True)
def _chain(psi, parity, n, x, z, sites, shifts, uniforms, local_x, local_z, weights, trace, skip_identity):
    c = correlator_kernel(psi, x, z, parity)
    w = c.real * c.real + c.imag * c.imag
    accepted = 0
    for step in range(sites.shape[0]):
        s = n - sites[step]
        cur = ((x >> s) & 1) * 1 + ((z >> s) & 1) * 2
        # map (x bit, z bit) back to I/X/Y/Z codes, then move to a different one
        code = 0 if cur == 0 else (1 if cur == 1 else (2 if cur == 3 else 3))
        new = (code + shifts[step]) % 4
        bit = np.int64(1) << s
        nx = (x & ~bit) | (local_x[new] << s)
        nz = (z & ~bit) | (local_z[new] << s)
        if skip_identity and nx == 0 and nz == 0:
            wn = 0.0
        else:
            cn = correlator_kernel(psi, nx, nz, parity)
            wn = cn.real * cn.real + cn.imag * cn.imag
        if wn > 0.0 and (wn >= w or uniforms[step] * w < wn):
            x = nx
            z = nz
            w = wn
            accepted += 1
        # -1 marks a step still parked on the launch identity
        weights[step] = -1.0 if skip_identity and x == 0 and z == 0 else w
        if trace.shape[0] > 0:
            trace[step, 0] = x
            trace[step, 1] = z
    return accepted


def batch_means_error(values: np.ndarray, batches: int) -> float:
    """Standard error of the mean of a correlated series by non-overlapping batch means."""
    k = max(2, min(batches, values.size // 2))
    size = values.size // k
    if size < 1:
        return float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.inf
    means = values[: k * size].reshape(k, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(k))


def launch_label(state: StateVector, rng, tries: int = 64) -> tuple[int, int]:
    """Non-identity label drawn from ``Pi`` restricted to one X-family.

    A random family is transformed in full (one FWHT) and ``z`` is drawn with
    probability ``|c_(x,z)|^2``. Starting here avoids launching from the
    identity, whose local neighbours can all vanish (e.g. on scrambled
    states with a large stabilizer group), leaving the chain stuck.
    """
    d = state.dim
    buf = np.empty(d, dtype=np.complex128)
    order = list(rng.integers(0, d, size=min(tries, d))) + list(range(d))
    for x in order:
        w = np.abs(family_correlators(state, int(x), out=buf).values) ** 2
        if x == 0:
            w[0] = 0.0
        total = w.sum()
        if total > ZERO_WEIGHT:
            return int(x), int(rng.choice(d, p=w / total))
    raise NumericalError("state has no non-identity Pauli weight")


def mh_magic(state: StateVector, config: MhConfig) -> MhResult:
    """Estimate ``M_2`` from a Metropolis-Hastings chain over Pauli strings.

    Each step picks a uniform site and replaces its local Pauli by one of
    the other three, uniformly; the move is symmetric so the acceptance is
    ``min(1, |c_new|^2 / |c_old|^2)``. Every weight costs one direct
    ``O(2^N)`` correlator. With ``identity_exact`` (the default) moves
    onto the identity are rejected and its exact share is added back; the
    chain may still launch from the identity, and those steps are dropped.
    """
    if config.proposal != "local":
        raise ValueError(f"unsupported proposal {config.proposal!r}; only 'local' is implemented")
    burn = config.resolved_burn_in()
    n = state.num_qubits
    total = int(config.total_samples)
    rng = np.random.default_rng(config.seed)

    skip = bool(config.identity_exact)
    parity = parity_for(n)
    restarted = False
    if config.initial is not None:
        if config.initial.num_qubits != n:
            raise ValueError("initial label has the wrong qubit count")
        x, z = config.initial.x, config.initial.z
        if abs(correlator_kernel(state.amplitudes, x, z, parity)) ** 2 < ZERO_WEIGHT:
            restarted = True
            x, z = launch_label(state, rng) if skip else (0, 0)
    else:
        x, z = launch_label(state, rng) if skip else (0, 0)

    sites = rng.integers(1, n + 1, size=total).astype(np.int64)
    shifts = rng.integers(1, 4, size=total).astype(np.int64)
    uniforms = rng.random(total)
    weights = np.empty(total, dtype=np.float64)
    trace = np.empty((total if config.keep_trace else 0, 2), dtype=np.int64)
    accepted = _chain(
        state.amplitudes, parity, n, x, z, sites, shifts, uniforms, _LOCAL_X, _LOCAL_Z, weights, trace, skip
    )

    kept = weights[burn:]
    if config.keep_trace:
        trace = trace[burn:][kept >= 0]
    kept = kept[kept >= 0]
    if kept.size == 0:
        raise NumericalError("chain never left the identity after burn-in; draw more samples")
    mean_c = float(kept.mean())
    se_c = batch_means_error(kept, config.batches)
    var_c = float(kept.var())
    tau = kept.size * se_c**2 / var_c if var_c > 0 else 1.0
    if skip:
        p_id = 2.0**-n
        mean_w = p_id + (1.0 - p_id) * mean_c
        se_w = (1.0 - p_id) * se_c
    else:
        mean_w, se_w = mean_c, se_c
    m2 = -math.log2(mean_w)
    report = MagicReport(
        num_qubits=n,
        renyi_order=2.0,
        m_alpha_total=mean_w / (1 << n),
        M_alpha=m2,
        nullity=None,
        stabilizer_count=None,
        method="mh",
        sample_count=int(kept.size),
        # a chain that never moved carries no error information
        std_error=se_w / (mean_w * math.log(2.0)) if accepted else math.inf,
        seed=config.seed,
    )
    return MhResult(report, accepted / total, total, tau, restarted, trace if config.keep_trace else None)
