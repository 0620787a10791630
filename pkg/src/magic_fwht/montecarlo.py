"""Monte-Carlo estimation of stabilizer Renyi entropies over sampled X-masks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clifford import apply_circuit, build_brickwall
from .measures import (
    DEFAULT_ALPHA,
    DEFAULT_EPS,
    MagicReport,
    NumericalError,
    check_alpha,
    magic_from_moment,
    partial_moments,
)
from .statevector import StateVector


@dataclass
class McConfig:
    sample_count: int
    alpha: float = DEFAULT_ALPHA
    seed: int | None = None
    include_zero_family: bool = True
    precondition_depth: int = 0
    boundary: str = "open"
    jackknife: bool = False


@dataclass
class McResult:
    report: MagicReport
    s_hat: float
    landscape_mean: float
    landscape_std: float
    predicted_sigma_M: float
    jackknife_sigma_M: float | None = None
    sampled_x: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64), repr=False)

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out.update(
            s_hat=self.s_hat,
            landscape_mean=self.landscape_mean,
            landscape_std=self.landscape_std,
            predicted_sigma_M=self.predicted_sigma_M,
            jackknife_sigma_M=self.jackknife_sigma_M,
        )
        return out


def predicted_sigma(landscape_std: float, landscape_mean: float, sample_count: int, alpha: float) -> float:
    """Error of ``M_alpha`` propagated from the x-landscape spread (valid for ``sample_count << 2^N``)."""
    return landscape_std / (abs(1.0 - alpha) * math.log(2.0) * math.sqrt(sample_count) * landscape_mean)


def precondition(state: StateVector, depth: int, rng=None, boundary: str = "open") -> StateVector:
    """Copy of ``state`` after a random depth-``depth`` brick-wall Clifford circuit."""
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    out = state.copy()
    if depth == 0:
        return out
    return apply_circuit(out, build_brickwall(state.num_qubits, depth, boundary, rng))


def _estimate(m0: float | None, stochastic: np.ndarray, d: int, total_draws: int) -> float:
    if m0 is None:
        return d / total_draws * math.fsum(stochastic)
    if stochastic.size == 0:
        return m0
    return m0 + (d - 1) / stochastic.size * math.fsum(stochastic)


def mc_magic(state: StateVector, config: McConfig) -> McResult:
    """Estimate ``M_alpha`` from ``config.sample_count`` distinct X-masks.

    With ``include_zero_family`` the all-``I/Z`` family (which holds the
    identity string) is always evaluated exactly and the other draws are
    reweighted over the ``d - 1`` remaining masks, which keeps the estimator
    unbiased while removing its largest outlier. Drawing every mask
    reproduces :func:`exact_magic`.
    """
    alpha = check_alpha(config.alpha)
    d = state.dim
    ns = int(config.sample_count)
    if not 1 <= ns <= d:
        raise ValueError(f"sample_count must lie in [1, 2^N = {d}], got {ns}")
    if config.include_zero_family and ns == 1:
        raise ValueError("sample_count must be >= 2 when the zero family is included")

    rng = np.random.default_rng(config.seed)
    work = precondition(state, config.precondition_depth, rng, config.boundary) if config.precondition_depth else state

    # all masks drawn up front from one stream
    if config.include_zero_family:
        others = rng.choice(d - 1, size=ns - 1, replace=False).astype(np.int64) + 1
        xs = np.concatenate(([0], others)).astype(np.int64)
    else:
        xs = rng.choice(d, size=ns, replace=False).astype(np.int64)
    m, _ = partial_moments(work, xs, alpha, DEFAULT_EPS)

    if ns == d:
        s_hat = math.fsum(m)
        m0, stochastic = (m[0], m[1:]) if config.include_zero_family else (None, m)
    elif config.include_zero_family:
        m0, stochastic = float(m[0]), m[1:]
        s_hat = _estimate(m0, stochastic, d, ns)
    else:
        m0, stochastic = None, m
        s_hat = _estimate(None, m, d, ns)
    if not s_hat > 0:
        raise NumericalError("every sampled family vanished; include the zero family or sample more")

    mean = s_hat / d
    std = float(np.std(stochastic, ddof=1)) if stochastic.size > 1 else 0.0
    sigma = predicted_sigma(std, mean, ns, alpha)

    jack = None
    if config.jackknife and stochastic.size > 2:
        k = stochastic.size
        rest_total = math.fsum(stochastic)
        loo = (rest_total - stochastic) * ((d - 1) if m0 is not None else d) / (k - 1)
        if m0 is not None:
            loo = loo + m0
        if np.all(loo > 0):
            vals = np.array([magic_from_moment(v, alpha, state.num_qubits) for v in loo])
            jack = float(math.sqrt((k - 1) / k * np.sum((vals - vals.mean()) ** 2)))

    report = MagicReport(
        num_qubits=state.num_qubits,
        renyi_order=alpha,
        m_alpha_total=s_hat,
        M_alpha=magic_from_moment(s_hat, alpha, state.num_qubits),
        nullity=None,
        stabilizer_count=None,
        method="mc",
        sample_count=ns,
        std_error=sigma,
        seed=config.seed,
    )
    return McResult(report, s_hat, mean, std, sigma, jack, xs)


@dataclass
class Landscape:
    """Sample statistics of ``m_{alpha;x}`` over uniformly drawn masks ``x``."""

    mean: float
    std: float
    values: np.ndarray = field(repr=False)
    xs: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    bin_edges: np.ndarray = field(repr=False)

    @property
    def normalized_std(self) -> float:
        return self.std / self.mean if self.mean > 0 else math.nan


def landscape_profile(
    state: StateVector,
    alpha: float = DEFAULT_ALPHA,
    sample_count: int | None = None,
    seed=None,
    bins: int = 50,
    include_zero_family: bool = False,
) -> Landscape:
    """Mean, spread and histogram of ``m_{alpha;x} / E_x[m_{alpha;x}]``.

    By default the x = 0 family is left out: it holds the identity string,
    so its moment is at least ``2^{-N alpha}`` times larger than a typical
    family and would dominate the spread. This matches the stochastic part
    of :func:`mc_magic`. ``sample_count=None`` sweeps every mask in the
    pool, giving population statistics. When every moment vanishes the
    normalized quantities are undefined: ``normalized_std`` is NaN and the
    histogram is empty.
    """
    d = state.dim
    lo = 0 if include_zero_family else 1
    pool = d - lo
    ns = pool if sample_count is None else int(sample_count)
    if not 1 <= ns <= pool:
        raise ValueError(f"sample_count must lie in [1, {pool}], got {ns}")
    if ns == pool:
        xs = np.arange(lo, d, dtype=np.int64)
    else:
        xs = np.random.default_rng(seed).choice(pool, size=ns, replace=False).astype(np.int64) + lo
    m, _ = partial_moments(state, xs, alpha, DEFAULT_EPS)
    mean = math.fsum(m) / ns
    std = float(np.std(m, ddof=0 if ns == pool else 1)) if ns > 1 else 0.0
    if mean > 0:
        density, edges = np.histogram(m / mean, bins=bins, density=True)
    else:
        density, edges = np.empty(0), np.empty(0)
    return Landscape(mean, std, m, xs, density, edges)
