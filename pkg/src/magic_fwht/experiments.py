"""Desk-scale Clifford+T magic-generation experiments and runtime benchmarks.

Every experiment returns an :class:`ExperimentRecord` holding the raw
per-realization reports; aggregates are always recomputed from them.
Realization ``r`` draws its circuit from ``default_rng(seed + r)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import statevector as sv
from .clifford import apply_circuit, apply_t, build_brickwall, random_stabilizer_product_state
from .measures import DEFAULT_ALPHA, DEFAULT_EPS, MagicReport, brute_force_magic, exact_magic
from .metropolis import MhConfig, mh_magic
from .montecarlo import McConfig, landscape_profile, mc_magic, precondition
from .statevector import StateVector

WORKERS_ENV = "MAGIC_FWHT_WORKERS"
EXPERIMENTS = ("runtime-scaling", "landscape", "clifford-t", "doping-cycles", "doping-blocks")


def haar_m2(num_qubits: int) -> float:
    """Haar average of ``M_2``: ``log2(2^N + 3) - 2``."""
    return math.log2(2**num_qubits + 3) - 2


def t_state() -> np.ndarray:
    return np.array([1, np.exp(1j * np.pi / 4)], dtype=np.complex128) / np.sqrt(2)


def t_product_state(num_qubits: int, num_t: int | None = None) -> StateVector:
    """``|T>^{num_t} (x) |0>^{N - num_t}``, with ``num_t = N // 2`` by default."""
    if num_t is None:
        num_t = num_qubits // 2
    if not 0 <= num_t <= num_qubits:
        raise ValueError(f"num_t must lie in [0, {num_qubits}], got {num_t}")
    zero = np.array([1, 0], dtype=np.complex128)
    return sv.product_state([t_state()] * num_t + [zero] * (num_qubits - num_t))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence) -> list:
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class EstimatorSpec:
    method: str = "exact"
    samples: int | None = None
    precondition_depth: int = 0
    alpha: float = DEFAULT_ALPHA
    eps: float = DEFAULT_EPS
    burn_in: int | None = None

    def __post_init__(self):
        if self.method not in ("exact", "mc", "mh"):
            raise ValueError(f"unknown estimator {self.method!r}")
        if self.method in ("mc", "mh") and not self.samples:
            raise ValueError(f"estimator {self.method!r} needs a sample count")
        if self.method == "mh" and self.alpha != 2.0:
            raise ValueError("the Metropolis-Hastings estimator only supports alpha = 2")


def estimate(state: StateVector, spec: EstimatorSpec, seed: int | None = None) -> MagicReport:
    if spec.method == "exact":
        report = exact_magic(state, spec.alpha, spec.eps)
        report.seed = seed
        return report
    if spec.method == "mc":
        samples = min(int(spec.samples), state.dim)
        cfg = McConfig(samples, spec.alpha, seed, precondition_depth=spec.precondition_depth)
        return mc_magic(state, cfg).report
    return mh_magic(state, MhConfig(int(spec.samples), spec.burn_in, seed=seed)).report


def _point_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


@dataclass
class SweepPoint:
    params: dict
    reports: list[MagicReport] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def m2_values(self) -> np.ndarray:
        return np.array([r.M_alpha for r in self.reports], dtype=np.float64)

    def summary(self) -> dict:
        out = dict(self.params)
        vals = self.m2_values()
        if vals.size:
            n = self.reports[0].num_qubits
            std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
            mean = float(np.mean(vals))
            out.update(
                realizations=int(vals.size),
                mean_M=mean,
                std_M=std,
                sem_M=std / math.sqrt(vals.size),
                mean_density=mean / n,
                sem_density=std / math.sqrt(vals.size) / n,
                haar_M2=haar_m2(n),
                gap_to_haar=haar_m2(n) - mean,
            )
        for key, values in self.extras.items():
            if isinstance(values, list) and values and all(isinstance(v, (int, float)) for v in values):
                out[f"mean_{key}"] = float(np.mean(values))
                out[f"median_{key}"] = float(statistics.median(values))
        return out


@dataclass
class ExperimentRecord:
    experiment: str
    config: dict
    points: list[SweepPoint] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def select(self, **params) -> list[SweepPoint]:
        return [p for p in self.points if all(p.params.get(k) == v for k, v in params.items())]

    def point(self, **params) -> SweepPoint:
        found = self.select(**params)
        if len(found) != 1:
            raise KeyError(f"{len(found)} points match {params}")
        return found[0]

    def summaries(self) -> list[dict]:
        return [p.summary() for p in self.points]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "timings": self.timings,
            "summary": self.summaries(),
            "points": [
                {"params": p.params, "reports": [r.to_dict() for r in p.reports], "extras": p.extras}
                for p in self.points
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentRecord":
        points = [
            SweepPoint(p["params"], [MagicReport.from_dict(r) for r in p["reports"]], p.get("extras", {}))
            for p in data["points"]
        ]
        return cls(data["experiment"], data["config"], points, data.get("timings", {}))

    def csv_rows(self) -> tuple[list[str], list[list]]:
        """One row per realization per sweep point."""
        param_keys: list[str] = []
        for p in self.points:
            for k in p.params:
                if k not in param_keys:
                    param_keys.append(k)
        header = ["experiment", *param_keys, "realization", *MagicReport.csv_header()]
        rows = []
        for p in self.points:
            for i, r in enumerate(p.reports):
                rows.append([self.experiment, *(p.params.get(k, "") for k in param_keys), i, *r.csv_row()])
        return header, rows

    def to_csv(self) -> str:
        header, rows = self.csv_rows()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    def save(self, path, fmt: str | None = None) -> Path:
        path = Path(path)
        fmt = fmt or ("csv" if path.suffix == ".csv" else "json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv() if fmt == "csv" else self.to_json(indent=2))
        return path


def log_gap_fit(xs: Sequence[float], gaps: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares fit ``log(gap) = intercept + slope * x``; returns ``(slope, intercept, r2)``."""
    xs = np.asarray(xs, dtype=np.float64)
    gaps = np.asarray(gaps, dtype=np.float64)
    if np.any(gaps <= 0):
        raise ValueError("gaps must be positive to take logarithms")
    y = np.log(gaps)
    slope, intercept = np.polyfit(xs, y, 1)
    resid = y - (intercept + slope * xs)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


# -- runtime scaling ---------------------------------------------------------


def _median_time(fn: Callable[[], MagicReport], repetitions: int) -> tuple[float, list[float], MagicReport]:
    times = []
    report = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        report = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), times, report


def run_runtime_scaling(
    qubits: Sequence[int],
    repetitions: int = 5,
    seed: int = 0,
    brute_max_qubits: int | None = None,
) -> ExperimentRecord:
    """Median wall-clock time of brute-force and FWHT enumeration per N.

    The brute-force arm is skipped above ``brute_max_qubits`` (defaults to
    the largest requested N).
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    qubits = sorted(int(n) for n in qubits)
    cap = max(qubits) if brute_max_qubits is None else brute_max_qubits
    # compile kernels outside the timed region
    warm = sv.make_haar_random_state(2, 0)
    exact_magic(warm)
    brute_force_magic(warm)

    record = ExperimentRecord(
        "runtime-scaling",
        {"qubits": qubits, "repetitions": repetitions, "seed": seed, "brute_max_qubits": cap},
    )
    for n in qubits:
        state = sv.make_haar_random_state(n, seed + n)
        med, times, rep = _median_time(lambda: exact_magic(state), repetitions)
        rep.seed = seed + n
        record.points.append(SweepPoint({"num_qubits": n, "arm": "exact"}, [rep], {"seconds": times}))
        record.timings[f"exact/{n}"] = med
        if n <= cap:
            med, times, rep = _median_time(lambda: brute_force_magic(state, max_qubits=cap), repetitions)
            rep.seed = seed + n
            record.points.append(SweepPoint({"num_qubits": n, "arm": "brute"}, [rep], {"seconds": times}))
            record.timings[f"brute/{n}"] = med
    return record


def scaling_ratios(record: ExperimentRecord, arm: str) -> dict[int, float]:
    """``t(N+1) / t(N)`` from the per-N medians of one arm."""
    meds = {
        int(key.split("/")[1]): t for key, t in record.timings.items() if key.startswith(f"{arm}/")
    }
    return {n: meds[n + 1] / meds[n] for n in sorted(meds) if n + 1 in meds}


# -- landscapes ----------------------------------------------------------------


def _landscape_task(args) -> float:
    kind, n, depth, seed = args
    rng = np.random.default_rng(seed)
    if kind == "haar":
        state = sv.make_haar_random_state(n, rng)
    else:
        state = precondition(t_product_state(n), depth, rng)
    return landscape_profile(state, 2.0).normalized_std


def run_landscape(
    qubits: Sequence[int],
    depths: Sequence[int] = (0,),
    realizations: int = 10,
    seed: int = 0,
) -> ExperimentRecord:
    """Normalized landscape spread ``Std_x(m_2;x) / E_x(m_2;x)`` over full x sweeps.

    Haar states give one point per N; the T-product state gives one point per
    (N, Clifford preconditioning depth).
    """
    record = ExperimentRecord(
        "landscape",
        {"qubits": list(qubits), "depths": list(depths), "realizations": realizations, "seed": seed},
    )
    t0 = time.perf_counter()
    for n in qubits:
        vals = _map(_landscape_task, [("haar", n, 0, seed + r) for r in range(realizations)])
        record.points.append(SweepPoint({"state": "haar", "num_qubits": n}, extras={"normalized_std": vals}))
        for depth in depths:
            vals = _map(_landscape_task, [("tproduct", n, depth, seed + r) for r in range(realizations)])
            record.points.append(
                SweepPoint({"state": "tproduct", "num_qubits": n, "depth": depth}, extras={"normalized_std": vals})
            )
    record.timings["total"] = time.perf_counter() - t0
    return record


# -- Clifford + T ---------------------------------------------------------------


def _clifford_t_task(args) -> MagicReport:
    n, depth, r_seed, boundary, spec = args
    rng = np.random.default_rng(r_seed)
    state = random_stabilizer_product_state(n, rng)
    apply_circuit(state, build_brickwall(n, depth, boundary, rng))
    apply_t(state, range(1, n + 1))
    return estimate(state, spec, _point_seed(r_seed, depth))


def run_clifford_t(
    qubits: Sequence[int],
    depths: Sequence[int],
    realizations: int = 80,
    estimator: EstimatorSpec | None = None,
    seed: int = 0,
    boundary: str = "open",
) -> ExperimentRecord:
    """``M_2`` of ``T^{(x)N} C |stabilizer product>`` versus brick-wall depth."""
    spec = estimator or EstimatorSpec()
    record = ExperimentRecord(
        "clifford-t",
        {
            "qubits": list(qubits),
            "depths": list(depths),
            "realizations": realizations,
            "estimator": asdict(spec),
            "seed": seed,
            "boundary": boundary,
        },
    )
    for n in qubits:
        for depth in depths:
            t0 = time.perf_counter()
            tasks = [(n, depth, seed + r, boundary, spec) for r in range(realizations)]
            reports = _map(_clifford_t_task, tasks)
            record.points.append(SweepPoint({"num_qubits": n, "depth": depth}, reports))
            record.timings[f"N={n},depth={depth}"] = time.perf_counter() - t0
    return record


# -- T doping ---------------------------------------------------------------------


def staggered_targets(num_qubits: int, block_size: int, injection: int) -> list[int]:
    """Approximately equally spaced T targets, shifted by one qubit per injection layer."""
    if not 1 <= block_size <= num_qubits:
        raise ValueError(f"block size must lie in [1, {num_qubits}], got {block_size}")
    offset = injection % num_qubits
    return sorted(((k * num_qubits) // block_size + offset) % num_qubits + 1 for k in range(block_size))


def _injection_task(args) -> list[MagicReport]:
    """One realization of repeated [layers x Clifford -> T layer] blocks.

    Returns a report after each block listed in ``checkpoints`` (1-based block counts).
    """
    n, layers, block_size, blocks, checkpoints, r_seed, boundary, spec = args
    rng = np.random.default_rng(r_seed)
    state = random_stabilizer_product_state(n, rng)
    reports = []
    layer = 0
    for k in range(blocks):
        apply_circuit(state, build_brickwall(n, layers, boundary, rng, first_layer=layer))
        layer += layers
        apply_t(state, staggered_targets(n, block_size, k))
        if k + 1 in checkpoints:
            reports.append(estimate(state, spec, _point_seed(r_seed, k + 1)))
    return reports


def _run_injection(
    record: ExperimentRecord,
    n: int,
    layers: int,
    block_size: int,
    blocks: int,
    checkpoints: Sequence[int],
    realizations: int,
    spec: EstimatorSpec,
    seed: int,
    boundary: str,
    params: dict,
) -> None:
    t0 = time.perf_counter()
    checkpoints = sorted(set(checkpoints))
    tasks = [(n, layers, block_size, blocks, frozenset(checkpoints), seed + r, boundary, spec) for r in range(realizations)]
    per_real = _map(_injection_task, tasks)
    for i, c in enumerate(checkpoints):
        point_params = dict(params, cycle=c, t_count=c * block_size, clifford_layers=c * layers)
        record.points.append(SweepPoint(point_params, [reps[i] for reps in per_real]))
    record.timings[json.dumps(params, sort_keys=True)] = time.perf_counter() - t0


def run_doping_cycles(
    num_qubits: int,
    depths: Sequence[int] | int,
    cycles: int,
    realizations: int = 80,
    estimator: EstimatorSpec | None = None,
    seed: int = 0,
    boundary: str = "open",
) -> ExperimentRecord:
    """Repeated [N_C Clifford layers -> T on every qubit] from a random stabilizer product state."""
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    depths = [depths] if isinstance(depths, int) else list(depths)
    spec = estimator or EstimatorSpec()
    record = ExperimentRecord(
        "doping-cycles",
        {
            "num_qubits": num_qubits,
            "depths": depths,
            "cycles": cycles,
            "realizations": realizations,
            "estimator": asdict(spec),
            "seed": seed,
            "boundary": boundary,
        },
    )
    for depth in depths:
        _run_injection(
            record, num_qubits, depth, num_qubits, cycles, range(1, cycles + 1),
            realizations, spec, seed, boundary, {"depth": depth},
        )
    return record


def run_doping_blocks(
    num_qubits: int,
    block_sizes: Sequence[int],
    total_t: int,
    realizations: int = 80,
    estimator: EstimatorSpec | None = None,
    seed: int = 0,
    boundary: str = "open",
    checkpoints: Sequence[int] | None = None,
) -> ExperimentRecord:
    """Bursty versus uniform T injection at one T gate per Clifford layer.

    Each cycle is ``N_B`` brick-wall layers followed by ``N_B`` parallel T
    gates. ``checkpoints`` lists cumulative T counts at which to evaluate
    ``M_2`` (default: after every cycle); each must be a multiple of every
    block size.
    """
    spec = estimator or EstimatorSpec()
    block_sizes = [int(b) for b in block_sizes]
    for nb in block_sizes:
        if not 1 <= nb <= num_qubits:
            raise ValueError(f"block size must lie in [1, {num_qubits}], got {nb}")
        if total_t % nb:
            raise ValueError(f"total T count {total_t} is not a multiple of block size {nb}")
    if checkpoints is not None:
        for t in checkpoints:
            if t > total_t or any(t % nb for nb in block_sizes):
                raise ValueError(f"checkpoint {t} must be <= {total_t} and a multiple of every block size")
    record = ExperimentRecord(
        "doping-blocks",
        {
            "num_qubits": num_qubits,
            "block_sizes": block_sizes,
            "total_t": total_t,
            "realizations": realizations,
            "estimator": asdict(spec),
            "seed": seed,
            "boundary": boundary,
            "checkpoints": None if checkpoints is None else list(checkpoints),
        },
    )
    for nb in block_sizes:
        blocks = total_t // nb
        cps = range(1, blocks + 1) if checkpoints is None else [t // nb for t in checkpoints]
        _run_injection(
            record, num_qubits, nb, nb, blocks, cps, realizations, spec, seed, boundary, {"block_size": nb},
        )
    return record


@dataclass
class ExperimentConfig:
    experiment: str
    qubits: list[int] = field(default_factory=lambda: [10])
    depths: list[int] = field(default_factory=lambda: [0])
    block_sizes: list[int] = field(default_factory=lambda: [1])
    cycles: int = 1
    total_t: int | None = None
    realizations: int = 80
    repetitions: int = 5
    estimator: EstimatorSpec = field(default_factory=EstimatorSpec)
    seed: int = 0
    boundary: str = "open"
    out: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")


def run_experiment(cfg: ExperimentConfig) -> ExperimentRecord:
    if cfg.experiment == "runtime-scaling":
        record = run_runtime_scaling(cfg.qubits, cfg.repetitions, cfg.seed)
    elif cfg.experiment == "landscape":
        record = run_landscape(cfg.qubits, cfg.depths, cfg.realizations, cfg.seed)
    elif cfg.experiment == "clifford-t":
        record = run_clifford_t(cfg.qubits, cfg.depths, cfg.realizations, cfg.estimator, cfg.seed, cfg.boundary)
    elif cfg.experiment == "doping-cycles":
        record = run_doping_cycles(
            cfg.qubits[0], cfg.depths, cfg.cycles, cfg.realizations, cfg.estimator, cfg.seed, cfg.boundary
        )
    else:
        total = cfg.total_t if cfg.total_t is not None else math.lcm(*cfg.block_sizes) * cfg.cycles
        record = run_doping_blocks(
            cfg.qubits[0], cfg.block_sizes, total, cfg.realizations, cfg.estimator, cfg.seed, cfg.boundary
        )
    if cfg.out:
        record.save(cfg.out)
    return record
