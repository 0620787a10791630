"""Two-qubit Clifford sampling, brick-wall circuits and T layers.

The two-qubit Clifford group modulo phases (11520 elements) is enumerated
with the usual four-class decomposition::

    single-qubit class   C1 x C1                          24*24      =  576
    CNOT-like class      (S1 x S1) CNOT (C1 x C1)         576*3*3    = 5184
    iSWAP-like class     (S1 x S1) iSWAP (C1 x C1)        576*3*3    = 5184
    SWAP-like class      SWAP (C1 x C1)                   576        =  576

where C1 is the 24-element single-qubit Clifford group and S1 the order-3
subgroup cycling X -> Y -> Z. A gate id is a mixed-radix index into these
choices, so uniform ids give uniform Cliffords without storing a table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Sequence, Union

import numpy as np

from . import statevector as sv
from .statevector import GateMatrix, StateVector

NUM_TWO_QUBIT_CLIFFORDS = 11520

_SINGLE = 576
_ENTANGLED = 5184
_CLASS_STARTS = (0, _SINGLE, _SINGLE + _ENTANGLED, _SINGLE + 2 * _ENTANGLED)


def _phase_key(m: np.ndarray, decimals: int = 8) -> tuple:
    """Hashable key identifying ``m`` up to a global phase."""
    flat = m.reshape(-1)
    k = int(np.argmax(np.abs(flat) > 1e-6))
    canon = flat * (abs(flat[k]) / flat[k])
    canon = np.round(canon, decimals) + 0.0
    return tuple(np.round(canon.real, decimals)) + tuple(np.round(canon.imag, decimals))


@lru_cache(maxsize=1)
def single_qubit_cliffords() -> tuple[np.ndarray, ...]:
    """The 24 single-qubit Cliffords modulo phase, generated from H and S (identity first)."""
    gens = (sv.H.matrix, sv.S.matrix)
    found = {_phase_key(np.eye(2)): np.eye(2, dtype=np.complex128)}
    frontier = [np.eye(2, dtype=np.complex128)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                p = g @ m
                key = _phase_key(p)
                if key not in found:
                    found[key] = p
                    nxt.append(p)
        frontier = nxt
    mats = tuple(found.values())
    assert len(mats) == 24
    return mats


@lru_cache(maxsize=1)
def _s1() -> tuple[np.ndarray, ...]:
    # (SH)^2 maps X -> Y -> Z -> X under conjugation
    c = sv.S.matrix @ sv.H.matrix
    c3 = c @ c
    return (np.eye(2, dtype=np.complex128), c3, c3 @ c3)


def _decode(index: int) -> tuple[str, int, int, int, int]:
    if not 0 <= index < NUM_TWO_QUBIT_CLIFFORDS:
        raise ValueError(f"Clifford id must lie in [0, {NUM_TWO_QUBIT_CLIFFORDS}), got {index}")
    if index < _CLASS_STARTS[1]:
        a, b = divmod(index, 24)
        return "single", a, b, 0, 0
    if index >= _CLASS_STARTS[3]:
        a, b = divmod(index - _CLASS_STARTS[3], 24)
        return "swap", a, b, 0, 0
    kind = "cnot" if index < _CLASS_STARTS[2] else "iswap"
    rest = index - (_CLASS_STARTS[1] if kind == "cnot" else _CLASS_STARTS[2])
    rest, t = divmod(rest, 3)
    rest, s = divmod(rest, 3)
    a, b = divmod(rest, 24)
    return kind, a, b, s, t


@lru_cache(maxsize=None)
def clifford_unitary(index: int) -> GateMatrix:
    """Representative 4x4 unitary for Clifford id ``index`` (memoized)."""
    kind, a, b, s, t = _decode(int(index))
    c1 = single_qubit_cliffords()
    u = np.kron(c1[a], c1[b])
    if kind in ("cnot", "iswap"):
        ent = sv.CNOT.matrix if kind == "cnot" else sv.ISWAP.matrix
        s1 = _s1()
        u = np.kron(s1[s], s1[t]) @ ent @ u
    elif kind == "swap":
        u = sv.SWAP.matrix @ u
    return GateMatrix(u, name=f"C2[{index}]")


def sample_two_qubit_clifford(rng=None) -> tuple[int, GateMatrix]:
    """Uniformly random two-qubit Clifford as ``(id, unitary)``."""
    rng = np.random.default_rng(rng)
    index = int(rng.integers(NUM_TWO_QUBIT_CLIFFORDS))
    return index, clifford_unitary(index)


def is_clifford(u: np.ndarray, tol: float = 1e-10) -> bool:
    """True if conjugation by ``u`` maps every non-identity Pauli to a phase times a Pauli."""
    paulis1 = [sv.I.matrix, sv.X.matrix, sv.Y.matrix, sv.Z.matrix]
    n = int(round(np.log2(u.shape[0])))
    strings = [np.eye(1)]
    for _ in range(n):
        strings = [np.kron(p, q) for p in strings for q in paulis1]
    d = u.shape[0]
    for p in strings[1:]:
        img = u @ p @ u.conj().T
        # img must equal lambda * Q with |lambda| = 1 for some Pauli string Q
        ok = False
        for q in strings:
            lam = np.trace(q.conj().T @ img) / d
            if abs(abs(lam) - 1) < tol and np.max(np.abs(img - lam * q)) < tol:
                ok = True
                break
        if not ok:
            return False
    return True


# Six single-qubit stabilizer states, ids 0..5: |0>, |1>, |+>, |->, |+i>, |-i>
SIX_STATE_NAMES = ("0", "1", "+", "-", "+i", "-i")
SIX_STATES = (
    np.array([1, 0], dtype=np.complex128),
    np.array([0, 1], dtype=np.complex128),
    np.array([1, 1], dtype=np.complex128) / np.sqrt(2),
    np.array([1, -1], dtype=np.complex128) / np.sqrt(2),
    np.array([1, 1j], dtype=np.complex128) / np.sqrt(2),
    np.array([1, -1j], dtype=np.complex128) / np.sqrt(2),
)


@lru_cache(maxsize=None)
def six_state_preparation(state_id: int) -> GateMatrix:
    """Single-qubit Clifford taking |0> to six-state ``state_id``."""
    h, x, s = sv.H.matrix, sv.X.matrix, sv.S.matrix
    mats = (np.eye(2), x, h, h @ x, s @ h, s.conj().T @ h)
    return GateMatrix(mats[state_id], name=f"prep[{SIX_STATE_NAMES[state_id]}]")


def random_stabilizer_product_state(num_qubits: int, rng=None) -> StateVector:
    """Product of uniformly drawn X/Y/Z eigenstates."""
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be >= 1, got {num_qubits}")
    rng = np.random.default_rng(rng)
    ids = rng.integers(6, size=num_qubits)
    return sv.product_state([SIX_STATES[i] for i in ids])


@dataclass
class BrickLayer:
    parity: Literal["even", "odd"]
    gates: list[tuple[int, tuple[int, int]]]
    kind: str = field(default="clifford_brickwall", init=False)


@dataclass
class TLayer:
    targets: list[int]
    kind: str = field(default="t_layer", init=False)


@dataclass
class PrepLayer:
    """One six-state id per qubit; applied as the Clifford mapping |0> to that state."""

    states: list[int]
    kind: str = field(default="single_qubit_prep", init=False)


Layer = Union[BrickLayer, TLayer, PrepLayer]


@dataclass
class CircuitSpec:
    num_qubits: int
    layers: list[Layer] = field(default_factory=list)

    def __post_init__(self):
        for layer in self.layers:
            self._validate(layer)

    def _validate(self, layer: Layer) -> None:
        n = self.num_qubits
        if isinstance(layer, BrickLayer):
            used = [q for _, pair in layer.gates for q in pair]
            if len(used) != len(set(used)):
                raise ValueError("brick-wall pairs within a layer must be disjoint")
            if any(not 1 <= q <= n for q in used):
                raise ValueError(f"brick-wall qubit outside [1, {n}]")
            if any(not 0 <= g < NUM_TWO_QUBIT_CLIFFORDS for g, _ in layer.gates):
                raise ValueError("Clifford id out of range")
        elif isinstance(layer, TLayer):
            if len(layer.targets) != len(set(layer.targets)) or any(not 1 <= q <= n for q in layer.targets):
                raise ValueError(f"T-layer targets must be distinct qubits in [1, {n}]")
        elif isinstance(layer, PrepLayer):
            if len(layer.states) != n or any(not 0 <= s < 6 for s in layer.states):
                raise ValueError("prep layer needs one six-state id in [0, 6) per qubit")
        else:
            raise TypeError(f"unknown layer type {type(layer).__name__}")

    def append(self, layer: Layer) -> "CircuitSpec":
        self._validate(layer)
        self.layers.append(layer)
        return self

    def extend(self, other: "CircuitSpec") -> "CircuitSpec":
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit-count mismatch")
        for layer in other.layers:
            self.append(layer)
        return self

    @property
    def t_count(self) -> int:
        return sum(len(l.targets) for l in self.layers if isinstance(l, TLayer))

    def to_dict(self) -> dict:
        layers = []
        for layer in self.layers:
            if isinstance(layer, BrickLayer):
                layers.append({
                    "kind": layer.kind,
                    "parity": layer.parity,
                    "gates": [{"id": g, "qubits": list(pair)} for g, pair in layer.gates],
                })
            elif isinstance(layer, TLayer):
                layers.append({"kind": layer.kind, "targets": list(layer.targets)})
            else:
                layers.append({"kind": layer.kind, "states": list(layer.states)})
        return {"num_qubits": self.num_qubits, "layers": layers}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitSpec":
        layers: list[Layer] = []
        for item in data["layers"]:
            kind = item["kind"]
            if kind == "clifford_brickwall":
                gates = [(int(g["id"]), (int(g["qubits"][0]), int(g["qubits"][1]))) for g in item["gates"]]
                layers.append(BrickLayer(item["parity"], gates))
            elif kind == "t_layer":
                layers.append(TLayer([int(q) for q in item["targets"]]))
            elif kind == "single_qubit_prep":
                layers.append(PrepLayer([int(s) for s in item["states"]]))
            else:
                raise ValueError(f"unknown layer kind {kind!r}")
        return cls(int(data["num_qubits"]), layers)

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        return cls.from_dict(json.loads(text))


def brickwall_pairs(num_qubits: int, parity: str, boundary: str = "open") -> list[tuple[int, int]]:
    """Neighbour pairs for one layer: even -> (1,2),(3,4)...; odd -> (2,3),(4,5)..."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    first = 1 if parity == "even" else 2
    pairs = [(q, q + 1) for q in range(first, num_qubits, 2)]
    if boundary == "periodic" and num_qubits > 2:
        used = {q for p in pairs for q in p}
        if num_qubits not in used and 1 not in used:
            pairs.append((num_qubits, 1))
    return pairs


def build_brickwall(
    num_qubits: int,
    depth: int,
    boundary: str = "open",
    rng=None,
    first_layer: int = 0,
) -> CircuitSpec:
    """Random brick-wall circuit of ``depth`` layers of uniform two-qubit Cliffords.

    Layer ``k`` (counting from ``first_layer``) is even when ``k`` is even, so
    consecutive calls can continue one alternating pattern.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    rng = np.random.default_rng(rng)
    spec = CircuitSpec(num_qubits)
    for k in range(first_layer, first_layer + depth):
        parity = "even" if k % 2 == 0 else "odd"
        pairs = brickwall_pairs(num_qubits, parity, boundary)
        ids = rng.integers(NUM_TWO_QUBIT_CLIFFORDS, size=len(pairs))
        spec.append(BrickLayer(parity, [(int(g), p) for g, p in zip(ids, pairs)]))
    return spec


def apply_circuit(state: StateVector, spec: CircuitSpec) -> StateVector:
    """Apply ``spec`` layer by layer to ``state`` in place and return it."""
    if spec.num_qubits != state.num_qubits:
        raise ValueError(f"circuit acts on {spec.num_qubits} qubits, state has {state.num_qubits}")
    for layer in spec.layers:
        if isinstance(layer, BrickLayer):
            for g, pair in layer.gates:
                sv.apply_gate(state, clifford_unitary(g), pair)
        elif isinstance(layer, TLayer):
            for q in layer.targets:
                sv.apply_gate(state, sv.T, q)
        else:
            for q, s in enumerate(layer.states, start=1):
                if s:
                    sv.apply_gate(state, six_state_preparation(s), q)
    return state


def t_layer_all(num_qubits: int) -> TLayer:
    return TLayer(list(range(1, num_qubits + 1)))


def apply_t(state: StateVector, targets: Sequence[int]) -> StateVector:
    for q in targets:
        sv.apply_gate(state, sv.T, q)
    return state
