"""Gate and circuit representation, FBS lowering, depth accounting, JSON I/O."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import limits
from ._kernels import apply_dense
from .errors import InvalidArgument

KINDS = ("RBS", "FBS", "X", "Z", "CZ", "CX")
_ARITY = {"RBS": 2, "FBS": 2, "X": 1, "Z": 1, "CZ": 2, "CX": 2}


@dataclass(frozen=True)
class Gate:
    """One gate.  ``qubits`` are 1-indexed; CX is (control, target).

    Rotations are stored with i < j; a reversed pair is flipped and its angle
    negated, since RBS_ji(θ) = RBS_ij(−θ).
    """

    kind: str
    qubits: tuple
    theta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown gate kind {self.kind!r}")
        q = tuple(int(v) for v in self.qubits)
        if len(q) != _ARITY[self.kind]:
            raise InvalidArgument(f"{self.kind} takes {_ARITY[self.kind]} qubit(s), got {q}")
        if len(set(q)) != len(q):
            raise InvalidArgument(f"{self.kind} on repeated qubit {q}")
        if min(q) < 1:
            raise InvalidArgument(f"qubit indices are 1-based, got {q}")
        theta = self.theta
        if self.kind in ("RBS", "FBS"):
            if theta is None:
                raise InvalidArgument(f"{self.kind} needs an angle")
            theta = float(theta)
            if q[0] > q[1]:
                q, theta = (q[1], q[0]), -theta
        elif theta is not None:
            raise InvalidArgument(f"{self.kind} takes no angle")
        object.__setattr__(self, "qubits", q)
        object.__setattr__(self, "theta", theta)

    @property
    def weight_preserving(self) -> bool:
        return self.kind not in ("X", "CX")

    def inverse(self) -> "Gate":
        if self.theta is None:
            return self
        return Gate(self.kind, self.qubits, -self.theta)

    def to_dict(self) -> dict:
        d = {"g": self.kind, "q": list(self.qubits)}
        if self.theta is not None:
            d["theta"] = self.theta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(d["g"], tuple(d["q"]), d.get("theta"))


def rbs(i, j, theta) -> Gate:
    return Gate("RBS", (i, j), theta)


def fbs(i, j, theta) -> Gate:
    return Gate("FBS", (i, j), theta)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= 63:
            raise InvalidArgument(f"qubit count must be in [1, 63], got {self.n}")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) > self.n:
                raise InvalidArgument(f"{g.kind}{g.qubits} outside an {self.n}-qubit register")
        object.__setattr__(self, "gates", gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise InvalidArgument(f"cannot join circuits on {self.n} and {other.n} qubits")
        return Circuit(self.n, self.gates + other.gates, self.label)

    def __len__(self):
        return len(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n, tuple(g.inverse() for g in reversed(self.gates)), self.label)

    def lowered(self) -> "Circuit":
        """Every long-range FBS replaced by its RBS/CZ/CX implementation."""
        out = []
        for g in self.gates:
            out.extend(lower_fbs(g) if g.kind == "FBS" else (g,))
        return Circuit(self.n, tuple(out), self.label)

    @property
    def weight_preserving(self) -> bool:
        return all(g.weight_preserving for g in self.gates)

    def to_dict(self) -> dict:
        d = {"n": self.n, "gates": [g.to_dict() for g in self.gates]}
        if self.label:
            d["label"] = self.label
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        try:
            return cls(int(d["n"]), tuple(Gate.from_dict(g) for g in d["gates"]),
                       d.get("label", ""))
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed circuit JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- lowering

def parity_tree(qubits) -> list:
    """Balanced CX fan-in leaving the parity of ``qubits`` on ``qubits[0]``.

    Uses len-1 CX gates in ceil(log2(len)) layers.
    """
    layer = list(qubits)
    gates = []
    while len(layer) > 1:
        nxt = []
        for t in range(0, len(layer) - 1, 2):
            gates.append(Gate("CX", (layer[t + 1], layer[t])))
            nxt.append(layer[t])
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return gates


def lower_fbs(g: Gate) -> tuple:
    """Gate sequence (in application order) implementing an FBS gate."""
    if g.kind != "FBS":
        raise InvalidArgument(f"lower_fbs expects an FBS gate, got {g.kind}")
    i, j = g.qubits
    core = Gate("RBS", (i, j), g.theta)
    if j - i == 1:
        return (core,)
    cz = Gate("CZ", (i + 1, i))
    tree = parity_tree(range(i + 1, j))
    return tuple(tree) + (cz, core, cz) + tuple(reversed(tree))


# ---------------------------------------------------------------- accounting

def depth(c: Circuit, lower: bool = True) -> int:
    """Greedy layer count: a gate goes one layer after the latest gate sharing a qubit.

    Long-range FBS gates are lowered first unless ``lower`` is False.
    """
    if lower:
        c = c.lowered()
    level = [0] * (c.n + 1)
    best = 0
    for g in c.gates:
        t = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = t
        best = max(best, t)
    return best


def gate_count(c: Circuit, kind: Optional[str] = None) -> int:
    if kind is None:
        return len(c.gates)
    if kind not in KINDS:
        raise InvalidArgument(f"unknown gate kind {kind!r}")
    return sum(1 for g in c.gates if g.kind == kind)


def gate_counts(c: Circuit) -> dict:
    counts = Counter(g.kind for g in c.gates)
    return {k: counts[k] for k in KINDS if counts[k]}


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense 2ⁿ×2ⁿ matrix of the circuit; basis index = mask (qubit 1 lowest bit)."""
    limits.require("MAX_UNITARY_QUBITS", c.n, "circuit qubits")
    U = np.eye(1 << c.n)
    for g in c.gates:
        U = apply_dense(U, c.n, g)
    return U
