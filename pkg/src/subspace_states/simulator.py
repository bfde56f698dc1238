"""Exact simulation of RBS/FBS/X/Z/CZ/CX circuits.

Two state representations: a dense statevector over all 2ⁿ masks and a
sector state over the ranked weight-d masks only.  Gate application returns a
new state.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import limits, rng
from ._kernels import apply_dense, apply_sector
from .circuit import Circuit, Gate, fbs
from .errors import InvalidArgument, InvalidOperation
from .linalg import (check_frame, format_subset, givens_matrix, mask_positions,
                     rank_subset, sector_masks, subset_determinants)

NORM_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        limits.require("MAX_DENSE_QUBITS", self.n, "dense qubits")
        amps = _frozen(self.amplitudes)
        if amps.shape != (1 << self.n,):
            raise InvalidArgument(f"expected {1 << self.n} amplitudes, got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, mask: int) -> "StateVector":
        a = np.zeros(1 << n)
        a[mask] = 1.0
        return cls(n, a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2

    def outcome_masks(self) -> np.ndarray:
        return np.arange(1 << self.n, dtype=np.int64)

    def weight_mass(self) -> np.ndarray:
        """Probability mass in each Hamming-weight sector 0..n."""
        w = np.bitwise_count(np.arange(1 << self.n, dtype=np.uint64)).astype(int)
        return np.bincount(w, weights=self.probabilities(), minlength=self.n + 1)


@dataclass(frozen=True, eq=False)
class SectorState:
    n: int
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        dim = len(sector_masks(self.n, self.d))
        amps = _frozen(self.amplitudes)
        if amps.shape != (dim,):
            raise InvalidArgument(f"expected C({self.n},{self.d}) = {dim} amplitudes, got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, mask: int) -> "SectorState":
        d = int(mask).bit_count()
        a = np.zeros(comb(n, d))
        a[rank_subset(mask, n, d)] = 1.0
        return cls(n, d, a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2

    def outcome_masks(self) -> np.ndarray:
        return sector_masks(self.n, self.d)

    def amplitude(self, mask: int) -> float:
        return float(self.amplitudes[rank_subset(mask, self.n, self.d)])


# ---------------------------------------------------------------- gates

def apply_gate_sector(st: SectorState, g: Gate) -> SectorState:
    if not g.weight_preserving:
        raise InvalidOperation(f"{g.kind} changes Hamming weight; use the dense simulator")
    if max(g.qubits) > st.n:
        raise InvalidArgument(f"{g.kind}{g.qubits} outside an {st.n}-qubit register")
    return SectorState(st.n, st.d, apply_sector(st.amplitudes, st.n, st.d, g))


def apply_gate_dense(sv: StateVector, g: Gate) -> StateVector:
    if max(g.qubits) > sv.n:
        raise InvalidArgument(f"{g.kind}{g.qubits} outside an {sv.n}-qubit register")
    return StateVector(sv.n, apply_dense(sv.amplitudes, sv.n, g))


def run(state, c: Circuit):
    """Apply every gate of ``c`` in order to a sector or dense state."""
    if c.n != state.n:
        raise InvalidArgument(f"circuit has {c.n} qubits, state has {state.n}")
    if isinstance(state, SectorState):
        if not c.weight_preserving:
            bad = next(g for g in c.gates if not g.weight_preserving)
            raise InvalidOperation(f"{bad.kind} changes Hamming weight; use the dense simulator")
        amps = state.amplitudes
        for g in c.gates:
            amps = apply_sector(amps, c.n, state.d, g)
        return SectorState(state.n, state.d, amps)
    amps = state.amplitudes
    for g in c.gates:
        amps = apply_dense(amps, c.n, g)
    return StateVector(state.n, amps)


def embed(st: SectorState) -> StateVector:
    a = np.zeros(1 << st.n)
    a[sector_masks(st.n, st.d)] = st.amplitudes
    return StateVector(st.n, a)


def restrict(sv: StateVector, d: int, tol: float = 1e-10) -> SectorState:
    """Weight-d part of a dense state; fails if anything leaks outside H_d."""
    masks = sector_masks(sv.n, d)
    inside = sv.amplitudes[masks]
    leak = max(0.0, sv.norm() ** 2 - float(inside @ inside))
    if leak > tol:
        raise InvalidOperation(f"state has mass {leak:.3e} outside the weight-{d} sector")
    return SectorState(sv.n, d, inside)


# ---------------------------------------------------------------- preparation

def prepare_subspace_state_reference(X) -> SectorState:
    """Amplitude det(X_S) on every weight-d subset S."""
    X = check_frame(X)
    n, d = X.shape
    return SectorState(n, d, subset_determinants(X))


# ---------------------------------------------------------------- measurement

def measure_samples(st, shots: int, seed: int, threads: int = 1) -> np.ndarray:
    """I.i.d. basis-state masks drawn from |amplitude|²."""
    if shots < 1:
        raise InvalidArgument(f"shots must be >= 1, got {shots}")
    if abs(st.norm() - 1.0) > NORM_TOL:
        raise InvalidArgument(f"state norm {st.norm():.12g} is not 1")
    cdf = np.cumsum(st.probabilities())
    idx = rng.sample_from_cdf(cdf, shots, seed, rng.MEASURE, threads)
    return np.asarray(st.outcome_masks())[idx]


def count_masks(masks) -> dict:
    """Counts keyed by ``"i,j,..."`` in ascending mask order."""
    vals, cnt = np.unique(np.asarray(masks, dtype=np.int64), return_counts=True)
    return {format_subset(int(m)): int(c) for m, c in zip(vals, cnt)}


def samples_report(n: int, d: int, shots: int, seed: int, masks) -> dict:
    return {"n": n, "d": d, "shots": shots, "seed": seed, "counts": count_masks(masks)}


# ---------------------------------------------------------------- checks

def check_plucker(st: SectorState) -> float:
    """Largest residual of the quadratic Plücker relations.

    For every (d−1)-subset I and (d+1)-subset J:
    Σ_l (−1)^l p(I ∪ j_l) p(J \\ j_l) = 0, where p(I ∪ j_l) carries the sign
    of sorting j_l into I.
    """
    n, d = st.n, st.d
    if d < 2:
        raise InvalidArgument("Plücker relations need d >= 2")
    if d == n:
        return 0.0
    p = st.amplitudes
    masks = sector_masks(n, d)
    big = np.asarray(sector_masks(n, d + 1))
    big_pos = mask_positions(big, n, d + 1)
    worst = 0.0
    for imask in sector_masks(n, d - 1):
        imask = int(imask)
        total = np.zeros(len(big))
        for ell in range(d + 1):
            jl = big_pos[:, ell]
            bit = np.int64(1) << jl
            right = p[np.searchsorted(masks, big ^ bit)]
            ok = (imask & bit) == 0
            left_mask = np.where(ok, imask | bit, masks[0])
            left = np.where(ok, p[np.searchsorted(masks, left_mask)], 0.0)
            above = np.bitwise_count((imask & ~((bit << 1) - 1)).astype(np.uint64)).astype(int)
            sign = (-1.0) ** ell * (1 - 2 * (above & 1))
            total += sign * left * right
        worst = max(worst, float(np.max(np.abs(total))))
    return worst


def apply_givens_theorem_check(X, i: int, j: int, theta: float) -> float:
    """‖FBS_ij(θ)|Col(X)⟩ − |Col(G(i,j,θ)X)⟩‖ with both sides computed independently."""
    X = check_frame(X)
    n, _ = X.shape
    lhs = apply_gate_sector(prepare_subspace_state_reference(X), fbs(i, j, theta))
    rhs = prepare_subspace_state_reference(givens_matrix(n, i, j, theta) @ X)
    return float(np.linalg.norm(lhs.amplitudes - rhs.amplitudes))
