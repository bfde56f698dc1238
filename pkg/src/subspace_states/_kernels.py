"""Gate application kernels shared by the circuit and simulator modules.

Amplitude arrays are indexed by basis mask along axis 0 (dense: all 2ⁿ masks;
sector: the ranked weight-d masks).  Extra trailing axes are carried along, so
the same kernels apply a gate to a batch of states or to a matrix.
"""
from functools import lru_cache

import numpy as np

from .linalg import sector_masks

_ROTATIONS = ("RBS", "FBS")


def _between(i: int, j: int) -> int:
    # bits strictly between 1-indexed positions i < j
    return ((1 << (j - 1)) - 1) & ~((1 << i) - 1)


def _parity(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks.astype(np.uint64)).astype(np.int64) & 1


@lru_cache(maxsize=4096)
def _dense_pair(n: int, i: int, j: int, fermionic: bool):
    masks = np.arange(1 << n, dtype=np.int64)
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    src = masks[(masks & bi != 0) & (masks & bj == 0)]
    dst = src ^ bi ^ bj
    if fermionic:
        sign = 1.0 - 2.0 * _parity(src & _between(i, j))
    else:
        sign = np.ones(len(src))
    return src, dst, sign


@lru_cache(maxsize=4096)
def _sector_pair(n: int, d: int, i: int, j: int, fermionic: bool):
    masks = sector_masks(n, d)
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    sel = (masks & bi != 0) & (masks & bj == 0)
    src_m = masks[sel]
    src = np.nonzero(sel)[0]
    dst = np.searchsorted(masks, src_m ^ bi ^ bj)
    if fermionic:
        sign = 1.0 - 2.0 * _parity(src_m & _between(i, j))
    else:
        sign = np.ones(len(src))
    return src, dst, sign


def _rotate(amps: np.ndarray, src, dst, sign, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    shape = (-1,) + (1,) * (amps.ndim - 1)
    sp = (s * sign).reshape(shape)
    a = amps[src]
    b = amps[dst]
    out = amps.copy()
    out[src] = c * a - sp * b
    out[dst] = sp * a + c * b
    return out


def _phase_masks(masks: np.ndarray, gate) -> np.ndarray:
    """Boolean selector of basis states picking up a −1 from a Z or CZ gate."""
    need = 0
    for q in gate.qubits:
        need |= 1 << (q - 1)
    return (masks & need) == need


def apply_dense(amps: np.ndarray, n: int, gate) -> np.ndarray:
    kind = gate.kind
    if kind in _ROTATIONS:
        i, j = gate.qubits
        src, dst, sign = _dense_pair(n, i, j, kind == "FBS" and j - i > 1)
        return _rotate(amps, src, dst, sign, gate.theta)
    masks = np.arange(1 << n, dtype=np.int64)
    if kind in ("Z", "CZ"):
        out = amps.copy()
        out[_phase_masks(masks, gate)] *= -1
        return out
    if kind == "X":
        return amps[masks ^ (1 << (gate.qubits[0] - 1))]
    if kind == "CX":
        ctrl, tgt = gate.qubits
        flip = np.where(masks & (1 << (ctrl - 1)), 1 << (tgt - 1), 0)
        return amps[masks ^ flip]
    raise ValueError(f"unknown gate kind {kind!r}")


def apply_sector(amps: np.ndarray, n: int, d: int, gate) -> np.ndarray:
    """Apply a weight-preserving gate; the caller has rejected X/CX already."""
    kind = gate.kind
    if kind in _ROTATIONS:
        i, j = gate.qubits
        src, dst, sign = _sector_pair(n, d, i, j, kind == "FBS" and j - i > 1)
        return _rotate(amps, src, dst, sign, gate.theta)
    if kind in ("Z", "CZ"):
        out = amps.copy()
        out[_phase_masks(sector_masks(n, d), gate)] *= -1
        return out
    raise ValueError(f"gate kind {kind!r} does not preserve Hamming weight")
