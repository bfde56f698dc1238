"""Determinant (projection-DPP) sampling: exact, classical sequential, and
simulated Clifford-loader circuits."""
from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import stats

from . import limits, rng
from .circuit import Circuit, depth, gate_counts
from .clifford import loader, pad_vector
from .errors import DegenerateInput, InvalidArgument
from .linalg import check_frame, format_subset, orthogonalize, sector_masks, subset_determinants
from .simulator import SectorState, StateVector, count_masks, measure_samples, run

LEAK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DetDistribution:
    n: int
    d: int
    probs: np.ndarray   # indexed by subset rank

    @property
    def masks(self) -> np.ndarray:
        return sector_masks(self.n, self.d)

    def as_dict(self, min_prob: float = 0.0) -> dict:
        return {format_subset(int(m)): float(p)
                for m, p in zip(self.masks, self.probs) if p > min_prob}


def exact_distribution(A) -> DetDistribution:
    """p(S) = det(A_S)² / det(AᵀA), computed through an orthonormal basis of Col(A)."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    n, d = A.shape
    limits.require("MAX_SECTOR_DIM", comb(n, d), f"C({n},{d})")
    X = orthogonalize(A)
    p = subset_determinants(X) ** 2
    p /= p.sum()
    p.setflags(write=False)
    return DetDistribution(n, d, p)


def exact_sample(dist: DetDistribution, shots: int, seed: int, threads: int = 1) -> np.ndarray:
    idx = rng.sample_from_cdf(np.cumsum(dist.probs), shots, seed, rng.EXACT, threads)
    return np.asarray(dist.masks)[idx]


# ---------------------------------------------------------------- classical

def _dpp_chunk(X: np.ndarray, u: np.ndarray) -> np.ndarray:
    n, d = X.shape
    shots = len(u)
    row_norm = np.einsum("ij,ij->i", X, X)
    residual = np.broadcast_to(row_norm, (shots, n)).copy()
    Q = np.zeros((shots, d, d))        # orthonormal directions picked so far
    masks = np.zeros(shots, dtype=np.int64)
    ar = np.arange(shots)
    for t in range(d):
        r = np.clip(residual, 0.0, None)
        cdf = np.cumsum(r, axis=1)
        target = u[:, t] * cdf[:, -1]
        pick = (cdf <= target[:, None]).sum(axis=1)
        pick = np.minimum(pick, n - 1)
        # guard against landing on a zero-weight row through rounding
        bad = r[ar, pick] <= 0
        if bad.any():
            pick[bad] = np.argmax(r[bad], axis=1)
        masks |= np.int64(1) << pick
        v = X[pick]                                    # (shots, d)
        if t:
            v = v - np.einsum("sk,skj->sj", np.einsum("skj,sj->sk", Q[:, :t], v), Q[:, :t])
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        Q[:, t] = v
        residual -= (X @ v.T).T ** 2
    return masks


def classical_dpp_sample(X, shots: int, seed: int, threads: int = 1) -> np.ndarray:
    """Sequential projection-DPP sampler.

    Step t picks row i with probability proportional to the squared norm of
    row i projected away from the rows already chosen, then adds that
    direction to the basis.  Each shot uses d uniforms from its own counter
    block, so results do not depend on chunking or threads.
    """
    X = check_frame(X)
    n, d = X.shape
    if shots < 1:
        raise InvalidArgument(f"shots must be >= 1, got {shots}")

    def work(start, count):
        return _dpp_chunk(X, rng.uniforms(seed, rng.DPP, start, count, d))

    return np.concatenate(rng.map_chunks(work, shots, threads))


# ---------------------------------------------------------------- quantum

def det_circuit(X, loader_mode: str = "log") -> Circuit:
    """C(a^d) ⋯ C(a^1) as one circuit (a^1 applied first).

    The log-depth loader needs a power-of-2 register, so columns are
    zero-padded and the extra qubits stay in |0⟩.
    """
    X = check_frame(X)
    n, d = X.shape
    cols = [X[:, k] for k in range(d)]
    if loader_mode == "log":
        cols = [pad_vector(c) for c in cols]
    m = len(cols[0])
    limits.require("MAX_LOADER_QUBITS", m, "loader qubits")
    c = Circuit(m, (), f"det-{loader_mode}")
    for col in cols:
        c = c + loader(col, loader_mode)
    return Circuit(m, c.gates, f"det-{loader_mode}")


def quantum_det_state(X, loader_mode: str = "log") -> dict:
    """Simulate the loader product on |0ⁿ⟩.

    Returns the weight-d sector state, the global sign that best aligns it with
    det(X_S), the residual after alignment and the mass outside H_d.
    """
    X = check_frame(X)
    n, d = X.shape
    circ = det_circuit(X, loader_mode)
    out = run(StateVector.basis(circ.n, 0), circ)
    amps = out.amplitudes
    if circ.n > n:
        spill = float(np.linalg.norm(amps[1 << n:]))
        if spill > LEAK_TOL:
            raise InvalidArgument(f"padding qubits picked up amplitude {spill:.2e}")
        amps = amps[: 1 << n]
    sv = StateVector(n, amps)
    inside = sv.amplitudes[sector_masks(n, d)]
    weights = np.bitwise_count(np.arange(1 << n, dtype=np.uint64))
    leak = float(np.linalg.norm(sv.amplitudes[weights != d]))
    ref = subset_determinants(X)
    k = int(np.argmax(np.abs(inside)))
    sign = 1.0 if inside[k] * ref[k] >= 0 else -1.0
    return {
        "state": SectorState(n, d, inside),
        "sign": int(sign),
        "residual": float(np.max(np.abs(sign * inside - ref))),
        "leakage": leak,
        "circuit": circ,
    }


def quantum_det_sample(X, shots: int, seed: int, loader_mode: str = "log",
                       threads: int = 1) -> np.ndarray:
    res = quantum_det_state(X, loader_mode)
    if res["leakage"] > LEAK_TOL:
        raise InvalidArgument(f"loader output leaks {res['leakage']:.2e} outside the weight sector")
    return measure_samples(res["state"], shots, seed, threads)


# ---------------------------------------------------------------- statistics

def empirical(masks, n: int, d: int) -> np.ndarray:
    """Counts per ranked subset."""
    sm = sector_masks(n, d)
    idx = np.searchsorted(sm, np.asarray(masks, dtype=np.int64))
    return np.bincount(idx, minlength=len(sm))


def tv_distance(counts: np.ndarray, probs: np.ndarray) -> float:
    freq = counts / counts.sum()
    return 0.5 * float(np.abs(freq - probs).sum())


def _pool(expected: np.ndarray, min_expected: float) -> np.ndarray:
    """Group label per cell: cells below ``min_expected`` share one pooled group.

    If the pooled group is still too small it joins the smallest regular cell.
    """
    groups = np.arange(len(expected))
    small = expected < min_expected
    if not small.any():
        return groups
    pooled = len(expected)
    groups[small] = pooled
    if expected[small].sum() < min_expected and (~small).any():
        big = np.nonzero(~small)[0]
        groups[groups == pooled] = big[np.argmin(expected[big])]
    return np.unique(groups, return_inverse=True)[1]


def chi_square(counts: np.ndarray, probs: np.ndarray, min_expected: float = 5.0) -> dict:
    """Pearson goodness-of-fit against ``probs``.

    Cells with expected count below ``min_expected`` are pooled before the test
    (the chi-square approximation breaks down for near-empty cells).  A sample
    in a zero-probability cell is an outright rejection (p = 0).  ``dof`` is
    C(n,d) − 1; ``dof_used`` is what the pooled test actually had.
    """
    counts = np.asarray(counts)
    probs = np.asarray(probs)
    dof = len(probs) - 1
    pos = probs > 0
    total = counts.sum()
    if counts[~pos].sum() > 0:
        return {"statistic": float("inf"), "p_value": 0.0, "dof": dof, "dof_used": 0}
    exp = probs[pos] / probs[pos].sum() * total
    groups = _pool(exp, min_expected)
    obs_g = np.bincount(groups, weights=counts[pos])
    exp_g = np.bincount(groups, weights=exp)
    if len(exp_g) <= 1:
        return {"statistic": 0.0, "p_value": 1.0, "dof": dof, "dof_used": 0}
    res = stats.chisquare(obs_g, exp_g)
    return {"statistic": float(res.statistic), "p_value": float(res.pvalue),
            "dof": dof, "dof_used": len(exp_g) - 1}


def sampler_report(A, shots: int, seed: int, loader_mode: str = "log",
                   threads: int = 1, methods=("exact", "classical", "quantum")) -> tuple:
    """Run the requested samplers and compare each with the exact distribution.

    Returns ``(report, timing)``; wall-clock numbers are kept apart so the
    report itself is reproducible byte for byte.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    n, d = A.shape
    if not 1 <= d <= n:
        raise DegenerateInput(f"need n >= d >= 1, got {A.shape}")
    dist = exact_distribution(A)
    X = orthogonalize(A)
    report = {"n": n, "d": d, "shots": shots, "seed": seed, "samplers": {}}
    timing = {}
    for method in methods:
        t0 = time.perf_counter()
        if method == "exact":
            masks = exact_sample(dist, shots, seed, threads)
        elif method == "classical":
            masks = classical_dpp_sample(X, shots, seed, threads)
        elif method == "quantum":
            qs = quantum_det_state(X, loader_mode)
            masks = measure_samples(qs["state"], shots, seed, threads)
        else:
            raise InvalidArgument(f"unknown sampler {method!r} (exact|classical|quantum)")
        elapsed = time.perf_counter() - t0
        counts = empirical(masks, n, d)
        entry = {"counts": count_masks(masks),
                 "tv_distance": tv_distance(counts, dist.probs),
                 "chi_square": chi_square(counts, dist.probs)}
        if method == "quantum":
            circ = qs["circuit"]
            entry["circuit"] = {"loader": loader_mode, "qubits": circ.n,
                                "depth": depth(circ), "gates": gate_counts(circ)}
            entry["amplitude_residual"] = qs["residual"]
            entry["global_sign"] = qs["sign"]
            entry["leakage"] = qs["leakage"]
        report["samplers"][method] = entry
        timing[method] = {"seconds": elapsed, "seconds_per_sample": elapsed / shots}
    return report, timing
