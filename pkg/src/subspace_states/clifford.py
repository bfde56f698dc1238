"""Clifford loaders: circuits implementing Γ(x) = Σ x_i Z^{⊗(i−1)} ⊗ X ⊗ I.

Γ(x) acts on basis masks as Γ(x)|S⟩ = Σ_i (−1)^{|S ∩ [1, i)|} x_i |S ⊕ i⟩.
Both loaders have the shape U⁻¹ · X₁ · U, where U (the "unloader") maps the
unary state of x back to |e_1⟩.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from . import limits
from .circuit import Circuit, Gate, circuit_unitary, depth, gate_counts
from .errors import InvalidArgument, ResourceLimit
from .linalg import check_frame, sector_masks, spherical_angles, subset_determinants
from .simulator import StateVector, run

UNIT_TOL = 1e-10
PATH_SUM_MAX_N = 8
PATH_SUM_MAX_K = 6


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if len(x) < 1:
        raise InvalidArgument("empty vector")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise InvalidArgument(f"vector is not unit norm (|x| = {nrm:.12g})")
    return x


def pad_vector(x) -> np.ndarray:
    """Zero-pad ``x`` to the next power-of-2 length."""
    x = np.asarray(x, dtype=float).ravel()
    m = 1 << (len(x) - 1).bit_length()
    return np.concatenate([x, np.zeros(m - len(x))])


# ---------------------------------------------------------------- dense operators

def weyl_generator(n: int, i: int) -> np.ndarray:
    """Dense P_i = Z^{⊗(i−1)} ⊗ X ⊗ I in mask indexing (qubit 1 = lowest bit)."""
    masks = np.arange(1 << n, dtype=np.int64)
    below = masks & ((1 << (i - 1)) - 1)
    sign = 1.0 - 2.0 * (np.bitwise_count(below.astype(np.uint64)) & 1)
    P = np.zeros((1 << n, 1 << n))
    P[masks ^ (1 << (i - 1)), masks] = sign
    return P


def gamma_dense(x) -> np.ndarray:
    """Γ(x) = Σ_i x_i P_i as a dense real symmetric matrix."""
    x = _unit(x)
    n = len(x)
    limits.require("MAX_UNITARY_QUBITS", n, "Γ(x) qubits")
    G = np.zeros((1 << n, 1 << n))
    for i, xi in enumerate(x, start=1):
        if xi:
            G += xi * weyl_generator(n, i)
    return G


# ---------------------------------------------------------------- loaders

def linear_unloader(x) -> Circuit:
    """Adjacent RBS chain taking the unary state of x to |e_1⟩."""
    x = _unit(x)
    n = len(x)
    if n == 1:
        return Circuit(1, (), "linear-unloader")
    th = spherical_angles(x)
    gates = tuple(Gate("RBS", (k, k + 1), -th[k - 1]) for k in range(n - 1, 0, -1))
    return Circuit(n, gates, "linear-unloader")


def _pre(x: np.ndarray, o: int, tilde: bool) -> list:
    """Log-depth unloader of ``x`` on qubits o+1 .. o+len(x).

    With ``tilde`` the block ends with CX gates leaving the parity of qubits
    o+2 .. o+len(x) on qubit o+2, which the enclosing level reads through a
    CZ instead of recomputing it.
    """
    m = len(x)
    if m == 1:
        return []
    if m == 2:
        return [Gate("RBS", (o + 1, o + 2), -float(np.arctan2(x[1], x[0])))]
    h = m // 2
    lo, hi = x[:h], x[h:]
    nlo, nhi = np.linalg.norm(lo), np.linalg.norm(hi)
    theta0 = float(np.arctan2(nhi, nlo))
    # a zero half still gets its (identity-angle) block so the parity network is intact
    e1 = np.eye(h)[0]
    lo = lo / nlo if nlo > 0 else e1
    hi = hi / nhi if nhi > 0 else e1
    gates = _pre(lo, o, True) + _pre(hi, o + h, tilde)
    cz = Gate("CZ", (o + 2, o + 1))
    gates += [cz, Gate("RBS", (o + 1, o + h + 1), -theta0), cz]
    if tilde:
        gates += [Gate("CX", (o + h + 2, o + h + 1)), Gate("CX", (o + h + 1, o + 2))]
    return gates


def log_unloader(x) -> Circuit:
    """Log-depth unloader; needs len(x) a power of 2."""
    x = _unit(x)
    n = len(x)
    if n & (n - 1):
        raise InvalidArgument(f"log-depth loader needs a power-of-2 length, got {n}; "
                              "zero-pad the vector first")
    return Circuit(n, tuple(_pre(x, 0, False)), "log-unloader")


def _sandwich(pre: Circuit, label: str) -> Circuit:
    c = pre + Circuit(pre.n, (Gate("X", (1,)),)) + pre.inverse()
    return Circuit(c.n, c.gates, label)


def linear_loader(x) -> Circuit:
    """Linear-depth Clifford loader: 2(n−1) adjacent RBS gates around one X."""
    return _sandwich(linear_unloader(x), "linear-loader")


def log_loader(x) -> Circuit:
    """Log-depth Clifford loader for power-of-2 length."""
    return _sandwich(log_unloader(x), "log-loader")


def loader(x, mode: str = "linear") -> Circuit:
    if mode == "linear":
        return linear_loader(x)
    if mode == "log":
        return log_loader(x)
    raise InvalidArgument(f"unknown loader mode {mode!r} (linear|log)")


def log_depth_formula(n: int) -> int:
    """4(log₂ n − 1): depth of the log-depth unary loader half for n > 2."""
    return 4 * (n.bit_length() - 2) if n > 2 else 1


def loader_depth_report(x, mode: str = "log") -> dict:
    full = loader(x, mode)
    half = log_unloader(x) if mode == "log" else linear_unloader(x)
    n = full.n
    rep = {"n": n, "mode": mode, "depth": depth(full), "half_depth": depth(half),
           "gates": gate_counts(full)}
    if mode == "log":
        rep["formula_depth"] = log_depth_formula(n)
        rep["half_depth_matches_formula"] = rep["half_depth"] == rep["formula_depth"]
        # the formula counts one loader half; the full circuit is half·X·half⁻¹
        rep["full_depth_discrepancy"] = rep["depth"] - rep["formula_depth"]
    return rep


# ---------------------------------------------------------------- checks

def _complex_state(Y) -> np.ndarray:
    """Dense amplitudes of |Col(Y)⟩ (d may be 0)."""
    n, d = Y.shape
    out = np.zeros(1 << n)
    if d == 0:
        out[0] = 1.0
        return out
    out[sector_masks(n, d)] = subset_determinants(Y)
    return out


def loader_action_check(x, Y, mode: str = "linear") -> dict:
    """Loader on |Col(Y)⟩ versus cos θ|Col(Y′)⟩ + sin θ|Col(x⊥, Y)⟩.

    θ is the angle between x and Col(Y); Y′ completes the unit parallel part of
    x to a basis of Col(Y) with the orientation of Y.  Γ(x) multiplies by x
    from the left, so the new direction comes first in the weight-(d+1) frame;
    listing it last would flip that term by (−1)^d.  Returns the residuals of
    the weight-(d−1) and weight-(d+1) parts and the two component norms.
    """
    x = _unit(x)
    Y = check_frame(Y)
    n, d = Y.shape
    if len(x) != n or d >= n:
        raise InvalidArgument(f"need len(x) = n > d; got len(x)={len(x)}, Y {Y.shape}")
    par = Y @ (Y.T @ x)
    perp = x - par
    c, s = np.linalg.norm(par), np.linalg.norm(perp)
    # orthonormal basis of Col(Y) whose first vector is the unit parallel part
    phat = par / c if c > 1e-12 else Y[:, 0]
    coords = Y.T @ phat
    Q, _ = np.linalg.qr(np.column_stack([coords, np.eye(d)]))
    Q = Q[:, :d]
    Q[:, 0] = coords
    if d > 1 and np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    # |Col(Y)⟩ = det(Q)·|Col(p̂, Y′)⟩; det(Q) can only be −1 when d = 1
    orient = float(np.sign(np.linalg.det(Q)))
    expected = orient * c * _complex_state(Y @ Q[:, 1:])
    if s > 1e-12:
        expected = expected + s * _complex_state(np.column_stack([perp / s, Y]))
    circ = loader(pad_vector(x) if mode == "log" else x, mode)
    start = _complex_state(Y)
    if circ.n > n:
        start = np.concatenate([start, np.zeros((1 << circ.n) - len(start))])
    out = run(StateVector(circ.n, start), circ).amplitudes[: 1 << n]
    w = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(int)
    lower, upper = w == d - 1, w == d + 1
    return {
        "theta": float(np.arctan2(s, c)),
        "lower_norm": float(np.linalg.norm(out[lower])),
        "upper_norm": float(np.linalg.norm(out[upper])),
        "lower_residual": float(np.linalg.norm(out[lower] - expected[lower])),
        "upper_residual": float(np.linalg.norm(out[upper] - expected[upper])),
        "other_mass": float(np.linalg.norm(out[~(lower | upper)])),
    }


def loader_amplitude_path_sum(xs, T: int, S: int) -> float:
    """⟨T⊕S| Γ(x_1) ⋯ Γ(x_k) |T⟩ by summing over all k-step hypercube paths.

    Γ(x_k) acts first.  A step flipping bit p from state R contributes
    (−1)^{|R ∩ [1, p)|} times the entry of the current vector at p.
    """
    xs = [np.asarray(v, dtype=float).ravel() for v in xs]
    k = len(xs)
    n = len(xs[0])
    if any(len(v) != n for v in xs):
        raise InvalidArgument("all vectors must have the same length")
    if n > PATH_SUM_MAX_N or k > PATH_SUM_MAX_K:
        raise ResourceLimit(f"path sum limited to n <= {PATH_SUM_MAX_N}, k <= {PATH_SUM_MAX_K}; "
                            f"got n={n}, k={k}")
    if k == 0:
        return 1.0 if S == 0 else 0.0
    paths = np.array(list(product(range(n), repeat=k)), dtype=np.int64)  # column t = step t
    state = np.full(len(paths), int(T), dtype=np.int64)
    weight = np.ones(len(paths))
    for t in range(k):
        p = paths[:, t]
        below = state & ((np.int64(1) << p) - 1)
        sign = 1.0 - 2.0 * (np.bitwise_count(below.astype(np.uint64)) & 1)
        weight *= sign * xs[k - 1 - t][p]
        state ^= np.int64(1) << p
    return float(weight[state == (int(T) ^ int(S))].sum())


def reflection_residual(c: Circuit) -> float:
    U = circuit_unitary(c)
    return float(np.max(np.abs(U @ U - np.eye(len(U)))))


def describe(x, mode: str) -> dict:
    c = loader(x, mode)
    rep = loader_depth_report(x, mode)
    rep["circuit"] = c.to_dict()
    return rep
