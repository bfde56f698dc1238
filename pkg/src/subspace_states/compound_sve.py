"""Givens circuits as compound matrices, and subspace singular value estimation.

Phase estimation is simulated on the weight-k sector matrix: for a register of
t bits and unitary W with eigenpairs (λ_j, z_j), outcome m has amplitude
Σ_j ⟨z_j|ψ⟩ F_t(λ_j, m) z_j with the usual Fejér-type kernel F_t.

Two operators are supported:

* ``"singular"``: the reflection walk W = R_I 𝒰 R_J 𝒰ᵀ, with R_I, R_J the
  ±1 reflections about the weight-k subsets of the row block I and column
  block J of the embedding.  On the plane spanned by 𝒰|v_S⟩ and |u_S⟩ it
  rotates by ±2θ_S where cos θ_S = ∏_{i∈S} σ_i, so θ̄ = fold(φ)/2.
* ``"eigen"``: 𝒰 itself, with eigenphases Σ_{i∈S} θ_i on |Col(V_S)⟩ for the
  eigenvectors V of U; θ̄ = fold(φ).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np
from scipy.linalg import schur, subspace_angles

from . import limits, rng
from ._kernels import apply_sector
from .circuit import Circuit
from .errors import InvalidArgument, InvalidOperation, ResourceLimit
from .givens import GivensDecomposition, decompose
from .linalg import compound, format_subset, mask_positions, sector_masks, subset_indices

MAX_SVE_DIM = 2000
MAX_BITS = 12


# ---------------------------------------------------------------- sector unitaries

def sector_unitary_from_circuit(c: Circuit, k: int) -> np.ndarray:
    """Matrix of a weight-preserving circuit on the weight-k sector (ranked basis)."""
    if not c.weight_preserving:
        bad = next(g for g in c.gates if not g.weight_preserving)
        raise InvalidOperation(f"{bad.kind} changes Hamming weight; no sector matrix exists")
    dim = comb(c.n, k)
    limits.require("MAX_COMPOUND_DIM", dim, f"C({c.n},{k})")
    M = np.eye(dim)
    for g in c.gates:
        M = apply_sector(M, c.n, k, g)
    return M


def givens_sector_unitary(dec: GivensDecomposition, k: int) -> np.ndarray:
    """Sector matrix of the decomposition's circuit with its column signs applied.

    The circuit realizes the rotation product R; the matrix is R·diag(signs),
    whose compound scales column S by the product of signs over S.
    """
    M = sector_unitary_from_circuit(dec.circuit(), k)
    masks = sector_masks(dec.n, k)
    signs = np.asarray(dec.signs)
    if k:
        col = np.prod(signs[mask_positions(masks, dec.n, k)], axis=1)
        M = M * col
    return M


# ---------------------------------------------------------------- spectra

def eigen_frame(U) -> tuple:
    """Unitary eigenvectors and phases of a real orthogonal matrix (complex Schur)."""
    T, Z = schur(np.asarray(U, dtype=float), output="complex")
    return Z, np.angle(np.diag(T))


def compound_spectrum_check(U, k: int) -> dict:
    """Check 𝒰ᵏ|Col(V_S)⟩ = e^{iΣθ}|Col(V_S)⟩ for every k-subset S of eigenvectors."""
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    if n > 8:
        raise InvalidArgument(f"spectrum check is an oracle for n <= 8, got n={n}")
    Z, theta = eigen_frame(U)
    Ck = compound(U, k)
    Vk = compound(Z, k)                       # column S = |Col(Z_S)⟩ with complex minors
    masks = sector_masks(n, k)
    phases = np.array([theta[[i - 1 for i in subset_indices(int(m))]].sum() for m in masks])
    resid = np.abs(Ck @ Vk - Vk * np.exp(1j * phases)).max()
    return {"residual": float(resid), "eigenphases": theta.tolist(), "phases": phases.tolist()}


def principal_angles_oracle(P, Q, I, J, k: int) -> dict:
    """cos θ_S = ∏_{i∈S} σ_i for A = (PᵀQ)_{IJ}, checked against direct subspace angles.

    ``I`` and ``J`` are 1-indexed row/column index lists.  The direct route takes
    the columns of the k-th compounds of P and Q indexed by k-subsets of I and J
    and computes their principal angles with scipy.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    I = sorted(int(i) for i in I)
    J = sorted(int(j) for j in J)
    if len(I) < k or len(J) < k:
        raise InvalidArgument(f"need |I|, |J| >= k = {k}")
    A = (P.T @ Q)[np.ix_([i - 1 for i in I], [j - 1 for j in J])]
    sig = np.linalg.svd(A, compute_uv=False)
    r = len(sig)
    products = []
    for m in sector_masks(r, k):
        idx = [i - 1 for i in subset_indices(int(m))]
        products.append((int(m), float(np.prod(sig[idx]))))
    n = P.shape[0]
    masks = sector_masks(n, k)
    Ik = [c for c, m in enumerate(masks) if all(b in I for b in subset_indices(int(m)))]
    Jk = [c for c, m in enumerate(masks) if all(b in J for b in subset_indices(int(m)))]
    Pk, Qk = compound(P, k)[:, Ik], compound(Q, k)[:, Jk]
    direct = np.sort(np.cos(subspace_angles(Pk, Qk)))[::-1]
    predicted = np.sort([c for _, c in products])[::-1][:len(direct)]
    return {"singular_values": sig.tolist(),
            "cosines": products,
            "residual": float(np.max(np.abs(direct - predicted))) if len(direct) else 0.0}


def block_encoding_check(P, Q, I, J, k: int) -> float:
    """max |compound(PᵀQ,k)[I_k, J_k] − compound((PᵀQ)_{IJ}, k)|."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    I = sorted(int(i) for i in I)
    J = sorted(int(j) for j in J)
    M = P.T @ Q
    n = M.shape[0]
    masks = sector_masks(n, k)
    inside = lambda block: [c for c, m in enumerate(masks)
                            if all(b in block for b in subset_indices(int(m)))]
    big = compound(M, k)[np.ix_(inside(I), inside(J))]
    small = compound(M[np.ix_([i - 1 for i in I], [j - 1 for j in J])], k)
    return float(np.max(np.abs(big - small)))


def block_embedding(A) -> np.ndarray:
    """Orthogonal U = [[A, (I−AAᵀ)^½], [−(I−AᵀA)^½, Aᵀ]] for ‖A‖ ≤ 1.

    Rows 1..m of U are the block I and columns 1..n the block J.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if np.linalg.norm(A, 2) > 1 + 1e-10:
        raise InvalidArgument(f"block needs spectral norm <= 1, got {np.linalg.norm(A, 2):.6g}")

    # square roots through one full SVD stay orthogonal even when σ = 1
    W, sig, Vt = np.linalg.svd(A)
    sig = np.minimum(sig, 1.0)

    def co(size):
        s = np.zeros(size)
        s[:len(sig)] = sig
        return np.sqrt((1.0 - s) * (1.0 + s))

    top = np.hstack([A, (W * co(m)) @ W.T])
    bottom = np.hstack([-(Vt.T * co(n)) @ Vt, A.T])
    return np.vstack([top, bottom])


# ---------------------------------------------------------------- phase estimation

@dataclass(frozen=True)
class PhaseEstimate:
    subset: Optional[int]   # label of the invariant plane the shot landed in
    phase: float            # measured register phase 2πm/2^t in [0, 2π)
    theta: float            # folded estimate of θ_S
    bits: int

    @property
    def cos(self) -> float:
        return float(np.cos(self.theta))

    def to_dict(self) -> dict:
        return {"subset": None if self.subset is None else format_subset(self.subset),
                "phase": self.phase, "theta": self.theta, "cos": self.cos}


def _fold(phi):
    return np.minimum(phi, 2 * np.pi - phi)


def pe_kernel(lam: np.ndarray, bits: int) -> np.ndarray:
    """F[j, m] = 2^-t Σ_τ (λ_j e^{-2πi m/2^t})^τ, the PE amplitude kernel."""
    M = 1 << bits
    m = np.arange(M)
    r = lam[:, None] * np.exp(-2j * np.pi * m[None, :] / M)
    num = 1 - r ** M
    den = 1 - r
    close = np.abs(den) < 1e-12
    out = np.where(close, 1.0 + 0j, num / np.where(close, 1.0, den) / M)
    return out


def phase_distribution(W: np.ndarray, psi: np.ndarray, planes: list, bits: int) -> np.ndarray:
    """Joint probability over (plane index, register outcome).

    Row p < len(planes) is the mass of outcome m inside plane p (an orthonormal
    column basis); the last row is whatever falls outside every plane.
    """
    if bits > MAX_BITS:
        raise ResourceLimit(f"at most {MAX_BITS} register bits, got {bits}")
    T, Z = schur(W.astype(complex), output="complex")
    lam = np.diag(T)
    coeff = Z.conj().T @ psi
    F = pe_kernel(lam, bits) * coeff[:, None]           # (dim, M) in the eigenbasis
    total = np.sum(np.abs(F) ** 2, axis=0)
    rows = []
    for B in planes:
        proj = (B.conj().T @ Z) @ F
        rows.append(np.sum(np.abs(proj) ** 2, axis=0))
    inside = np.sum(rows, axis=0) if rows else np.zeros_like(total)
    rows.append(np.clip(total - inside, 0.0, None))
    return np.array(rows)


def _sample_joint(joint: np.ndarray, shots: int, seed: int, threads: int = 1):
    flat = joint.ravel()
    idx = rng.sample_from_cdf(np.cumsum(flat), shots, seed, rng.PHASE, threads)
    return np.divmod(idx, joint.shape[1])


def _embed_prefix(vecs: np.ndarray, dim: int) -> np.ndarray:
    # the weight-k subsets of a leading block [r] are a prefix of the sector order
    out = np.zeros((dim, vecs.shape[1]), dtype=vecs.dtype)
    out[:vecs.shape[0]] = vecs
    return out


def sve_problem(A, k: int, source: str = "givens", U=None) -> dict:
    """Assemble the sector matrices and invariant planes for the singular mode."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if U is None:
        U = block_embedding(A)
    U = np.asarray(U, dtype=float)
    N = U.shape[0]
    if np.max(np.abs(U[:m, :n] - A)) > 1e-9:
        raise InvalidArgument("embedding does not carry A in its leading block")
    if not 1 <= k <= min(m, n):
        raise InvalidArgument(f"need 1 <= k <= min(m, n) = {min(m, n)}, got {k}")
    dim = comb(N, k)
    limits.require("MAX_COMPOUND_DIM", dim, f"C({N},{k})")
    if dim > MAX_SVE_DIM:
        raise ResourceLimit(f"C({N},{k}) = {dim} exceeds the SVE cap {MAX_SVE_DIM}")
    if source == "givens":
        Uk = givens_sector_unitary(decompose(U, "pyramid"), k)
    elif source == "compound":
        Uk = compound(U, k)
    else:
        raise InvalidArgument(f"unknown unitary source {source!r} (givens|compound)")
    masks = sector_masks(N, k)
    RI = np.where(masks < (1 << m), 1.0, -1.0)
    RJ = np.where(masks < (1 << n), 1.0, -1.0)
    W = (RI[:, None] * Uk) @ (RJ[:, None] * Uk.T)
    Ul, sig, Vt = np.linalg.svd(A)
    sig_full = np.zeros(n)
    sig_full[:len(sig)] = sig
    right = _embed_prefix(compound(Vt.T, k), dim)                 # columns: S ⊆ [n]
    left = _embed_prefix(compound(Ul, k), dim) if k <= m else np.zeros((dim, 0))
    labels = [int(s) for s in sector_masks(n, k)]
    planes, truth = [], []
    for c, S in enumerate(labels):
        a = Uk @ right[:, c]
        cols = [a]
        prod = float(np.prod(sig_full[[i - 1 for i in subset_indices(S)]]))
        if S < (1 << m) and prod > 1e-12:
            b = left[:, c]
            w = b - (a @ b) * a
            if np.linalg.norm(w) > 1e-9:
                cols.append(w / np.linalg.norm(w))
        planes.append(np.column_stack(cols))
        truth.append(prod)
    return {"W": W, "Uk": Uk, "right": right, "planes": planes, "labels": labels,
            "cosines": truth, "N": N, "m": m, "n": n}


def _input_state(vectors: np.ndarray, labels: list, weights) -> np.ndarray:
    if weights is None:
        weights = {S: 1.0 for S in labels}
    psi = np.zeros(vectors.shape[0], dtype=complex)
    for S, w in weights.items():
        if S not in labels:
            raise InvalidArgument(f"input subset {format_subset(S)} is not a valid label")
        psi += w * vectors[:, labels.index(S)]
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise InvalidArgument("input superposition is zero")
    return psi / nrm


def subspace_sve(A, k: int, bits: int, shots: int, seed: int, weights=None,
                 mode: str = "singular", U=None, source: str = "givens",
                 threads: int = 1) -> dict:
    """Simulated subspace singular value estimation.

    ``weights`` maps subset masks S to input amplitudes (default: uniform).  In
    ``"singular"`` mode S indexes right singular vectors of A and the input is
    Σ α_S 𝒰|Col(V_S)⟩; in ``"eigen"`` mode S indexes eigenvectors of the
    embedding and the input is Σ α_S |Col(V_S)⟩.
    """
    if shots < 1:
        raise InvalidArgument(f"shots must be >= 1, got {shots}")
    if mode == "singular":
        prob = sve_problem(A, k, source, U)
        psi = _input_state(prob["Uk"] @ prob["right"], prob["labels"], weights)
        W, planes, labels = prob["W"], prob["planes"], prob["labels"]
        truth = {S: float(np.arccos(np.clip(c, -1, 1))) for S, c in zip(labels, prob["cosines"])}
        to_theta = lambda phi: _fold(phi) / 2
    elif mode == "eigen":
        if U is None:
            U = block_embedding(A)
        U = np.asarray(U, dtype=float)
        N = U.shape[0]
        if comb(N, k) > MAX_SVE_DIM:
            raise ResourceLimit(f"C({N},{k}) exceeds the SVE cap {MAX_SVE_DIM}")
        W = givens_sector_unitary(decompose(U, "pyramid"), k) if source == "givens" else compound(U, k)
        Z, theta = eigen_frame(U)
        vecs = compound(Z, k)
        labels = [int(s) for s in sector_masks(N, k)]
        planes = [vecs[:, [c]] for c in range(len(labels))]
        psi = _input_state(vecs, labels, weights)
        truth = {S: float(_fold(np.mod(theta[[i - 1 for i in subset_indices(S)]].sum(), 2 * np.pi)))
                 for S in labels}
        to_theta = _fold
    else:
        raise InvalidArgument(f"unknown SVE mode {mode!r} (singular|eigen)")
    joint = phase_distribution(W, psi, planes, bits)
    plane_idx, outcome = _sample_joint(joint, shots, seed, threads)
    M = 1 << bits
    estimates = []
    for p, o in zip(plane_idx, outcome):
        phi = 2 * np.pi * o / M
        S = labels[p] if p < len(labels) else None
        estimates.append(PhaseEstimate(S, float(phi), float(to_theta(phi)), bits))
    return {"mode": mode, "bits": bits, "estimates": estimates, "truth": truth,
            "joint": joint, "labels": labels}


def sve_summary(result: dict) -> dict:
    """Per-subset shot counts, mean cos θ̄ and the true value, JSON-ready."""
    per = {}
    for e in result["estimates"]:
        key = "outside" if e.subset is None else format_subset(e.subset)
        per.setdefault(key, []).append(e)
    out = {}
    for key in sorted(per, key=lambda s: (s == "outside", s)):
        es = per[key]
        entry = {"shots": len(es),
                 "mean_cos": float(np.mean([e.cos for e in es])),
                 "mode_theta": float(max(set(e.theta for e in es),
                                         key=lambda t: sum(1 for e in es if e.theta == t)))}
        if es[0].subset is not None:
            th = result["truth"][es[0].subset]
            entry["true_theta"] = th
            entry["true_cos"] = float(np.cos(th))
        out[key] = entry
    return out


def success_rate(result: dict, tol: float) -> float:
    """Fraction of shots with |cos θ̄ − cos θ_S| ≤ tol (shots outside every plane fail)."""
    ok = 0
    for e in result["estimates"]:
        if e.subset is not None and abs(e.cos - np.cos(result["truth"][e.subset])) <= tol:
            ok += 1
    return ok / len(result["estimates"])
