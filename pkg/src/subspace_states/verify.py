"""Invariant suite: each check recomputes one claimed identity from independent pieces.

A check returns a row ``{"claim", "passed", "value", "tol", "detail"}`` where
``value`` is the worst residual (or count) observed.
"""
from __future__ import annotations

import numpy as np

from . import rng, tda
from .circuit import Circuit, circuit_unitary, depth, fbs, lower_fbs
from .clifford import (gamma_dense, linear_loader, loader_action_check, log_depth_formula,
                       log_loader, log_unloader)
from .compound_sve import (block_encoding_check, compound_spectrum_check,
                           givens_sector_unitary, principal_angles_oracle, subspace_sve, success_rate)
from .dpp import quantum_det_state
from .errors import InvalidArgument
from .givens import decompose, pad_orthogonal, prepare_via_givens
from .linalg import (cauchy_binet_check, compound, orthogonalize, sector_masks,
                     subset_determinants, subset_indices)
from .simulator import SectorState, apply_givens_theorem_check, check_plucker


def fbs_definition_matrix(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """FBS_ij(θ) built basis state by basis state from its definition.

    States with bits i, j equal are fixed; otherwise the pair rotates with the
    sine multiplied by (−1) to the number of set bits strictly between i and j.
    """
    c, s = np.cos(theta), np.sin(theta)
    U = np.zeros((1 << n, 1 << n))
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    for m in range(1 << n):
        has_i, has_j = bool(m & bi), bool(m & bj)
        if has_i == has_j:
            U[m, m] = 1.0
            continue
        between = sum(1 for q in range(i + 1, j) if m >> (q - 1) & 1)
        sp = s * (-1) ** between
        partner = m ^ bi ^ bj
        U[m, m] = c
        U[partner, m] = sp if has_i else -sp
    return U


def _random_frame(g, n: int, d: int) -> np.ndarray:
    return orthogonalize(g.normal(size=(n, d)))


def _row(claim, value, tol, detail="", passed=None) -> dict:
    if passed is None:
        passed = bool(value <= tol)
    return {"claim": claim, "passed": bool(passed), "value": float(value), "tol": tol, "detail": detail}


# ---------------------------------------------------------------- circuits

def check_fbs_lowering(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(2, min(max_n, 8) + 1):
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                for th in g.uniform(-np.pi, np.pi, 3):
                    U = circuit_unitary(Circuit(n, lower_fbs(fbs(i, j, th))))
                    worst = max(worst, np.max(np.abs(U - fbs_definition_matrix(n, i, j, th))))
    return _row("fbs-lowering", worst, 1e-12, "lowered CX/CZ/RBS circuit vs definition")


def check_givens_rotation(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for _ in range(40):
        n = int(g.integers(2, min(max_n, 8) + 1))
        d = int(g.integers(1, n + 1))
        i, j = sorted(g.choice(n, 2, replace=False) + 1)
        worst = max(worst, apply_givens_theorem_check(_random_frame(g, n, d), int(i), int(j),
                                                      float(g.uniform(-np.pi, np.pi))))
    return _row("givens-rotation-action", worst, 1e-10, "FBS on |Col(X)⟩ vs |Col(GX)⟩")


def check_givens_circuit(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(1, min(max_n, 6) + 1):
        U = _random_frame(g, n, n)
        for method in ("pyramid", "csd"):
            dec = decompose(pad_orthogonal(U) if method == "csd" else U, method)
            for d in range(1, n + 1):
                for S in sector_masks(n, d):
                    cols = [k - 1 for k in subset_indices(int(S))]
                    ref = subset_determinants(U[:, cols])
                    got = prepare_via_givens(U, int(S), method, dec).amplitudes
                    worst = max(worst, np.max(np.abs(got - ref)))
    return _row("givens-circuit-amplitudes", worst, 1e-9, "pyramid and sine-cosine, all S")


def check_pyramid_counts(max_n, seed):
    g = rng.generator(seed)
    count_bad = depth_bad = 0
    literal_mismatch = 0
    for n in range(2, max(2, max_n) + 1):
        for d in range(1, n + 1):
            dec = decompose(_random_frame(g, n, d), "pyramid")
            params = n * d - d * (d + 1) // 2
            count_bad += len(dec.rotations) != params
            literal_mismatch += len(dec.rotations) != (2 * n - 1 - d) * d
            depth_bad += depth(dec.circuit()) > n + d
    detail = (f"count = nd - d(d+1)/2 and depth <= n+d; the count differs from (2n-1-d)d "
              f"in {literal_mismatch} cases (it is half of it)")
    return _row("pyramid-counts", count_bad + depth_bad, 0, detail)


# ---------------------------------------------------------------- loaders

def check_loader_equivalence(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in (2, 4, 8):
        for _ in range(5):
            x = g.normal(size=n)
            x /= np.linalg.norm(x)
            G = gamma_dense(x)
            for c in (linear_loader(x), log_loader(x)):
                worst = max(worst, np.max(np.abs(circuit_unitary(c) - G)))
    return _row("clifford-loader-equivalence", worst, 1e-11, "linear and log loaders vs Γ(x)")


def check_log_loader_depth(max_n, seed):
    x4, x8 = np.full(4, 0.5), np.full(8, 8 ** -0.5)
    bad = sum(depth(log_unloader(x)) != log_depth_formula(len(x)) for x in (x4, x8))
    full = depth(log_loader(x8))
    return _row("log-loader-depth", bad, 0,
                f"loader half depth = 4(log2 n - 1) for n = 4, 8; full reflection depth {full} at n = 8")


def check_loader_action(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in (2, 4, 8):
        for d in range(1, n):
            x = g.normal(size=n)
            x /= np.linalg.norm(x)
            Y = _random_frame(g, n, d)
            for mode in ("linear", "log"):
                r = loader_action_check(x, Y, mode)
                worst = max(worst, r["lower_residual"], r["upper_residual"], r["other_mass"])
    return _row("loader-action", worst, 1e-10, "cos θ|Col(Y′)⟩ + sin θ|Col(x⊥, Y)⟩")


def check_determinant_amplitudes(max_n, seed):
    g = rng.generator(seed)
    worst_amp = worst_leak = 0.0
    for t in range(12):
        n = int(g.integers(2, min(max(max_n, 2), 8) + 1))
        d = int(g.integers(1, n + 1))
        res = quantum_det_state(_random_frame(g, n, d), "log" if t % 2 else "linear")
        worst_amp = max(worst_amp, res["residual"])
        worst_leak = max(worst_leak, res["leakage"])
    return _row("determinant-amplitudes", max(worst_amp, worst_leak), 1e-9,
                f"amplitude residual {worst_amp:.1e}, leakage {worst_leak:.1e}")


# ---------------------------------------------------------------- subspace states

def check_plucker_relations(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(4, max(4, min(max_n, 7)) + 1):
        for d in range(2, n - 1):
            X = _random_frame(g, n, d)
            worst = max(worst, check_plucker(SectorState(n, d, subset_determinants(X))))
    return _row("plucker-relations", worst, 1e-10, "quadratic relations on determinant states")


def check_cauchy_binet(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(1, max_n + 1):
        for d in range(1, n + 1):
            X, Y = _random_frame(g, n, d), _random_frame(g, n, d)
            worst = max(worst, abs(cauchy_binet_check(X, Y) - np.linalg.det(X.T @ Y)))
    return _row("cauchy-binet", worst, 1e-10, "⟨Col(X)|Col(Y)⟩ = det(XᵀY)")


# ---------------------------------------------------------------- compound

def check_compound_direct_sum(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(1, min(max_n, 6) + 1):
        U = _random_frame(g, n, n)
        for method in ("pyramid", "csd"):
            V = pad_orthogonal(U) if method == "csd" else U
            dec = decompose(V, method)
            for k in range(1, V.shape[0] + 1):
                worst = max(worst, np.max(np.abs(givens_sector_unitary(dec, k) - compound(V, k))))
    return _row("compound-direct-sum", worst, 1e-9, "Givens circuit on weight k = compound(U, k)")


def check_compound_multiplicative(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(1, min(max_n, 7) + 1):
        A, B = g.normal(size=(n, n)), g.normal(size=(n, n))
        for k in range(1, n + 1):
            worst = max(worst, np.max(np.abs(compound(A @ B, k) - compound(A, k) @ compound(B, k))))
    return _row("compound-multiplicative", worst, 1e-10, "(AB)ᵏ = AᵏBᵏ")


def check_compound_spectrum(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(2, min(max_n, 8) + 1):
        U = _random_frame(g, n, n)
        for k in range(1, n + 1):
            worst = max(worst, compound_spectrum_check(U, k)["residual"])
    return _row("compound-spectrum", worst, 1e-8, "eigenphases of 𝒰ᵏ are sums over k-subsets")


def check_principal_angles(max_n, seed):
    g = rng.generator(seed)
    worst = 0.0
    for n in range(3, min(max_n, 6) + 1):
        P, Q = _random_frame(g, n, n), _random_frame(g, n, n)
        I = sorted((g.choice(n, n - 1, replace=False) + 1).tolist())
        J = sorted((g.choice(n, n - 1, replace=False) + 1).tolist())
        for k in range(1, n):
            worst = max(worst, principal_angles_oracle(P, Q, I, J, k)["residual"],
                        block_encoding_check(P, Q, I, J, k))
    return _row("principal-angles", worst, 1e-8, "cos θ_S = ∏σ_S and the compound block encoding")


def check_sve(max_n, seed):
    g = rng.generator(seed)
    sig = np.sort(g.uniform(0.2, 1.0, 4))[::-1]
    A = _random_frame(g, 4, 4) @ np.diag(sig) @ _random_frame(g, 4, 4).T
    bits = 8
    tol = 2 * 2 * np.pi / 2 ** bits
    worst = 1.0
    for S in sector_masks(4, 2):
        r = subspace_sve(A, 2, bits, 100, seed, weights={int(S): 1.0})
        worst = min(worst, success_rate(r, tol))
    return _row("subspace-sve", 1 - worst, 0.2,
                f"lowest success rate {worst:.2f} over 100 shots per subset, t = {bits}")


# ---------------------------------------------------------------- tda

def _complexes(max_n, seed):
    out = [tda.complete(3), tda.explicit(3, [[1, 2], [2, 3], [1, 3]], close=True)]
    out += [tda.random_complex(1 + s % min(max(max_n, 1), 10), seed * 1000 + s) for s in range(20)]
    return out


def check_boundary_squared(max_n, seed):
    return _row("boundary-squared-zero", max(tda.boundary_squared_max(C) for C in _complexes(max_n, seed)),
                0, "integer d² = 0")


def check_laplacian_diagonal(max_n, seed):
    bad = sum(tda.laplacian_diagonal_check(C) for C in _complexes(max_n, seed))
    return _row("laplacian-diagonal", bad, 0, "Δ(x,x) = (p+1) + ext_p(x)")


def check_dirac_embedding(max_n, seed):
    worst = max(tda.embedding_check(C) for C in _complexes(max_n, seed))
    return _row("dirac-embedding", worst, 1e-12, "D(C) is the C×C block of Σ Z⊗X⊗I")


def check_betti(max_n, seed):
    Cs = _complexes(max_n, seed)
    disagree = sum(not tda.betti_numbers(C)["agree"] for C in Cs)
    hollow = tda.betti_numbers(Cs[1])["betti"]
    full = tda.betti_numbers(Cs[0])["betti"]
    ok = disagree == 0 and hollow == [1, 1] and full == [1, 0, 0]
    return _row("betti-numbers", disagree, 0,
                f"Laplacian kernels vs ranks; hollow triangle {hollow}, complete(3) {full}", ok)


def check_loader_block_encoding(max_n, seed):
    reps = [tda.loader_block_encoding_depth(n) for n in (2, 4, 8)]
    worst = max(max(r["residual"], r["reflection_residual"]) for r in reps)
    return _row("loader-dirac-block-encoding", worst, 1e-11,
                "log loader of the uniform vector = D(complete)/√n; depth " +
                ", ".join(f"n={r['n']}: {r['depth']}" for r in reps))


SUITES = {
    "circuits": [check_fbs_lowering, check_givens_rotation, check_givens_circuit, check_pyramid_counts],
    "states": [check_plucker_relations, check_cauchy_binet],
    "loaders": [check_loader_equivalence, check_log_loader_depth, check_loader_action,
                check_determinant_amplitudes],
    "compound": [check_compound_direct_sum, check_compound_multiplicative, check_compound_spectrum,
                 check_principal_angles, check_sve],
    "tda": [check_boundary_squared, check_laplacian_diagonal, check_dirac_embedding, check_betti,
            check_loader_block_encoding],
}


def run_suite(suite: str = "all", max_n: int = 6, seed: int = 0) -> list:
    if suite == "all":
        checks = [c for s in SUITES.values() for c in s]
    elif suite in SUITES:
        checks = SUITES[suite]
    else:
        raise InvalidArgument(f"unknown suite {suite!r} (all|{'|'.join(SUITES)})")
    return [check(max_n, seed) for check in checks]


def format_table(rows: list) -> str:
    width = max(len(r["claim"]) for r in rows)
    lines = []
    for r in rows:
        mark = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{mark}  {r['claim']:<{width}}  {r['value']:.3g} (tol {r['tol']:g})  {r['detail']}")
    return "\n".join(lines)
