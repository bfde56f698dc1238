"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""
import json
import subprocess
import sys
import time

import numpy as np

from oracles import (colex_subsets, compound_brute, fbs_expm, gamma_kron, givens_ref, mask_of,
                     random_frame, random_orthogonal)
from subspace_states import tda
from subspace_states.circuit import Circuit, circuit_unitary, depth, fbs
from subspace_states.cli import run
from subspace_states.clifford import linear_loader, log_depth_formula, log_loader, log_unloader
from subspace_states.compound_sve import givens_sector_unitary, subspace_sve, success_rate
from subspace_states.dpp import (chi_square, classical_dpp_sample, empirical, exact_distribution,
                                 quantum_det_state, quantum_det_sample, tv_distance)
from subspace_states.givens import decompose, pad_orthogonal, prepare_via_givens
from subspace_states.linalg import compound
from subspace_states.simulator import SectorState, apply_gate_sector


def verdict(number, passed, detail):
    print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
    assert passed, detail


def minors(X):
    n, d = X.shape
    return np.array([np.linalg.det(X[[i - 1 for i in S]]) for S in colex_subsets(n, d)])


def test_criterion_01_fbs_lowering():
    g = np.random.default_rng(101)
    t0, worst = time.perf_counter(), 0.0
    for n in range(2, 9):
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                for th in g.uniform(-np.pi, np.pi, 20):
                    lowered = Circuit(n, (fbs(i, j, th),)).lowered()
                    assert all(q.kind != "FBS" for q in lowered.gates)
                    worst = max(worst, np.max(np.abs(circuit_unitary(lowered) - fbs_expm(n, i, j, th))))
    secs = time.perf_counter() - t0
    verdict(1, worst <= 1e-12 and secs < 30,
            f"max |lowered - definition| = {worst:.1e} (tol 1e-12), {secs:.1f} s (limit 30 s)")


def test_criterion_02_givens_rotation_theorem():
    g = np.random.default_rng(102)
    t0, worst = time.perf_counter(), 0.0
    for _ in range(100):
        n = int(g.integers(2, 9))
        d = int(g.integers(1, n + 1))
        i, j = sorted(int(v) for v in g.choice(n, 2, replace=False) + 1)
        th = float(g.uniform(-np.pi, np.pi))
        X = random_frame(g, n, d)
        lhs = apply_gate_sector(SectorState(n, d, minors(X)), fbs(i, j, th)).amplitudes
        worst = max(worst, np.linalg.norm(lhs - minors(givens_ref(n, i, j, th) @ X)))
    secs = time.perf_counter() - t0
    verdict(2, worst <= 1e-10 and secs < 60,
            f"max ||FBS|Col(X)> - |Col(GX)>|| = {worst:.1e} (tol 1e-10) over 100 cases, {secs:.1f} s")


def test_criterion_03_givens_circuit_amplitudes():
    g = np.random.default_rng(103)
    t0, worst = time.perf_counter(), 0.0
    for method in ("pyramid", "csd"):
        for n in range(1, 7):
            U = random_orthogonal(g, n)
            for d in range(1, n + 1):
                for S in colex_subsets(n, d):
                    amps = prepare_via_givens(U, mask_of(S), method).amplitudes
                    ref = np.array([np.linalg.det(U[np.ix_([t - 1 for t in T], [s - 1 for s in S])])
                                    for T in colex_subsets(n, d)])
                    k = np.argmax(np.abs(ref))
                    worst = max(worst, np.max(np.abs(np.sign(amps[k] * ref[k]) * amps - ref)))
    secs = time.perf_counter() - t0
    verdict(3, worst <= 1e-9 and secs < 60,
            f"max |amplitude - det(U[T,S])| = {worst:.1e} (tol 1e-9), pyramid and csd, n <= 6, "
            f"{secs:.1f} s")


def test_criterion_04_pyramid_counts():
    g = np.random.default_rng(104)
    literal_bad, depth_bad, cases, seen = 0, 0, 0, []
    for n in range(2, 11):
        for d in range(1, n + 1):
            dec = decompose(random_frame(g, n, d), "pyramid")
            count, dep = len(dec.rotations), depth(dec.circuit())
            cases += 1
            if count != (2 * n - 1 - d) * d:
                literal_bad += 1
                if len(seen) < 3:
                    seen.append(f"n={n},d={d}: {count} gates vs {(2 * n - 1 - d) * d}")
            depth_bad += dep > n + d
    verdict(4, literal_bad == 0 and depth_bad == 0,
            f"gate count == (2n-1-d)d in {cases - literal_bad}/{cases} frames "
            f"(e.g. {'; '.join(seen)}); depth <= n+d in {cases - depth_bad}/{cases}")


def test_criterion_05_clifford_loaders():
    g = np.random.default_rng(105)
    worst = 0.0
    for n in (2, 4, 8):
        for _ in range(20):
            x = g.normal(size=n)
            x /= np.linalg.norm(x)
            ref = gamma_kron(x)
            for build in (linear_loader, log_loader):
                worst = max(worst, np.max(np.abs(circuit_unitary(build(x)) - ref)))
    depths = {n: depth(log_unloader(np.full(n, n ** -0.5))) for n in (4, 8)}
    depth_ok = all(depths[n] == 4 * (int(np.log2(n)) - 1) == log_depth_formula(n) for n in (4, 8))
    full = {n: depth(log_loader(np.full(n, n ** -0.5))) for n in (4, 8)}
    verdict(5, worst <= 1e-11 and depth_ok,
            f"max |loader - Gamma(x)| = {worst:.1e} (tol 1e-11); log loader half depth "
            f"{depths} vs 4(log2 n - 1); full reflection depth {full} (discrepancy recorded)")


def test_criterion_06_determinant_amplitudes():
    g = np.random.default_rng(106)
    worst_res = worst_leak = 0.0
    for r in range(50):
        n = int(g.integers(2, 9))
        d = int(g.integers(1, n + 1))
        X = random_frame(g, n, d)
        res = quantum_det_state(X, ("linear", "log")[r % 2])
        ref = minors(X)
        amps = res["state"].amplitudes
        sign = np.sign(amps[np.argmax(np.abs(ref))] * ref[np.argmax(np.abs(ref))])
        worst_res = max(worst_res, np.max(np.abs(sign * amps - ref)))
        worst_leak = max(worst_leak, res["leakage"])
    verdict(6, worst_res <= 1e-9 and worst_leak <= 1e-12,
            f"max residual {worst_res:.1e} (tol 1e-9), max mass outside H_d {worst_leak:.1e}, "
            f"50 frames")


def test_criterion_07_sampling_fidelity():
    g = np.random.default_rng(107)
    A = g.normal(size=(8, 3))
    X = np.linalg.qr(A)[0]
    dist = exact_distribution(A)
    shots, t0, parts, ok = 100_000, time.perf_counter(), [], True
    for name, masks in (("classical", classical_dpp_sample(X, shots, 11)),
                        ("quantum", quantum_det_sample(X, shots, 12))):
        counts = empirical(masks, 8, 3)
        tv = tv_distance(counts, dist.probs)
        p = chi_square(counts, dist.probs)["p_value"]
        ok &= tv <= 0.015 and p > 0.001
        parts.append(f"{name} TV={tv:.4f} p={p:.3f}")
    secs = time.perf_counter() - t0
    verdict(7, ok and secs < 300, f"n=8 d=3 1e5 shots: {', '.join(parts)}, {secs:.1f} s")


def test_criterion_08_compound_direct_sum():
    g = np.random.default_rng(108)
    worst_sector = worst_mult = 0.0
    for method in ("pyramid", "csd"):
        for n in range(1, 7):
            U = random_orthogonal(g, n)
            if method == "csd":
                U = pad_orthogonal(U)
            dec = decompose(U, method)
            for k in range(1, U.shape[0] + 1):
                worst_sector = max(worst_sector, np.max(np.abs(givens_sector_unitary(dec, k)
                                                               - compound_brute(U, k))))
    for n in range(1, 7):
        A, B = g.normal(size=(n, n)), g.normal(size=(n, n))
        for k in range(1, n + 1):
            worst_mult = max(worst_mult, np.max(np.abs(compound(A @ B, k)
                                                       - compound(A, k) @ compound(B, k))))
    verdict(8, worst_sector <= 1e-9 and worst_mult <= 1e-10,
            f"sector vs compound {worst_sector:.1e} (tol 1e-9); multiplicativity {worst_mult:.1e} "
            f"(tol 1e-10)")


def test_criterion_09_subspace_sve():
    g = np.random.default_rng(109)
    tol = 2 * 2 * np.pi / 2 ** 8
    spectra = ([0.9, 0.7, 0.4, 0.2], [1.0, 0.8, 0.5, 0.1], [0.95, 0.6, 0.6, 0.3])
    worst, count = 1.0, 0
    for r, sig in enumerate(spectra):
        A = random_orthogonal(g, 4) @ np.diag(sig) @ random_orthogonal(g, 4).T
        for k in (1, 2, 3, 4):
            for S, theta in subspace_sve(A, k, 8, 1, 0)["truth"].items():
                assert abs(np.cos(theta) - np.prod([sig[i] for i in range(4) if S >> i & 1])) < 1e-9
                res = subspace_sve(A, k, 8, 100, seed=1000 * r + S, weights={S: 1.0})
                worst = min(worst, success_rate(res, tol))
                count += 1
    verdict(9, worst >= 0.8,
            f"worst success rate {worst:.2f} over {count} (matrix, S) pairs x 100 runs, "
            f"t=8, tol {tol:.4f} (need >= 0.80)")


def test_criterion_10_tda():
    g = np.random.default_rng(110)
    d2 = diag = 0
    emb = 0.0
    for r in range(20):
        n = int(g.integers(1, 11))
        C = tda.random_complex(n, seed=int(g.integers(2 ** 31)))
        d2 = max(d2, tda.boundary_squared_max(C))
        diag += tda.laplacian_diagonal_check(C)
        emb = max(emb, tda.embedding_check(C))
    hollow = tda.explicit(3, [[1, 2], [2, 3], [1, 3]], close=True)
    b_hollow = tda.betti_numbers(hollow)["betti"]
    b_full = tda.betti_numbers(tda.complete(3))["betti"]
    ok = d2 == 0 and diag == 0 and emb <= 1e-12 and b_hollow == [1, 1] and b_full == [1, 0, 0]
    verdict(10, ok, f"max |d^2| = {d2}, diagonal mismatches {diag}, embedding residual {emb:.1e}, "
                    f"Betti hollow {b_hollow} complete(3) {b_full}")


def test_criterion_11_cli_determinism(tmp_path):
    g = np.random.default_rng(111)
    A = tmp_path / "A.txt"
    np.savetxt(A, g.normal(size=(6, 3)))
    B = tmp_path / "B.txt"
    np.savetxt(B, np.diag([0.9, 0.5, 0.3]))
    Q = tmp_path / "Q.txt"
    np.savetxt(Q, random_orthogonal(g, 5))
    cx = tmp_path / "c.json"
    cx.write_text(json.dumps({"n": 4, "simplices": [[1, 2, 3], [3, 4]]}))
    commands = [
        ["detsample", "--matrix", str(A), "--shots", "20000", "--seed", "5"],
        ["decompose", "--matrix", str(Q), "--method", "csd"],
        ["decompose", "--matrix", str(Q)],
        ["loader", "--values", "0.5,0.5,0.5,0.5", "--mode", "log", "--verify"],
        ["sve", "--matrix", str(B), "--k", "2", "--shots", "2000", "--seed", "6"],
        ["tda", "--complex", str(cx), "--close", "--betti", "--verify-embedding"],
        ["verify", "--suite", "circuits", "--max-n", "4", "--seed", "7"],
        ["bench", "--suite", "sampling", "--n", "6", "--shots", "5000", "--seed", "8"],
    ]
    out = tmp_path / "r.json"
    bad = []
    for argv in commands:
        texts = set()
        for threads in ("1", "3", "8", "1"):
            assert run(argv + ["--threads", threads, "--out", str(out)]) == 0
            r = json.loads(out.read_bytes())
            del r["timing"]
            texts.add(json.dumps(r, sort_keys=True))
        if len(texts) != 1:
            bad.append(argv[0])
    # separate processes, stdout bytes without the timing key
    procs = [subprocess.run([sys.executable, "-m", "subspace_states", *commands[0], "--threads", t],
                            capture_output=True, check=True).stdout for t in ("1", "4")]
    stripped = [json.dumps({k: v for k, v in json.loads(p).items() if k != "timing"}) for p in procs]
    if stripped[0] != stripped[1]:
        bad.append("detsample (subprocess)")
    verdict(11, not bad, f"{len(commands)} subcommands x threads 1/3/8/1 plus two processes; "
                         f"non-identical: {bad or 'none'}")
