"""Command-line entry point.

Every command writes one JSON report::

    {"schema": 1, "command": ..., "config": {...}, "result": {...}, "timing": {...}}

``config`` holds the parsed arguments that determine the result; thread
count and wall-clock numbers go under ``timing`` so that two runs with the
same config produce identical reports once ``timing`` is dropped.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, rng, tda
from .circuit import circuit_unitary, depth, gate_counts
from .clifford import gamma_dense, loader, loader_depth_report, pad_vector
from .compound_sve import subspace_sve, sve_summary
from .dpp import sampler_report
from .errors import DegenerateInput, InvalidArgument, InvalidOperation, ResourceLimit
from .givens import decompose, pad_orthogonal, reconstruction_residual
from .linalg import format_subset, orthogonalize, read_matrix
from .verify import format_table, run_suite

SCHEMA = 1

_ERRORS = {
    InvalidArgument: "invalid-argument",
    DegenerateInput: "degenerate-input",
    InvalidOperation: "invalid-operation",
    ResourceLimit: "resource-limit",
}


# ---------------------------------------------------------------- commands

def _detsample(a) -> dict:
    A = read_matrix(a.matrix)
    methods = ("exact", "classical", "quantum") if a.sampler == "all" else (a.sampler,)
    report, timing = sampler_report(A, a.shots, a.seed, a.loader, a.threads, methods)
    return {"result": report, "timing": timing}


def _decompose(a) -> dict:
    U = read_matrix(a.matrix)
    n, d = U.shape
    if a.method == "csd":
        if n != d:
            raise InvalidArgument(f"sine-cosine decomposition needs a square matrix, got {n}x{d}")
        U = pad_orthogonal(U)
    dec = decompose(U, a.method)
    circ = dec.circuit()
    return {"result": {
        "n": n, "d": d, "method": a.method, "padded_to": dec.n,
        "rotations": len(dec.rotations),
        "free_parameters": n * d - d * (d + 1) // 2,
        "depth": depth(circ), "gates": gate_counts(circ),
        "reconstruction_residual": reconstruction_residual(dec, U),
        "decomposition": dec.to_dict(),
    }}


def _read_vector(a) -> np.ndarray:
    if a.values is not None:
        x = np.array([float(v) for v in a.values.split(",")])
    else:
        x = read_matrix(a.vector).ravel()
    if a.normalize:
        nrm = np.linalg.norm(x)
        if nrm == 0:
            raise DegenerateInput("cannot normalize the zero vector")
        x = x / nrm
    return x


def _loader(a) -> dict:
    x = _read_vector(a)
    if a.mode == "log":
        x = pad_vector(x)
    c = loader(x, a.mode)
    rep = loader_depth_report(x, a.mode)
    if a.verify:
        rep["gamma_residual"] = float(np.max(np.abs(circuit_unitary(c) - gamma_dense(x))))
    rep["circuit"] = c.to_dict()
    return {"result": rep}


def _sve(a) -> dict:
    A = read_matrix(a.matrix)
    if a.normalize:
        A = A / np.linalg.norm(A, 2)
    res = subspace_sve(A, a.k, a.bits, a.shots, a.seed, mode=a.mode, source=a.source,
                       threads=a.threads)
    M = 1 << a.bits
    joint = res["joint"]
    peaks = {}
    for p, m in zip(*np.nonzero(joint > a.min_prob)):
        key = "outside" if p >= len(res["labels"]) else format_subset(res["labels"][p])
        peaks.setdefault(key, []).append([int(m), float(joint[p, m])])
    return {"result": {
        "mode": a.mode, "k": a.k, "bits": a.bits, "shots": a.shots, "seed": a.seed,
        "register_size": M,
        "subsets": sve_summary(res),
        "distribution": peaks,
    }}


def _tda(a) -> dict:
    with open(a.complex) as fh:
        C = tda.from_json(fh.read(), close=a.close)
    out = {"n": C.n, "simplices": len(C.simplices) - 1, "rank": C.rank,
           "boundary_squared_max": tda.boundary_squared_max(C),
           "laplacian_diagonal_mismatches": tda.laplacian_diagonal_check(C),
           "laplacian_offdiagonal_values": tda.laplacian_offdiagonal_values(C)}
    if a.betti:
        out["betti"] = tda.betti_numbers(C)
    if a.verify_embedding:
        out["embedding_residual"] = tda.embedding_check(C)
    return {"result": out}


def _verify(a) -> dict:
    rows = run_suite(a.suite, a.max_n, a.seed)
    print(format_table(rows), file=sys.stderr)
    return {"result": {"checks": rows, "passed": all(r["passed"] for r in rows)}}


def _bench(a) -> dict:
    g = rng.generator(a.seed)
    result, timing = {}, {}
    if a.suite in ("loaders", "all"):
        x = g.normal(size=a.n)
        x /= np.linalg.norm(x)
        for mode in ("linear", "log"):
            t0 = time.perf_counter()
            rep = loader_depth_report(pad_vector(x) if mode == "log" else x, mode)
            timing[f"loader-{mode}"] = time.perf_counter() - t0
            result[f"loader-{mode}"] = rep
    if a.suite in ("decompose", "all"):
        U = orthogonalize(g.normal(size=(a.n, a.n)))
        for method in ("pyramid", "csd"):
            t0 = time.perf_counter()
            V = pad_orthogonal(U) if method == "csd" else U
            dec = decompose(V, method)
            timing[f"decompose-{method}"] = time.perf_counter() - t0
            result[f"decompose-{method}"] = {"n": dec.n, "rotations": len(dec.rotations),
                                             "depth": depth(dec.circuit()),
                                             "residual": reconstruction_residual(dec, V)}
    if a.suite in ("sampling", "all"):
        d = max(1, a.n // 2)
        A = g.normal(size=(a.n, d))
        rep, t = sampler_report(A, a.shots, a.seed, "log", a.threads)
        result["sampling"] = {k: {"tv_distance": v["tv_distance"],
                                  "chi_square_p": v["chi_square"]["p_value"]}
                              for k, v in rep["samplers"].items()}
        timing["sampling"] = t
    return {"result": result, "timing": timing}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subspace-states",
                                description="Subspace states: determinant sampling, Givens "
                                            "circuits, Clifford loaders, SVE and topology.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, shots=None):
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
        if shots is not None:
            sp.add_argument("--shots", type=int, default=shots)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")

    sp = sub.add_parser("detsample", help="sample subsets with probability det(A_S)²/det(AᵀA)")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--sampler", choices=("exact", "classical", "quantum", "all"), default="all")
    sp.add_argument("--loader", choices=("linear", "log"), default="log")
    common(sp, shots=1000)
    sp.set_defaults(func=_detsample)

    sp = sub.add_parser("decompose", help="Givens-rotation circuit for an orthonormal frame")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--method", choices=("pyramid", "csd"), default="pyramid")
    common(sp, seed=False)
    sp.set_defaults(func=_decompose)

    sp = sub.add_parser("loader", help="Clifford loader circuit for a unit vector")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--vector")
    src.add_argument("--values", help="comma-separated entries")
    sp.add_argument("--mode", choices=("linear", "log"), default="log")
    sp.add_argument("--normalize", action="store_true")
    sp.add_argument("--verify", action="store_true", help="compare with the dense Γ(x)")
    common(sp, seed=False)
    sp.set_defaults(func=_loader)

    sp = sub.add_parser("sve", help="subspace singular value estimation by phase estimation")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--bits", type=int, default=8)
    sp.add_argument("--mode", choices=("singular", "eigen"), default="singular")
    sp.add_argument("--source", choices=("givens", "compound"), default="givens")
    sp.add_argument("--normalize", action="store_true", help="scale A to spectral norm 1")
    sp.add_argument("--min-prob", type=float, default=1e-3,
                    help="smallest joint probability listed in the distribution")
    common(sp, shots=1000)
    sp.set_defaults(func=_sve)

    sp = sub.add_parser("tda", help="boundary, Dirac and Laplacian checks and Betti numbers")
    sp.add_argument("--complex", required=True, help='JSON {"n": .., "simplices": [[1,2], ..]}')
    sp.add_argument("--close", action="store_true", help="take the downward closure of the input")
    sp.add_argument("--betti", action="store_true")
    sp.add_argument("--verify-embedding", action="store_true")
    common(sp, seed=False)
    sp.set_defaults(func=_tda)

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--suite", choices=("all", "circuits", "states", "loaders", "compound", "tda"),
                    default="all")
    sp.add_argument("--max-n", type=int, default=6)
    common(sp)
    sp.set_defaults(func=_verify)

    sp = sub.add_parser("bench", help="depth, gate count and timing benchmarks")
    sp.add_argument("--suite", choices=("loaders", "decompose", "sampling", "all"), default="all")
    sp.add_argument("--n", type=int, default=8)
    common(sp, shots=10000)
    sp.set_defaults(func=_bench)
    return p


_RUNTIME_ONLY = ("func", "threads")


def _emit(report: dict, out) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k not in _RUNTIME_ONLY}
    report = {"schema": SCHEMA, "command": args.command, "config": config}
    t0 = time.perf_counter()
    try:
        if getattr(args, "threads", 1) < 1:
            raise InvalidArgument(f"--threads must be >= 1, got {args.threads}")
        body = args.func(args)
    except (InvalidArgument, DegenerateInput, InvalidOperation, ResourceLimit) as e:
        kind = next(v for k, v in _ERRORS.items() if isinstance(e, k))
        report["error"] = {"type": kind, "message": str(e)}
        _emit(report, args.out)
        return 1
    except (OSError, json.JSONDecodeError) as e:
        report["error"] = {"type": "io-error", "message": str(e)}
        _emit(report, args.out)
        return 1
    report["result"] = body["result"]
    report["timing"] = {"threads": args.threads, "seconds": time.perf_counter() - t0,
                        **({"parts": body["timing"]} if body.get("timing") else {})}
    _emit(report, args.out)
    if args.command == "verify" and not body["result"]["passed"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())
