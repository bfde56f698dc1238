"""Simplicial complexes, their Dirac operator and Laplacian, and Betti numbers.

Simplices are vertex bitmasks.  The basis always contains the empty simplex
(mask 0) and is ordered by (size, mask).  Orientation is ascending vertex
order, so deleting the j-th smallest vertex of x carries sign (−1)^{j−1}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import sparse

from . import limits, rng
from .circuit import circuit_unitary, depth, gate_counts
from .clifford import gamma_dense, log_depth_formula, log_loader, log_unloader
from .errors import InvalidArgument
from .linalg import format_subset, subset_indices, subset_mask

KERNEL_TOL = 1e-8


@dataclass(frozen=True)
class SimplicialComplex:
    n: int
    simplices: tuple   # masks, sorted by (size, mask), including 0

    @property
    def rank(self) -> int:
        return max(int(s).bit_count() for s in self.simplices) - 1

    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.simplices)}

    def of_size(self, size: int) -> list:
        return [s for s in self.simplices if s.bit_count() == size]

    def __contains__(self, mask) -> bool:
        return int(mask) in set(self.simplices)

    def to_dict(self) -> dict:
        return {"n": self.n, "simplices": [subset_indices(s) for s in self.simplices if s]}


def _finish(n: int, masks) -> SimplicialComplex:
    limits.require("MAX_COMPLEX_VERTICES", n, "complex vertices")
    masks = set(int(m) for m in masks) | {0}
    return SimplicialComplex(n, tuple(sorted(masks, key=lambda m: (m.bit_count(), m))))


def _faces(mask: int):
    m = mask
    while m:
        low = m & -m
        yield mask ^ low
        m ^= low


def downward_closure(masks) -> set:
    out = set()
    stack = [int(m) for m in masks]
    while stack:
        m = stack.pop()
        if m in out:
            continue
        out.add(m)
        stack.extend(f for f in _faces(m) if f not in out)
    return out


def complete(n: int) -> SimplicialComplex:
    """Every subset of [n]."""
    limits.require("MAX_COMPLEX_VERTICES", n, "complex vertices")
    return _finish(n, range(1 << n))


def clique(n: int, edges) -> SimplicialComplex:
    """Clique (flag) complex of a graph on vertices 1..n."""
    limits.require("MAX_COMPLEX_VERTICES", n, "complex vertices")
    nbr = [0] * (n + 1)
    for a, b in edges:
        a, b = int(a), int(b)
        if not (1 <= a <= n and 1 <= b <= n) or a == b:
            raise InvalidArgument(f"bad edge ({a}, {b}) for {n} vertices")
        nbr[a] |= 1 << (b - 1)
        nbr[b] |= 1 << (a - 1)
    found = {0}
    # grow cliques by adding a larger common neighbour
    frontier = [1 << (v - 1) for v in range(1, n + 1)]
    found.update(frontier)
    while frontier:
        nxt = []
        for c in frontier:
            common = (1 << n) - 1
            for v in subset_indices(c):
                common &= nbr[v]
            top = c.bit_length()
            common &= ~((1 << top) - 1)
            while common:
                low = common & -common
                nxt.append(c | low)
                common ^= low
        found.update(nxt)
        frontier = nxt
    return _finish(n, found)


def vietoris_rips(points, eps: float) -> SimplicialComplex:
    """Clique complex of the graph joining points at distance ≤ eps."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 1 and P.shape[1] > 1 and np.ndim(points) == 1:
        P = P.T
    n = P.shape[0]
    dist = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
    edges = [(a + 1, b + 1) for a, b in combinations(range(n), 2) if dist[a, b] <= eps]
    return clique(n, edges)


def explicit(n: int, simplices, close: bool = False) -> SimplicialComplex:
    """Complex from a list of vertex lists; must be downward closed unless ``close``."""
    masks = set()
    for s in simplices:
        if len(set(s)) != len(s):
            raise InvalidArgument(f"simplex {list(s)} repeats a vertex")
        masks.add(subset_mask(s, n))
    if close:
        return _finish(n, downward_closure(masks))
    present = masks | {0}
    for m in sorted(masks, key=lambda m: (m.bit_count(), m)):
        for f in _faces(m):
            if f and f not in present:
                raise InvalidArgument(f"not downward closed: {{{format_subset(m)}}} is present "
                                      f"but its face {{{format_subset(f)}}} is not")
    return _finish(n, masks)


def from_dict(d: dict, close: bool = False) -> SimplicialComplex:
    try:
        n = int(d["n"])
        simplices = [list(map(int, s)) for s in d["simplices"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArgument(f"complex JSON needs 'n' and 'simplices': {e}") from None
    return explicit(n, simplices, close)


def from_json(text: str, close: bool = False) -> SimplicialComplex:
    return from_dict(json.loads(text), close)


def random_complex(n: int, seed: int, facets: int | None = None) -> SimplicialComplex:
    """Downward closure of a few random vertex sets."""
    g = rng.generator(seed)
    facets = facets if facets is not None else int(g.integers(1, n + 2))
    tops = []
    for _ in range(facets):
        size = int(g.integers(1, min(n, 5) + 1))
        tops.append(subset_mask((g.choice(n, size, replace=False) + 1).tolist(), n))
    return _finish(n, downward_closure(tops))


# ---------------------------------------------------------------- operators

def boundary_matrix(C: SimplicialComplex) -> sparse.csr_matrix:
    """d[y, x] = (−1)^{j−1} when y is x with its j-th smallest vertex removed."""
    idx = C.index()
    rows, cols, vals = [], [], []
    for x in C.simplices:
        for j, v in enumerate(subset_indices(x)):
            rows.append(idx[x ^ (1 << (v - 1))])
            cols.append(idx[x])
            vals.append(-1 if j % 2 else 1)
    N = len(C.simplices)
    return sparse.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(N, N))


def dirac_and_laplacian(C: SimplicialComplex) -> tuple:
    d = boundary_matrix(C)
    D = (d + d.T).tocsr()
    return D, (D @ D).tocsr()


def boundary_squared_max(C: SimplicialComplex) -> int:
    d = boundary_matrix(C)
    dd = d @ d
    return int(abs(dd).max()) if dd.nnz else 0


def laplacian_diagonal_check(C: SimplicialComplex) -> int:
    """Number of simplices where Δ(x,x) ≠ |x| + #{simplices one larger containing x}."""
    _, L = dirac_and_laplacian(C)
    diag = L.diagonal()
    present = set(C.simplices)
    bad = 0
    for i, x in enumerate(C.simplices):
        ext = sum(1 for v in range(C.n) if not x >> v & 1 and (x | 1 << v) in present)
        if diag[i] != x.bit_count() + ext:
            bad += 1
    return bad


def laplacian_offdiagonal_values(C: SimplicialComplex) -> list:
    """Distinct off-diagonal entries of Δ."""
    _, L = dirac_and_laplacian(C)
    L = L.tocoo()
    off = L.data[L.row != L.col]
    return sorted(set(int(v) for v in off))


def embedding_check(C: SimplicialComplex) -> float:
    """max |D(C) − (Σ_i Z^{i−1}⊗X⊗I)[C, C]| with the full operator from the loader algebra."""
    limits.require("MAX_UNITARY_QUBITS", C.n, "embedding qubits")
    G = np.sqrt(C.n) * gamma_dense(np.full(C.n, 1 / np.sqrt(C.n)))
    m = np.array(C.simplices)
    D, _ = dirac_and_laplacian(C)
    return float(np.max(np.abs(G[np.ix_(m, m)] - D.toarray())))


# ---------------------------------------------------------------- homology

def _kernel_dim(M: np.ndarray) -> int:
    if M.shape[0] == 0:
        return 0
    w = np.linalg.eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(np.abs(w) <= KERNEL_TOL * scale))


def _boundary_blocks(C: SimplicialComplex) -> list:
    """∂_p : C_p → C_{p−1} as dense integer blocks, p = 0 .. rank+1 (∂_0 hits ∅)."""
    d = boundary_matrix(C).toarray()
    sizes = np.array([s.bit_count() for s in C.simplices])
    blocks = []
    for p in range(C.rank + 2):
        blocks.append(d[np.ix_(sizes == p, sizes == p + 1)])
    return blocks  # blocks[p] maps size p+1 to size p, i.e. ∂_p on p-simplices


def betti_numbers(C: SimplicialComplex) -> dict:
    """β_p = dim ker Δ_p from Laplacian blocks, cross-checked with boundary ranks.

    Δ_p uses ∂_0 = 0 (ordinary homology); the block that keeps the map to ∅
    gives the reduced β̃₀ instead.
    """
    r = C.rank
    blocks = _boundary_blocks(C)
    sizes = [b.shape[1] for b in blocks]
    for p, s in enumerate(sizes):
        limits.require("MAX_LAPLACIAN_BLOCK", s, f"{p}-simplex count")
    lap = []
    for p in range(r + 1):
        down = blocks[p] if p > 0 else np.zeros((0, sizes[0]))
        up = blocks[p + 1]
        L = down.T @ down + up @ up.T
        lap.append(_kernel_dim(L.astype(float)))
    rank = [np.linalg.matrix_rank(b.astype(float)) if b.size else 0 for b in blocks]
    via_ranks = [int(sizes[p] - (rank[p] if p > 0 else 0) - rank[p + 1]) for p in range(r + 1)]
    L0 = blocks[0].T @ blocks[0] + blocks[1] @ blocks[1].T
    reduced0 = _kernel_dim(L0.astype(float)) if r >= 0 else 0
    return {"betti": lap, "betti_from_ranks": via_ranks,
           "agree": lap == via_ranks, "reduced_betti0": reduced0}


# ---------------------------------------------------------------- loader

def loader_block_encoding_depth(n: int) -> dict:
    """Log-depth loader of the uniform vector versus Γ(uniform) = D(complete)/√n."""
    if n < 2 or n & (n - 1) or n > 8:
        raise InvalidArgument(f"need n a power of 2 with 2 <= n <= 8, got {n}")
    x = np.full(n, 1 / np.sqrt(n))
    c = log_loader(x)
    U = circuit_unitary(c)
    G = gamma_dense(x)
    rep = {"n": n,
           "residual": float(np.max(np.abs(U - G))),
           "reflection_residual": float(np.max(np.abs(U @ U - np.eye(len(U))))),
           "depth": depth(c),
           "half_depth": depth(log_unloader(x)),
           "formula_depth": log_depth_formula(n),
           "gates": gate_counts(c),
           "gate_total": len(c)}
    rep["half_depth_matches_formula"] = rep["half_depth"] == rep["formula_depth"]
    return rep
