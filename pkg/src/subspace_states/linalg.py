"""Exact real linear algebra primitives.

Subsets of ``[n]`` are plain Python ints used as bitmasks, position 1 being the
lowest bit.  Within a fixed weight, subsets are ordered by ascending mask value
(colexicographic order); sector indexing, compound-matrix indexing and sample
reports all use this one order.
"""
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from . import limits
from .errors import DegenerateInput, InvalidArgument

MAX_QUBITS = 63
FRAME_TOL = 1e-10


# ---------------------------------------------------------------- subsets

def subset_mask(indices, n: int) -> int:
    """Bitmask of the 1-indexed positions ``indices`` within ``[n]``."""
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidArgument(f"n must be in [1, {MAX_QUBITS}], got {n}")
    mask = 0
    for i in indices:
        i = int(i)
        if not 1 <= i <= n:
            raise InvalidArgument(f"position {i} outside [1, {n}]")
        if mask >> (i - 1) & 1:
            raise InvalidArgument(f"position {i} repeated")
        mask |= 1 << (i - 1)
    return mask


def subset_indices(mask: int) -> tuple:
    """Ascending 1-indexed positions of the set bits."""
    out = []
    pos = 1
    while mask:
        if mask & 1:
            out.append(pos)
        mask >>= 1
        pos += 1
    return tuple(out)


def weight(mask: int) -> int:
    return int(mask).bit_count()


def rank_subset(mask: int, n: int, d: int) -> int:
    """Colex rank of a weight-``d`` subset: sum of C(p_t, t) over its sorted 0-based positions."""
    mask = int(mask)
    if mask >> n:
        raise InvalidArgument(f"mask {mask:#x} has bits above position {n}")
    if weight(mask) != d:
        raise InvalidArgument(f"subset has weight {weight(mask)}, expected {d}")
    r = 0
    t = 1
    pos = 0
    while mask:
        if mask & 1:
            r += comb(pos, t)
            t += 1
        mask >>= 1
        pos += 1
    return r


def unrank_subset(r: int, n: int, d: int) -> int:
    """Inverse of :func:`rank_subset`."""
    if not 0 <= r < comb(n, d):
        raise InvalidArgument(f"rank {r} outside [0, C({n},{d}))")
    mask = 0
    for t in range(d, 0, -1):
        # largest position p with C(p, t) <= r
        p = t - 1
        while comb(p + 1, t) <= r:
            p += 1
        r -= comb(p, t)
        mask |= 1 << p
    return mask


@lru_cache(maxsize=256)
def _sector_masks(n: int, d: int) -> np.ndarray:
    masks = np.fromiter((sum(1 << p for p in c) for c in combinations(range(n), d)),
                        dtype=np.int64, count=comb(n, d))
    masks.sort()
    masks.setflags(write=False)
    return masks


def sector_masks(n: int, d: int) -> np.ndarray:
    """All weight-``d`` masks of ``[n]`` in rank order (read-only int64 array)."""
    if not (0 <= d <= n <= MAX_QUBITS):
        raise InvalidArgument(f"need 0 <= d <= n <= {MAX_QUBITS}, got n={n}, d={d}")
    limits.require("MAX_SECTOR_DIM", comb(n, d), f"C({n},{d})")
    return _sector_masks(n, d)


def mask_positions(masks: np.ndarray, n: int, d: int) -> np.ndarray:
    """0-based ascending positions of the set bits, shape (len(masks), d)."""
    masks = np.asarray(masks, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    return np.nonzero(bits)[1].reshape(len(masks), d)


def format_subset(mask: int) -> str:
    """Report key for a subset: comma-separated sorted positions, e.g. ``"1,3"``."""
    return ",".join(str(i) for i in subset_indices(mask))


# ---------------------------------------------------------------- frames

def check_frame(X, tol: float = FRAME_TOL) -> np.ndarray:
    """Return ``X`` as a float array after checking XᵀX = I within ``tol``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    if not 1 <= d <= n:
        raise InvalidArgument(f"frame must be n x d with n >= d >= 1, got {X.shape}")
    err = np.max(np.abs(X.T @ X - np.eye(d)))
    if err > tol:
        raise InvalidArgument(f"columns are not orthonormal (max |XᵀX - I| = {err:.2e})")
    return X


def orthogonalize(A) -> np.ndarray:
    """Orthonormal frame with the same column space as ``A``.

    Householder QR with the diagonal of R made nonnegative, so the result is
    deterministic for a given input.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    n, d = A.shape
    if d == 0 or n < d:
        raise DegenerateInput(f"cannot orthogonalize a {n}x{d} matrix: needs n >= d >= 1")
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > 1e-10 * s[0])) if s[0] > 0 else 0
    if rank < d:
        raise DegenerateInput(f"rank-deficient input: numerical rank {rank} < {d} columns")
    Q, R = np.linalg.qr(A)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs


def givens_matrix(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """Givens rotation G(i, j, θ) on 1-indexed coordinates i < j.

    ``G e_i = cos θ e_i + sin θ e_j``, which is the action of RBS_ij(θ) on unary
    states.
    """
    if i > j:
        i, j, theta = j, i, -theta
    if not 1 <= i < j <= n:
        raise InvalidArgument(f"need 1 <= i < j <= n, got ({i}, {j}) with n={n}")
    G = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    a, b = i - 1, j - 1
    G[a, a] = G[b, b] = c
    G[b, a] = s
    G[a, b] = -s
    return G


# ---------------------------------------------------------------- determinants

def det_batch(M: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices (closed forms up to 3x3, LU beyond)."""
    M = np.asarray(M)
    d = M.shape[-1]
    if d == 0:
        return np.ones(M.shape[:-2], dtype=M.dtype)
    if d == 1:
        return M[..., 0, 0].copy()
    if d == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    if d == 3:
        return (M[..., 0, 0] * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
                - M[..., 0, 1] * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
                + M[..., 0, 2] * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0]))
    return np.linalg.det(M)


def subset_determinant(X, mask: int) -> float:
    """det(X_S): rows of ``X`` restricted to ``S`` in ascending order."""
    X = np.asarray(X)
    n, d = X.shape
    if weight(mask) != d or int(mask) >> n:
        raise InvalidArgument(f"subset {format_subset(mask)} is not a weight-{d} subset of [{n}]")
    rows = [i - 1 for i in subset_indices(mask)]
    return det_batch(X[rows])[()]


def subset_determinants(X, masks=None) -> np.ndarray:
    """det(X_S) for every mask in ``masks`` (default: the whole weight-d sector)."""
    X = np.asarray(X)
    n, d = X.shape
    if masks is None:
        masks = sector_masks(n, d)
    pos = mask_positions(masks, n, d)
    out = np.empty(len(pos), dtype=np.result_type(X.dtype, float))
    step = max(1, 2_000_000 // max(1, d * d))
    for s in range(0, len(pos), step):
        out[s:s + step] = det_batch(X[pos[s:s + step]])
    return out


def cauchy_binet_check(X, Y) -> float:
    """Σ_{|S|=d} det(X_S) det(Y_S); equals det(XᵀY) by Cauchy–Binet."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise InvalidArgument(f"frame shapes differ: {X.shape} vs {Y.shape}")
    return float(np.dot(subset_determinants(X), subset_determinants(Y)))


# ---------------------------------------------------------------- spherical angles

def spherical_angles(x) -> np.ndarray:
    """Angles θ_1..θ_{n-1} with x_1 = cos θ_1, x_2 = sin θ_1 cos θ_2, ...

    θ_i ∈ [0, π] for i < n-1 and θ_{n-1} ∈ [0, 2π).  Once the remaining tail of
    ``x`` is zero the later angles are 0.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise InvalidArgument("need a vector with at least 2 components")
    if abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise InvalidArgument(f"vector is not unit norm (|x| = {np.linalg.norm(x):.12g})")
    n = len(x)
    # tail[i] = |x[i:]|
    tail = np.sqrt(np.cumsum((x * x)[::-1])[::-1])
    thetas = np.zeros(n - 1)
    for i in range(n - 2):
        if tail[i] == 0.0:
            break
        thetas[i] = np.arctan2(tail[i + 1], x[i])
    last = np.arctan2(x[n - 1], x[n - 2])
    thetas[n - 2] = last + 2 * np.pi if last < 0 else last
    return thetas


def angles_to_vector(thetas) -> np.ndarray:
    """Forward map of :func:`spherical_angles`."""
    thetas = np.asarray(thetas, dtype=float)
    n = len(thetas) + 1
    x = np.empty(n)
    prod = 1.0
    for i, t in enumerate(thetas):
        x[i] = np.cos(t) * prod
        prod *= np.sin(t)
    x[n - 1] = prod
    return x


# ---------------------------------------------------------------- compound matrices

def compound(A, k: int) -> np.ndarray:
    """k-th compound matrix: entry (I, J) = det(A[I, J]) over ranked k-subsets.

    Rectangular m×n input gives a C(m,k)×C(n,k) matrix.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise InvalidArgument(f"compound needs a matrix, got shape {A.shape}")
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise InvalidArgument(f"need 1 <= k <= min(m, n), got k={k}, shape {A.shape}")
    rdim, cdim = comb(m, k), comb(n, k)
    limits.require("MAX_COMPOUND_DIM", max(rdim, cdim), f"C({max(m, n)},{k})")
    rpos = mask_positions(sector_masks(m, k), m, k)
    cpos = mask_positions(sector_masks(n, k), n, k)
    out = np.empty((rdim, cdim), dtype=np.result_type(A.dtype, float))
    rows_per_chunk = max(1, 1_000_000 // (cdim * k * k))
    for s in range(0, rdim, rows_per_chunk):
        rows = A[rpos[s:s + rows_per_chunk]]                   # (r, k, n)
        blocks = rows[:, :, cpos]                               # (r, k, cdim, k)
        out[s:s + rows_per_chunk] = det_batch(np.moveaxis(blocks, 2, 1))
    return out


# ---------------------------------------------------------------- ingestion

def read_matrix(path) -> np.ndarray:
    """Whitespace-delimited matrix, one row per line; optional first line ``# n d``."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    header = None
    if lines and lines[0].lstrip().startswith("#"):
        parts = lines[0].lstrip("# \t").split()
        if len(parts) == 2 and all(p.isdigit() for p in parts):
            header = (int(parts[0]), int(parts[1]))
    rows = [ln.split() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InvalidArgument(f"{path}: no matrix rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidArgument(f"{path}: ragged rows (widths {sorted(widths)})")
    M = np.array([[float(v) for v in r] for r in rows])
    if header is not None and M.shape != header:
        raise InvalidArgument(f"{path}: header says {header}, data is {M.shape}")
    return M


def write_matrix(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"# {M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
