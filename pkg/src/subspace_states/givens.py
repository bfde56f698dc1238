"""Givens-rotation compilation of orthogonal matrices and frames.

A decomposition stores rotations in *product* order: the matrix is
``G(r_0) G(r_1) ... G(r_{m-1}) I_{n,d} diag(signs)``.  The circuit applies the
last factor first, so its gate order is the reverse of ``rotations``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cossin

from .circuit import Circuit, Gate
from .errors import DegenerateInput, InvalidArgument
from .linalg import check_frame, givens_matrix, subset_indices
from .simulator import SectorState, run


@dataclass(frozen=True)
class GivensDecomposition:
    n: int
    rotations: tuple  # (i, j, theta) with i < j, product order
    signs: tuple      # one per column
    method: str = ""

    @property
    def d(self) -> int:
        return len(self.signs)

    def matrix(self) -> np.ndarray:
        M = np.eye(self.n)[:, :self.d] * np.asarray(self.signs, dtype=float)
        for i, j, th in reversed(self.rotations):
            M = givens_matrix(self.n, i, j, th) @ M
        return M

    def circuit(self) -> Circuit:
        gates = tuple(Gate("RBS" if j - i == 1 else "FBS", (i, j), th)
                      for i, j, th in reversed(self.rotations))
        return Circuit(self.n, gates, f"givens-{self.method}" if self.method else "givens")

    def to_dict(self) -> dict:
        return {"n": self.n,
                "rotations": [[i, j, th] for i, j, th in self.rotations],
                "signs": list(self.signs)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, method: str = "") -> "GivensDecomposition":
        rots = []
        for r in d["rotations"]:
            i, j, th = int(r[0]), int(r[1]), float(r[2])
            if i > j:
                i, j, th = j, i, -th
            rots.append((i, j, th))
        return cls(int(d["n"]), tuple(rots), tuple(int(s) for s in d["signs"]), method)


def _as_frame(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    n, d = U.shape
    s = np.linalg.svd(U, compute_uv=False)
    if d > n or s[-1] <= 1e-10 * s[0]:
        raise DegenerateInput(f"{n}x{d} input is rank-deficient; cannot compile {d} columns")
    return check_frame(U)


def pyramid_decompose(U, drop_identity: bool = True) -> GivensDecomposition:
    """Adjacent-row Givens elimination of an n×d frame.

    Column c is cleared from the bottom up with rotations on rows (r−1, r).
    Exactly-zero angles are dropped unless ``drop_identity`` is False.
    """
    V = _as_frame(U).copy()
    n, d = V.shape
    rots = []
    for c in range(min(d, n - 1)):
        for r in range(n - 1, c, -1):
            a, b = V[r - 1], V[r]
            phi = float(np.arctan2(b[c], a[c]))
            cs, sn = np.cos(phi), np.sin(phi)
            V[r - 1], V[r] = cs * a + sn * b, -sn * a + cs * b
            V[r, c] = 0.0
            if phi != 0.0 or not drop_identity:
                rots.append((r, r + 1, phi))
    signs = tuple(1 if V[c, c] >= 0 else -1 for c in range(d))
    return GivensDecomposition(n, tuple(rots), signs, "pyramid")


def _push_signs(rots, dvec) -> list:
    # D · G(i,j,θ) = G(i,j, θ d_i d_j) · D
    return [(i, j, float(th * dvec[i - 1] * dvec[j - 1])) for i, j, th in rots]


def _csd(U: np.ndarray, offset: int):
    n = U.shape[0]
    if n == 1:
        return [], [1 if U[0, 0] >= 0 else -1]
    h = n // 2
    (u1, u2), theta, (v1, v2) = cossin(U, p=h, q=h, separate=True)
    ra1, da1 = _csd(u1, offset)
    ra2, da2 = _csd(u2, offset + h)
    rb1, db1 = _csd(v1, offset)
    rb2, db2 = _csd(v2, offset + h)
    da = np.array(da1 + da2)
    db = np.array(db1 + db2)
    middle = [(offset + k + 1, offset + k + 1 + h, float(theta[k])) for k in range(h)]
    # U = RA·DA·M·RB·DB ; move DA to the right through M and RB
    local = lambda rots: [(i - offset, j - offset, th) for i, j, th in rots]
    shift = lambda rots: [(i + offset, j + offset, th) for i, j, th in rots]
    moved = shift(_push_signs(local(middle + rb1 + rb2), da))
    return ra1 + ra2 + moved, list((da * db).astype(int))


def sine_cosine_decompose(U) -> GivensDecomposition:
    """Recursive cosine-sine factorization of an n×n orthogonal matrix, n = 2^m.

    Each level contributes n/2 rotations G(i, i+n/2, θ_i); the butterfly halves
    recurse down to 1×1 signs.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidArgument(f"sine-cosine decomposition needs a square matrix, got {U.shape}")
    n = U.shape[0]
    if n & (n - 1):
        raise InvalidArgument(f"size {n} is not a power of 2; pad the matrix first")
    U = check_frame(U)
    rots, signs = _csd(U, 0)
    return GivensDecomposition(n, tuple(rots), tuple(int(s) for s in signs), "csd")


def decompose(U, method: str = "pyramid") -> GivensDecomposition:
    if method == "pyramid":
        return pyramid_decompose(U)
    if method == "csd":
        return sine_cosine_decompose(U)
    raise InvalidArgument(f"unknown decomposition method {method!r} (pyramid|csd)")


def reconstruction_residual(dec: GivensDecomposition, U) -> float:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    return float(np.max(np.abs(dec.matrix() - U)))


def pad_orthogonal(U) -> np.ndarray:
    """U ⊕ I up to the next power-of-2 size."""
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    m = 1 << (n - 1).bit_length()
    P = np.eye(m)
    P[:n, :n] = U
    return P


def prepare_via_givens(U, S: int, method: str = "pyramid",
                       dec: GivensDecomposition | None = None) -> SectorState:
    """Run the Givens circuit of ``U`` on |S⟩, giving |Col(U_S)⟩.

    The decomposition's residual column signs are folded back in as the
    product of signs over S, so the result equals the determinant state
    exactly rather than up to sign.  For the sine-cosine method a size that
    is not a power of 2 is padded with an identity block; the weight-d masks
    inside [n] are a prefix of the padded sector order, so the state is cut
    back to that prefix.
    """
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    if dec is None:
        dec = decompose(pad_orthogonal(U) if method == "csd" else U, method)
    if dec.d != dec.n or dec.n < n:
        raise InvalidArgument("Givens state preparation needs a square orthogonal matrix")
    out = run(SectorState.basis(dec.n, S), dec.circuit())
    sign = 1
    for s in subset_indices(S):
        sign *= dec.signs[s - 1]
    amps = sign * out.amplitudes
    if dec.n > n:
        keep = len(SectorState.basis(n, S).amplitudes)
        leak = float(np.linalg.norm(amps[keep:]))
        if leak > 1e-9:
            raise InvalidArgument(f"padded circuit leaked {leak:.2e} outside the original qubits")
        return SectorState(n, out.d, amps[:keep])
    return SectorState(out.n, out.d, amps)
