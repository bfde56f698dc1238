"""Independent reference computations for the tests.

Operators are built with Kronecker products (qubit 1 = leftmost factor) and
matrix exponentials, determinants with the Leibniz formula, compounds and
subset orders by explicit enumeration.  None of this touches the package's
kernels.
"""
from functools import reduce
from itertools import combinations, permutations

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2)
X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.diag([1.0, -1.0])
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])   # |0><1|
RAISE = LOWER.T                               # |1><0|


def kron_all(ops):
    return reduce(np.kron, ops, np.eye(1))


def kron_to_mask(M, n):
    """Reorder a Kronecker-ordered operator into mask indexing (qubit q = bit q-1)."""
    perm = np.array([int(format(m, f"0{n}b")[::-1], 2) for m in range(1 << n)])
    # kron index of qubit pattern whose mask is m
    return M[np.ix_(perm, perm)]


def fbs_expm(n, i, j, theta):
    """exp(θ K) with K the Jordan-Wigner hopping term between qubits i < j."""
    def string(first, last):
        ops = [I2] * n
        ops[i - 1], ops[j - 1] = first, last
        for q in range(i + 1, j):
            ops[q - 1] = Z
        return kron_all(ops)
    K = string(LOWER, RAISE) - string(RAISE, LOWER)
    return kron_to_mask(expm(theta * K), n)


def rbs_expm(n, i, j, theta):
    def pair(first, last):
        ops = [I2] * n
        ops[i - 1], ops[j - 1] = first, last
        return kron_all(ops)
    return kron_to_mask(expm(theta * (pair(LOWER, RAISE) - pair(RAISE, LOWER))), n)


def gamma_kron(x):
    n = len(x)
    G = np.zeros((1 << n, 1 << n))
    for i, xi in enumerate(x, start=1):
        G += xi * kron_all([Z] * (i - 1) + [X] + [I2] * (n - i))
    return kron_to_mask(G, n)


def perm_sign(p):
    sign, seen = 1, [False] * len(p)
    for s in range(len(p)):
        if seen[s]:
            continue
        length, t = 0, s
        while not seen[t]:
            seen[t] = True
            t = p[t]
            length += 1
        sign *= (-1) ** (length - 1)
    return sign


def det_leibniz(M):
    M = np.asarray(M)
    d = M.shape[0]
    if d == 0:
        return 1.0
    return sum(perm_sign(p) * np.prod([M[r, p[r]] for r in range(d)])
               for p in permutations(range(d)))


def colex_subsets(n, d):
    """Weight-d subsets of 1..n (tuples) in ascending bitmask order."""
    return sorted(combinations(range(1, n + 1), d), key=lambda s: sum(1 << (i - 1) for i in s))


def mask_of(s):
    return sum(1 << (i - 1) for i in s)


def compound_brute(A, k):
    A = np.asarray(A)
    rows, cols = colex_subsets(A.shape[0], k), colex_subsets(A.shape[1], k)
    det = det_leibniz if k <= 4 else np.linalg.det
    return np.array([[det(A[np.ix_([r - 1 for r in R], [c - 1 for c in C])])
                      for C in cols] for R in rows])


def minors_brute(X):
    n, d = X.shape
    return np.array([det_leibniz(X[[i - 1 for i in S]]) for S in colex_subsets(n, d)])


def givens_ref(n, i, j, theta):
    """Rotation taking e_i to cos θ e_i + sin θ e_j."""
    G = np.eye(n)
    G[i - 1, i - 1] = G[j - 1, j - 1] = np.cos(theta)
    G[j - 1, i - 1] = np.sin(theta)
    G[i - 1, j - 1] = -np.sin(theta)
    return G


def random_orthogonal(g, n):
    Q, R = np.linalg.qr(g.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))


def random_frame(g, n, d):
    return random_orthogonal(g, n)[:, :d]


def dpp_probs_brute(A):
    n, d = A.shape
    gram = det_leibniz(A.T @ A)
    return np.array([det_leibniz(A[[i - 1 for i in S]]) ** 2 / gram for S in colex_subsets(n, d)])
