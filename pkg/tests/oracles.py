"""Brute-force oracles, written without the library's linear algebra.

Everything here is plain Python over small fields: exhaustive enumeration of
vectors and subspaces, and group cohomology from *unnormalized* inhomogeneous
cochains (functions G^n -> V) with schoolbook Gaussian elimination.  The
values these produce are frozen into the tests.
"""

from __future__ import annotations

import itertools


def all_vectors(n: int, p: int):
    return list(itertools.product(range(p), repeat=n))


def dot(u, v, p: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


def span_set(vectors, n: int, p: int) -> frozenset:
    """Every linear combination of ``vectors`` (as tuples)."""
    vectors = [tuple(v) for v in vectors]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(vectors)):
        out.add(tuple(sum(c * v[i] for c, v in zip(coeffs, vectors)) % p for i in range(n)))
    return frozenset(out) if vectors else frozenset({(0,) * n})


def annihilator_set(vectors, n: int, p: int) -> frozenset:
    return frozenset(w for w in all_vectors(n, p) if all(dot(w, v, p) == 0 for v in vectors))


def all_subspaces(n: int, p: int) -> set:
    """Every subspace of GF(p)^n as a frozenset of vectors."""
    out = {frozenset({(0,) * n})}
    frontier = set(out)
    vecs = all_vectors(n, p)
    while frontier:
        nxt = set()
        for S in frontier:
            for v in vecs:
                if v not in S:
                    T = frozenset(tuple((a + c * b) % p for a, b in zip(s, v)) for s in S for c in range(p))
                    if T not in out:
                        out.add(T)
                        nxt.add(T)
        frontier = nxt
    return out


def dimension(S: frozenset, p: int) -> int:
    size, d = len(S), 0
    while size > 1:
        size //= p
        d += 1
    return d


def mat_vec(M, v, p: int) -> tuple:
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) % p for i in range(len(M)))


def is_invariant(S: frozenset, mats, p: int) -> bool:
    return all(mat_vec(M, v, p) in S for M in mats for v in S)


def perm_matrix(perm) -> list:
    """Matrix sending e_i to e_perm[i]."""
    n = len(perm)
    return [[1 if perm[j] == i else 0 for j in range(n)] for i in range(n)]


def rank_mod_p(M, p: int) -> int:
    M = [list(row) for row in M]
    rk = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rk, len(M)) if M[r][c] % p), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        inv = pow(M[rk][c], p - 2, p)
        M[rk] = [(x * inv) % p for x in M[rk]]
        for r in range(len(M)):
            if r != rk and M[r][c] % p:
                f = M[r][c]
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[rk])]
        rk += 1
    return rk


# ---------------------------------------------------------------------------
# groups as explicit permutation lists


def closure(gens, degree: int) -> list:
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = tuple(g[a[x]] for x in range(degree))  # g o a
                if b not in seen:
                    seen.add(b)
                    elems.append(b)
                    nxt.append(b)
        frontier = nxt
    return elems


def compose(a, b) -> tuple:
    """(a o b)(x) = a(b(x))."""
    return tuple(a[b[x]] for x in range(len(a)))


def unnormalized_cohomology_dims(elements, action, p: int, top: int) -> list:
    """dim H^n(G, V) for n <= top from inhomogeneous cochains on all of G^n.

    ``action[g]`` is the matrix of element ``elements[g]``; products are
    located by looking up composed permutations.
    """
    index = {g: i for i, g in enumerate(elements)}
    order = len(elements)
    d = len(action[0])

    def idx(t):
        v = 0
        for x in t:
            v = v * order + x
        return v

    def delta(n):
        rows, cols = order ** (n + 1) * d, order**n * d
        M = [[0] * cols for _ in range(rows)]
        for tup in itertools.product(range(order), repeat=n + 1):
            r0 = idx(tup) * d
            A = action[tup[0]]
            c0 = idx(tup[1:]) * d
            for a in range(d):
                for b in range(d):
                    M[r0 + a][c0 + b] += A[a][b]
            for i in range(1, n + 1):
                merged = index[compose(elements[tup[i - 1]], elements[tup[i]])]
                t = tup[: i - 1] + (merged,) + tup[i + 1 :]
                c0 = idx(t) * d
                for a in range(d):
                    M[r0 + a][c0 + a] += (-1) ** i
            c0 = idx(tup[:n]) * d
            for a in range(d):
                M[r0 + a][c0 + a] += (-1) ** (n + 1)
        return [[x % p for x in row] for row in M]

    ranks = [rank_mod_p(delta(n), p) for n in range(top + 1)]
    return [order**n * d - ranks[n] - (ranks[n - 1] if n else 0) for n in range(top + 1)]


def permutation_action(elements) -> list:
    return [perm_matrix(g) for g in elements]


def trivial_action(elements, dim: int = 1) -> list:
    return [[[1 if i == j else 0 for j in range(dim)] for i in range(dim)] for _ in elements]


def completely_reducible(mats, n: int, p: int) -> bool:
    """Every invariant subspace has an invariant complement, by exhaustive search."""
    invariant = [S for S in all_subspaces(n, p) if is_invariant(S, mats, p)]
    for W in invariant:
        dw = dimension(W, p)
        if not any(len(W & U) == 1 and dw + dimension(U, p) == n for U in invariant):
            return False
    return True
