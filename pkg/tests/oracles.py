"""Independent brute-force reference implementations.

Everything here recomputes results straight from the defining formulas
with plain Python loops, sharing no code path with the package. These are
the yardsticks the fast implementations are checked against.
"""
from __future__ import annotations

import math


def user_mean(triples, user):
    votes = [v for u, _, v in triples if u == user]
    return sum(votes) / len(votes) if votes else None


def item_mean(triples, item):
    votes = [v for _, i, v in triples if i == item]
    return sum(votes) / len(votes) if votes else None


def global_mean(triples):
    return sum(v for _, _, v in triples) / len(triples) if triples else None


def item_mean_chain(triples, item, midpoint):
    m = item_mean(triples, item)
    if m is not None:
        return m
    g = global_mean(triples)
    return g if g is not None else midpoint


def pearson(triples, i, j, n_c=3, center="global"):
    """Direct summation of the correlation formula over the overlap."""
    votes_i = {a: v for u, a, v in triples if u == i}
    votes_j = {a: v for u, a, v in triples if u == j}
    common = sorted(set(votes_i) & set(votes_j))
    if len(common) < max(n_c, 1):
        return 0.0
    if center == "global":
        mi = user_mean(triples, i)
        mj = user_mean(triples, j)
    else:
        mi = sum(votes_i[a] for a in common) / len(common)
        mj = sum(votes_j[a] for a in common) / len(common)
    num = sum((votes_i[a] - mi) * (votes_j[a] - mj) for a in common)
    di = sum((votes_i[a] - mi) ** 2 for a in common)
    dj = sum((votes_j[a] - mj) ** 2 for a in common)
    if di <= 0 or dj <= 0:
        return 0.0
    c = num / math.sqrt(di * dj)
    return max(-1.0, min(1.0, c))


def weighted_prediction(triples, weights, user, item, scale):
    """Direct evaluation of the similarity-weighted prediction contract.

    Returns (value, fallback). ``weights`` is indexable as weights[u][v].
    """
    v_min, v_max = scale
    midpoint = 0.5 * (v_min + v_max)
    raters = [(u, v) for u, a, v in triples if a == item]
    if not raters:
        return item_mean_chain(triples, item, midpoint), True
    base = user_mean(triples, user)
    if base is None:
        return item_mean_chain(triples, item, midpoint), True
    den = 0.0
    num = 0.0
    for rater, vote in raters:
        if rater == user:
            continue
        w = weights[user][rater]
        num += w * (vote - user_mean(triples, rater))
        den += abs(w)
    if den == 0.0:
        return item_mean_chain(triples, item, midpoint), True
    value = base + num / den
    return max(v_min, min(v_max, value)), False


def mae(pairs, vote_range):
    return sum(abs(p - a) for p, a in pairs) / (len(pairs) * vote_range)


def jacobi_eigh(matrix, tol=1e-13, max_sweeps=200):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Classic rotations, no LAPACK. Returns (eigenvalues, eigenvectors)
    sorted ascending, one eigenvector per column.
    """
    n = len(matrix)
    a = [[float(matrix[r][c]) for c in range(n)] for r in range(n)]
    v = [[1.0 if r == c else 0.0 for c in range(n)] for r in range(n)]
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[r][c] ** 2 for r in range(n) for c in range(n) if r != c))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p][q]) < tol / (10 * n):
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    arp, arq = a[r][p], a[r][q]
                    a[r][p] = c * arp - s * arq
                    a[r][q] = s * arp + c * arq
                for col in range(n):
                    apc, aqc = a[p][col], a[q][col]
                    a[p][col] = c * apc - s * aqc
                    a[q][col] = s * apc + c * aqc
                for r in range(n):
                    vrp, vrq = v[r][p], v[r][q]
                    v[r][p] = c * vrp - s * vrq
                    v[r][q] = s * vrp + c * vrq
    order = sorted(range(n), key=lambda idx: a[idx][idx])
    eigenvalues = [a[idx][idx] for idx in order]
    eigenvectors = [[v[r][idx] for idx in order] for r in range(n)]
    return eigenvalues, eigenvectors
