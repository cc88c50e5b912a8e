"""Exact minimum-norm point of a convex hull from its Gram matrix.

Wolfe's algorithm, run in rational arithmetic, terminates with the exact
optimum; the optimality condition ``<x, p_j> >= <x, x>`` for every point is
re-checked at the end.  Points orthogonal to each other (diagonal Gram) get
the closed form ``w_i ~ 1 / G_ii``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularSystem(ArithmeticError):
    pass


def solve(A: list, b: list) -> list:
    """Gaussian elimination over the rationals."""
    n = len(A)
    M = [list(row) + [bb] for row, bb in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise SingularSystem("singular system")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _affine_min(G, S):
    """Minimise ``|sum mu_i p_i|^2`` over ``sum mu_i = 1`` on support S."""
    k = len(S)
    A = [[G[i][j] for j in S] + [Fraction(1)] for i in S] + [[Fraction(1)] * k + [Fraction(0)]]
    rhs = [Fraction(0)] * k + [Fraction(1)]
    sol = solve(A, rhs)
    return sol[:k]


def quad(G, w) -> Fraction:
    n = len(w)
    return sum((w[i] * w[j] * G[i][j] for i in range(n) if w[i] for j in range(n) if w[j]), Fraction(0))


def is_diagonal(G) -> bool:
    return all(G[i][j] == 0 for i in range(len(G)) for j in range(len(G)) if i != j)


def optimal(G, w) -> bool:
    """KKT certificate: ``<x, p_j> >= <x, x>`` for all j, with ``x = sum w_i p_i``."""
    xx = quad(G, w)
    n = len(w)
    for j in range(n):
        xpj = sum((w[i] * G[i][j] for i in range(n) if w[i]), Fraction(0))
        if xpj < xx:
            return False
    return True


def min_norm_point(G: Sequence[Sequence[Fraction]], max_iter: int = 10_000):
    """Weights on the simplex minimising ``w^T G w``; returns ``(w, value)``."""
    n = len(G)
    if n == 0:
        raise ValueError("no points")
    G = [[Fraction(x) for x in row] for row in G]
    if is_diagonal(G):
        zeros = [i for i in range(n) if G[i][i] == 0]
        if zeros:
            w = [Fraction(0)] * n
            w[zeros[0]] = Fraction(1)
            return w, Fraction(0)
        inv = [1 / G[i][i] for i in range(n)]
        tot = sum(inv)
        w = [x / tot for x in inv]
        return w, 1 / tot
    start = min(range(n), key=lambda i: G[i][i])
    S = [start]
    w = [Fraction(0)] * n
    w[start] = Fraction(1)
    for _ in range(max_iter):
        xx = quad(G, w)
        scores = [sum((w[i] * G[i][j] for i in S), Fraction(0)) for j in range(n)]
        j = min(range(n), key=lambda t: scores[t])
        if scores[j] >= xx or j in S:
            break
        S.append(j)
        while True:
            mu = _affine_min(G, S)
            if all(m > 0 for m in mu):
                w = [Fraction(0)] * n
                for i, m in zip(S, mu):
                    w[i] = m
                break
            theta = min(w[i] / (w[i] - m) for i, m in zip(S, mu) if m <= 0)
            new = {i: (1 - theta) * w[i] + theta * m for i, m in zip(S, mu)}
            S = [i for i in S if new[i] > 0]
            w = [Fraction(0)] * n
            for i in S:
                w[i] = new[i]
    if not optimal(G, w):
        raise ArithmeticError("min-norm point failed its optimality certificate")
    return w, quad(G, w)
