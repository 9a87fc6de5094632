"""Slow, independent reference implementations used only by the tests.

None of these share code paths with the package beyond the KForm
container: signs come from explicit permutation parity, Pfaffians from
the recursive row expansion, and lambdas from sorting complex eigenvalues.
"""
from __future__ import annotations

import itertools
from math import comb

import numpy as np

from sdforms.exterior import KForm, basis


def perm_parity(seq) -> int:
    seq = list(seq)
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def wedge_bruteforce(a: KForm, b: KForm) -> KForm:
    dim = a.dim
    deg = a.degree + b.degree
    out: dict[tuple, float] = {}
    for I, x in zip(basis(dim, a.degree), a.coeffs):
        for J, y in zip(basis(dim, b.degree), b.coeffs):
            if set(I) & set(J) or x == 0 or y == 0:
                continue
            K = tuple(sorted(I + J))
            out[K] = out.get(K, 0.0) + perm_parity(I + J) * x * y
    return KForm.from_terms(dim, deg, out)


def hodge_bruteforce(a: KForm) -> KForm:
    dim = a.dim
    full = set(range(1, dim + 1))
    out = {}
    for I, x in zip(basis(dim, a.degree), a.coeffs):
        Ic = tuple(sorted(full - set(I)))
        out[Ic] = perm_parity(I + Ic) * x
    return KForm.from_terms(dim, dim - a.degree, out)


def pfaffian_expansion(m: np.ndarray) -> float:
    """Expansion along the first row; exponential, fine for dim <= 8."""
    n = m.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        if m[0, j] == 0:
            continue
        rest = [k for k in range(n) if k not in (0, j)]
        total += (-1) ** (j + 1) * m[0, j] * pfaffian_expansion(m[np.ix_(rest, rest)])
    return total


def lambdas_from_eigvals(m: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(m)
    mags = np.sort(np.abs(ev.imag))[::-1]
    return mags[0::2]


def elementary_symmetric_bruteforce(values) -> list[float]:
    values = list(values)
    return [sum(np.prod(c) for c in itertools.combinations(values, k))
            for k in range(1, len(values) + 1)]


def sigma4_bruteforce_pfaffians(F) -> KForm:
    """Sum over 4-subsets of squared 4x4 form-valued Pfaffians, via wedge_bruteforce."""
    total = None
    for a, b, c, d in itertools.combinations(range(1, F.N + 1), 4):
        e = F.entry
        p = (wedge_bruteforce(e(a, b), e(c, d)) - wedge_bruteforce(e(a, c), e(b, d))
             + wedge_bruteforce(e(a, d), e(b, c)))
        sq = wedge_bruteforce(p, p)
        total = sq if total is None else total + sq
    return total


def random_form(dim: int, k: int, rng) -> KForm:
    return KForm(dim, k, rng.standard_normal(comb(dim, k)))
