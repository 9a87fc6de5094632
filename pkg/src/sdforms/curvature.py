"""SO(N) curvature matrices of 2-forms at a point and the Pontrjagin density bounds.

A curvature matrix is an N x N skew matrix whose entries are 2-forms.
Only the entries ``F_ab`` with ``a < b`` are stored; ``F_ba = -F_ab`` and
``F_aa = 0`` hold by construction.  Fiber indices are 1-based.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Mapping, Optional

import numpy as np

from .errors import CapabilityError, FormError, NotApplicableError
from .exterior import KForm, check_dim, inner, top_scalar, wedge
from .selfdual import DEFAULT_TOL, Classification, classify
from .skew import SkewForm

# largest fiber the brute-force determinant expansion accepts
ORACLE_MAX_N = 6


@lru_cache(maxsize=None)
def fiber_pairs(N: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(1, N + 1), 2))


@lru_cache(maxsize=None)
def _pair_index(N: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(fiber_pairs(N))}


class CurvatureMatrix:
    """Skew N x N matrix of 2-forms in dimension ``dim``."""

    def __init__(self, dim: int, N: int, coeffs=None):
        self.dim = check_dim(dim)
        if isinstance(N, bool) or int(N) != N or N < 2:
            raise FormError(f"fiber size N must be an integer >= 2, got {N!r}")
        self.N = int(N)
        shape = (comb(self.N, 2), comb(self.dim, 2))
        arr = np.zeros(shape) if coeffs is None else np.array(coeffs, dtype=float)
        if arr.shape != shape:
            raise FormError(f"expected coefficient array of shape {shape}, got {arr.shape}")
        arr.flags.writeable = False
        self.coeffs = arr  # row k: 2-form F_ab for the k-th pair a < b

    @classmethod
    def from_entries(cls, dim: int, N: int,
                     entries: Mapping[tuple[int, int], KForm | SkewForm]) -> "CurvatureMatrix":
        """Build from ``{(a, b): form}``; pairs with ``a > b`` contribute ``-form``."""
        coeffs = np.zeros((comb(N, 2), comb(dim, 2)))
        index = _pair_index(N)
        for (a, b), form in entries.items():
            if isinstance(form, SkewForm):
                form = form.kform
            if form.dim != dim or form.degree != 2:
                raise FormError(f"entry ({a}, {b}) must be a 2-form in dim {dim}")
            if a == b or not (1 <= a <= N and 1 <= b <= N):
                raise FormError(f"invalid fiber pair ({a}, {b}) for N = {N}")
            sign = 1.0 if a < b else -1.0
            coeffs[index[(min(a, b), max(a, b))]] += sign * form.coeffs
        return cls(dim, N, coeffs)

    @classmethod
    def zero(cls, dim: int, N: int) -> "CurvatureMatrix":
        return cls(dim, N)

    def entry(self, a: int, b: int) -> KForm:
        if a == b:
            return KForm(self.dim, 2)
        k = _pair_index(self.N)[(min(a, b), max(a, b))]
        sign = 1.0 if a < b else -1.0
        return KForm(self.dim, 2, sign * self.coeffs[k])

    def full(self) -> np.ndarray:
        """Dense ``(N, N, C(dim, 2))`` array of entry coefficients."""
        out = np.zeros((self.N, self.N, self.coeffs.shape[1]))
        for k, (a, b) in enumerate(fiber_pairs(self.N)):
            out[a - 1, b - 1] = self.coeffs[k]
            out[b - 1, a - 1] = -self.coeffs[k]
        return out

    def conjugate(self, r: np.ndarray) -> "CurvatureMatrix":
        """Constant gauge rotation ``R^T F R``."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.N, self.N):
            raise FormError(f"rotation must be {self.N} x {self.N}")
        rotated = np.einsum("ca,cdm,db->abm", r, self.full(), r)
        i, j = np.array(fiber_pairs(self.N)).T - 1
        return CurvatureMatrix(self.dim, self.N, rotated[i, j])

    def __mul__(self, c: float) -> "CurvatureMatrix":
        return CurvatureMatrix(self.dim, self.N, float(c) * self.coeffs)

    __rmul__ = __mul__

    def __add__(self, other: "CurvatureMatrix") -> "CurvatureMatrix":
        if (other.dim, other.N) != (self.dim, self.N):
            raise FormError("curvature matrices differ in dim or N")
        return CurvatureMatrix(self.dim, self.N, self.coeffs + other.coeffs)

    def embed(self, N: int) -> "CurvatureMatrix":
        """Same entries in a larger fiber, padded with zeros."""
        if N < self.N:
            raise FormError(f"cannot embed N = {self.N} into N = {N}")
        return CurvatureMatrix.from_entries(
            self.dim, N, {p: KForm(self.dim, 2, c)
                          for p, c in zip(fiber_pairs(self.N), self.coeffs)})

    def __repr__(self) -> str:
        nonzero = sum(bool(np.any(c)) for c in self.coeffs)
        return f"CurvatureMatrix(dim={self.dim}, N={self.N}, nonzero_entries={nonzero})"


@dataclass(frozen=True)
class CurvatureInvariants:
    f_norm_sq: float                # <F, F>
    sigma2: KForm                   # degree 4
    sigma4: KForm                   # degree 8 (empty overflow form when dim < 8)
    sigma4_top: Optional[float]     # *sigma4 when dim == 8
    phi: float
    ortho_residual: float
    sigma2_norm_sq: float           # (sigma2, sigma2)


@dataclass(frozen=True)
class BoundReport:
    name: str
    lhs: float
    rhs: float
    slack: float        # rhs - lhs; >= 0 when the bound holds
    saturated: bool
    scale: float        # magnitude used to judge a negative slack
    applicable: bool = True
    note: str = ""


def _report(name: str, lhs: float, rhs: float, scale: float,
            tol: float = DEFAULT_TOL, note: str = "") -> BoundReport:
    slack = rhs - lhs
    saturated = abs(slack) <= tol * max(abs(lhs), abs(rhs), 1.0)
    return BoundReport(name, lhs, rhs, slack, saturated,
                       max(abs(lhs), abs(rhs), scale), True, note)


def _not_applicable(name: str, note: str) -> BoundReport:
    nan = float("nan")
    return BoundReport(name, nan, nan, nan, False, nan, False, note)


def _pf4(F: CurvatureMatrix, a: int, b: int, c: int, d: int) -> KForm:
    e = F.entry
    return (wedge(e(a, b), e(c, d)) - wedge(e(a, c), e(b, d))
            + wedge(e(a, d), e(b, c)))


def _disjoint_pair_pairs(N: int):
    pairs = fiber_pairs(N)
    for s, t in itertools.combinations(range(len(pairs)), 2):
        if not set(pairs[s]) & set(pairs[t]):
            yield s, t


def gram(F: CurvatureMatrix) -> np.ndarray:
    """Inner products ``(F_ij, F_kl)`` over stored pairs ``i<j``, ``k<l``."""
    return F.coeffs @ F.coeffs.T


def phi(F: CurvatureMatrix) -> float:
    """Sum of squared inner products over unordered disjoint pairs ``{i,j}, {k,l}``.

    For N = 4 this is ``(F12,F34)^2 + (F13,F24)^2 + (F14,F23)^2``.
    """
    g = gram(F)
    return float(sum(g[s, t] ** 2 for s, t in _disjoint_pair_pairs(F.N)))


def invariants(F: CurvatureMatrix) -> CurvatureInvariants:
    dim, N = F.dim, F.N
    f_norm_sq = 2.0 * float(np.sum(F.coeffs ** 2))
    sigma2 = KForm(dim, 4)
    for k in range(len(F.coeffs)):
        entry = KForm(dim, 2, F.coeffs[k])
        sigma2 = sigma2 + wedge(entry, entry)
    sigma4 = KForm(dim, min(8, dim + 1))
    for quad in itertools.combinations(range(1, N + 1), 4):
        p = _pf4(F, *quad)
        sigma4 = sigma4 + wedge(p, p)
    sigma4_top = top_scalar(sigma4) if dim == 8 else None
    g = gram(F)
    ortho = float(np.abs(g - np.eye(len(g))).max())
    return CurvatureInvariants(
        f_norm_sq=f_norm_sq, sigma2=sigma2, sigma4=sigma4, sigma4_top=sigma4_top,
        phi=phi(F), ortho_residual=ortho, sigma2_norm_sq=inner(sigma2, sigma2))


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    for i, j in itertools.combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            sign = -sign
    return sign


def sigma4_oracle(F: CurvatureMatrix) -> KForm:
    """t^4 coefficient of ``det(I + tF)`` by full Leibniz expansion.

    Even-degree forms commute, so the determinant expansion is valid over
    them.  Exponential in N; a test oracle only.
    """
    if F.N > ORACLE_MAX_N:
        raise CapabilityError(f"Leibniz expansion limited to N <= {ORACLE_MAX_N}, got {F.N}")
    dim = F.dim
    total = KForm(dim, min(8, dim + 1))
    entries = {(a, b): F.entry(a + 1, b + 1)
               for a in range(F.N) for b in range(F.N) if a != b}
    for perm in itertools.permutations(range(F.N)):
        moved = [i for i in range(F.N) if perm[i] != i]
        if len(moved) != 4:
            continue
        term = KForm.scalar(dim, float(_perm_sign(perm)))
        for i in moved:
            term = wedge(term, entries[(i, perm[i])])
        total = total + term
    return total


def bound_eq32(F: CurvatureMatrix, tol: float = DEFAULT_TOL,
               inv: CurvatureInvariants | None = None) -> tuple[BoundReport, BoundReport]:
    """``<F,F>^2 >= (1/4)(2(n-1)/n)(s2, s2) >= (1/4)(2(n-1)/n) *s2^2``.

    The common factor cancels in the second inequality, which is reported
    as ``*sigma2^2 <= (sigma2, sigma2)``; it needs ``sigma2^2`` to be a top
    form, i.e. dim 8.
    """
    inv = inv or invariants(F)
    n = F.dim // 2
    c = 0.25 * 2.0 * (n - 1) / n
    ff2 = inv.f_norm_sq ** 2
    first = _report("eq32_first", c * inv.sigma2_norm_sq, ff2, ff2, tol)
    if F.dim == 8:
        s2s2 = top_scalar(wedge(inv.sigma2, inv.sigma2))
        second = _report("eq32_second", s2s2, inv.sigma2_norm_sq, ff2, tol)
    else:
        second = _not_applicable("eq32_second", f"sigma2^2 is not a top form in dim {F.dim}")
    return first, second


def _sigma4_rhs(phi_value: float, ff: float, s2s2: float, binom: float) -> float:
    # shared by the SO(4) bound and its SO(N) generalization so that the two
    # agree bit for bit at N = 4 (binom = 1)
    return 4.5 * phi_value + 0.28125 * binom * ff * ff - 0.75 * binom * s2s2


def bound_eq33(F: CurvatureMatrix, tol: float = DEFAULT_TOL,
               inv: CurvatureInvariants | None = None) -> BoundReport:
    """``|*sigma4| <= (9/2) Phi + (9/32) <F,F>^2 - (3/4)(sigma2, sigma2)`` for SO(4), dim 8."""
    if F.dim != 8 or F.N != 4:
        raise FormError(f"bound_eq33 needs dim 8 and N = 4, got dim {F.dim}, N = {F.N}")
    inv = inv or invariants(F)
    rhs = _sigma4_rhs(inv.phi, inv.f_norm_sq, inv.sigma2_norm_sq, 1.0)
    return _report("eq33", abs(inv.sigma4_top), rhs, inv.f_norm_sq ** 2, tol)


def bound_eq35(F: CurvatureMatrix, tol: float = DEFAULT_TOL,
               inv: CurvatureInvariants | None = None) -> BoundReport:
    """``|*s4| <= (3/4)[6 Phi + (3/8) C(N-2,2) <F,F>^2 - C(N-2,2)(s2, s2)]``, dim 8."""
    if F.dim != 8:
        raise NotApplicableError(f"*sigma4 is a scalar only in dim 8, got dim {F.dim}")
    inv = inv or invariants(F)
    if F.N < 4:
        return _report("eq35", 0.0, 0.0, 0.0, tol, note="sigma4 vanishes for N < 4")
    rhs = _sigma4_rhs(inv.phi, inv.f_norm_sq, inv.sigma2_norm_sq, float(comb(F.N - 2, 2)))
    return _report("eq35", abs(inv.sigma4_top), rhs, inv.f_norm_sq ** 2, tol)


def all_bounds(F: CurvatureMatrix, tol: float = DEFAULT_TOL,
               inv: CurvatureInvariants | None = None) -> list[BoundReport]:
    """Every bound that applies to ``F``; the others are marked not applicable."""
    inv = inv or invariants(F)
    reports = list(bound_eq32(F, tol, inv))
    if F.dim == 8 and F.N == 4:
        reports.append(bound_eq33(F, tol, inv))
    else:
        reports.append(_not_applicable("eq33", "needs dim 8 and N = 4"))
    if F.dim == 8:
        reports.append(bound_eq35(F, tol, inv))
    else:
        reports.append(_not_applicable("eq35", "needs dim 8"))
    return reports


def product_config(w: SkewForm, f0) -> CurvatureMatrix:
    """``F_ab = (F0)_ab * w`` for a constant real skew matrix ``F0``."""
    f0 = np.asarray(f0, dtype=float)
    if f0.ndim != 2 or f0.shape[0] != f0.shape[1]:
        raise FormError(f"F0 must be square, got shape {f0.shape}")
    if not np.allclose(f0, -f0.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(f0).max())):
        raise FormError("F0 must be skew-symmetric")
    N = f0.shape[0]
    i, j = np.array(fiber_pairs(N)).T - 1
    return CurvatureMatrix(w.dim, N, np.outer(f0[i, j], w.kform.coeffs))


def so4_saturating(w: SkewForm, tol: float = DEFAULT_TOL) -> CurvatureMatrix:
    """``F12 = F34 = F13 = F14 = F23 = w``, ``F24 = -w``: the SO(4) equality case."""
    if w.dim != 8:
        raise FormError(f"so4_saturating needs an 8-dimensional 2-form, got dim {w.dim}")
    if classify(w, tol).classification is not Classification.STRONGLY_SELF_DUAL:
        warnings.warn("so4_saturating called with a 2-form that is not strongly self-dual",
                      stacklevel=2)
    a = w.kform
    return CurvatureMatrix.from_entries(8, 4, {
        (1, 2): a, (3, 4): a, (1, 3): a, (2, 4): -a, (1, 4): a, (2, 3): a})


def random_curvature(dim: int, N: int, seed=None, density: float = 1.0,
                     scale: float = 1.0) -> CurvatureMatrix:
    """Gaussian entries; with ``density < 1`` each fiber pair is kept with that probability."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    coeffs = rng.standard_normal((comb(N, 2), comb(dim, 2))) * scale
    if density < 1.0:
        keep = rng.random(comb(N, 2)) < density
        coeffs[~keep] = 0.0
    return CurvatureMatrix(dim, N, coeffs)
