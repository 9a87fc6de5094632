"""Strong self-duality of 2-forms and the equivalent characterizations.

A 2-form in 2n dimensions is strongly self-dual when all its eigenvalue
moduli coincide and its Pfaffian is positive (anti self-dual: negative).
This module classifies forms, checks the alternative characterizations
(Hodge self-duality of ``w^{n/2}``, ``w^{n-1} = k * w``), evaluates the
associated inequalities, and samples strongly self-dual forms.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from math import factorial
from typing import Optional

import numpy as np

from .errors import FormError, NotApplicableError
from .exterior import hodge, inner, top_scalar, wedge, wedge_power
from .skew import SkewForm, spectrum

DEFAULT_TOL = 1e-9


class Classification(str, Enum):
    STRONGLY_SELF_DUAL = "strongly_self_dual"
    STRONGLY_ANTI_SELF_DUAL = "strongly_anti_self_dual"
    GENERIC = "generic"
    ZERO = "zero"


@dataclass(frozen=True)
class SelfDualityReport:
    classification: Classification
    lambda_spread: float      # (max - min) / max(lambda_max, 1)
    lambda_mean_sq: float     # s_2 / n
    matrix_residual: float    # max|w^2 + lambda^2 I| / max(lambda^2, 1)
    pfaffian: float


@dataclass(frozen=True)
class TrautmanReport:
    k_fit: float
    residual: float
    k_theory: float
    holds: bool
    # "self_dual" (k_fit > 0), "anti_self_dual" (k_fit < 0, an extension of
    # the usual positive-k statement) or None when the relation fails
    branch: Optional[str] = None


@dataclass(frozen=True)
class GapReport:
    g1: float
    g2: Optional[float] = None   # None when n is odd
    pair_gap: Optional[float] = None
    scale: float = 1.0
    # sides of the pair bound, when computed for a pair
    lhs: Optional[float] = None
    rhs: Optional[float] = None


def classify(w: SkewForm, tol: float = DEFAULT_TOL) -> SelfDualityReport:
    spec = spectrum(w)
    lam = spec.lambdas
    n = w.n
    mean_sq = float(np.sum(lam ** 2) / n)
    spread = float((lam[0] - lam[-1]) / max(lam[0], 1.0))
    resid = w.matrix @ w.matrix + mean_sq * np.eye(w.dim)
    matrix_residual = float(np.abs(resid).max() / max(mean_sq, 1.0))
    if w.is_zero():
        cls = Classification.ZERO
    elif spread <= tol and spec.pfaffian > 0:
        cls = Classification.STRONGLY_SELF_DUAL
    elif spread <= tol and spec.pfaffian < 0:
        cls = Classification.STRONGLY_ANTI_SELF_DUAL
    else:
        cls = Classification.GENERIC
    return SelfDualityReport(cls, spread, mean_sq, matrix_residual, spec.pfaffian)


def lemma22_gaps(w: SkewForm) -> GapReport:
    """Gaps of ``(n-1)(w,w)^2 >= (n/2)(w^2,w^2)`` and ``(w^{n/2}, w^{n/2}) >= *w^n``.

    Both vanish exactly on strongly self-dual forms; the second is only
    defined for even n and is positive on anti self-dual forms.
    """
    n = w.n
    a = w.kform
    a2 = wedge(a, a)
    norm_sq = inner(a, a)
    g1 = (n - 1) * norm_sq ** 2 - 0.5 * n * inner(a2, a2)
    g2 = None
    if n % 2 == 0:
        half = wedge_power(a, n // 2)
        g2 = inner(half, half) - top_scalar(wedge(half, half))
    return GapReport(g1=g1, g2=g2, scale=norm_sq ** 2)


def grossman_check(w: SkewForm, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``w^{n/2}`` is nonzero and Hodge self-dual to relative ``tol``."""
    if w.n % 2:
        raise NotApplicableError(f"w^(n/2) needs even n; dim {w.dim} has n = {w.n}")
    half = wedge_power(w.kform, w.n // 2)
    size = half.norm()
    return size > 0 and (half - hodge(half)).norm() <= tol * size


def trautman_check(w: SkewForm, tol: float = DEFAULT_TOL) -> TrautmanReport:
    """Fit ``w^{n-1} = k * w`` by least squares and compare k with the closed form."""
    if w.is_zero():
        raise FormError("the relation w^(n-1) = k *w is vacuous for w = 0")
    n = w.n
    d = hodge(w.kform)
    c = wedge_power(w.kform, n - 1)
    k_fit = inner(c, d) / inner(d, d)
    residual = (c - k_fit * d).norm() / c.norm() if not c.is_zero() else 1.0
    k_theory = factorial(n) / n ** (n / 2) * inner(w.kform, w.kform) ** (n / 2 - 1)
    holds = residual <= tol and not d.is_zero()
    branch = None
    if holds:
        branch = "self_dual" if k_fit > 0 else "anti_self_dual"
    return TrautmanReport(k_fit=k_fit, residual=residual, k_theory=k_theory,
                          holds=holds, branch=branch)


def pair_bound(w: SkewForm, e: SkewForm) -> GapReport:
    """Gap in the bound on ``4 (w^e, w^e)`` for a pair of 2-forms.

    ``pair_gap`` is right side minus left side with the right side
    evaluated term by term; ``g1`` holds the same quantity derived from
    the single-form inequality applied to ``w + e`` and ``w - e``.  The
    two must agree.
    """
    if w.dim != e.dim:
        raise FormError(f"dimension mismatch: {w.dim} vs {e.dim}")
    n = w.n
    c = 2.0 * (n - 1) / n
    a, b = w.kform, e.kform
    a2, b2, ab = wedge(a, a), wedge(b, b), wedge(a, b)
    aa, bb, ab1 = inner(a, a), inner(b, b), inner(a, b)
    lhs = 4.0 * inner(ab, ab)
    rhs = (4.0 * c * ab1 ** 2
           + (c * aa ** 2 - inner(a2, a2))
           + (c * bb ** 2 - inner(b2, b2))
           + 2.0 * (c * aa * bb - inner(a2, b2)))
    derived = (lemma22_gaps(w + e).g1 + lemma22_gaps(w - e).g1) / n
    return GapReport(g1=derived, pair_gap=rhs - lhs, scale=(aa + bb) ** 2, lhs=lhs, rhs=rhs)


# -- sampling ---------------------------------------------------------------

def haar_orthogonal(dim: int, rng: np.random.Generator, det: int = 1) -> np.ndarray:
    """Haar-distributed orthogonal matrix with the requested determinant.

    QR of a Gaussian matrix with the signs of ``diag(R)`` moved into Q,
    then one column flipped if the determinant is wrong.
    """
    z = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) * det < 0:
        q[:, 0] = -q[:, 0]
    return q


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_ssd(dim: int, lam: float = 1.0, seed=None) -> SkewForm:
    """``lam * Q J Q^T`` with J the standard block form and Q Haar in SO(dim)."""
    q = haar_orthogonal(dim, _rng(seed), det=1)
    return SkewForm(lam * q @ SkewForm.standard(dim).matrix @ q.T)


def random_asd(dim: int, lam: float = 1.0, seed=None) -> SkewForm:
    """Anti self-dual counterpart: the same construction with det Q = -1."""
    q = haar_orthogonal(dim, _rng(seed), det=-1)
    return SkewForm(lam * q @ SkewForm.standard(dim).matrix @ q.T)


def random_skew(dim: int, seed=None, scale: float = 1.0) -> SkewForm:
    """Gaussian skew matrix with unit-variance independent entries above the diagonal."""
    z = _rng(seed).standard_normal((dim, dim))
    return SkewForm(scale * (z - z.T) / np.sqrt(2.0))


def random_with_spectrum(lambdas, seed=None, pfaffian_sign: int = 1) -> SkewForm:
    """Random 2-form with prescribed eigenvalue moduli and Pfaffian sign."""
    lambdas = np.asarray(lambdas, dtype=float)
    dim = 2 * len(lambdas)
    block = np.zeros((dim, dim))
    for k, lam in enumerate(lambdas):
        block[2 * k, 2 * k + 1], block[2 * k + 1, 2 * k] = lam, -lam
    q = haar_orthogonal(dim, _rng(seed), det=1 if pfaffian_sign > 0 else -1)
    return SkewForm(q @ block @ q.T)


def warn_if_not_ssd(w: SkewForm, tol: float = DEFAULT_TOL) -> None:
    report = classify(w, tol)
    if report.classification is not Classification.STRONGLY_SELF_DUAL:
        warnings.warn(f"2-form is {report.classification.value}, not strongly self-dual",
                      stacklevel=3)
