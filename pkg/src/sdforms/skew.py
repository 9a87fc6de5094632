"""2-forms as skew-symmetric matrices: spectra, Pfaffians, invariant polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb, factorial

import numpy as np

from .errors import FormError, NumericalError
from .exterior import KForm, basis, check_dim, inner

# relative agreement required between the eigenvalues +lambda and -lambda
PAIR_TOL = 1e-7


class SkewForm:
    """A 2-form ``sum_{i<j} w_ij e_i^e_j`` together with its skew matrix."""

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise FormError(f"expected a square matrix, got shape {m.shape}")
        self.dim = check_dim(m.shape[0])
        m = 0.5 * (m - m.T)
        m.flags.writeable = False
        self.matrix = m

    @property
    def n(self) -> int:
        return self.dim // 2

    @classmethod
    def from_kform(cls, form: KForm) -> "SkewForm":
        if form.degree != 2:
            raise FormError(f"expected a 2-form, got degree {form.degree}")
        i, j = np.array(basis(form.dim, 2)).T - 1
        m = np.zeros((form.dim, form.dim))
        m[i, j] = form.coeffs
        m[j, i] = -form.coeffs
        return cls(m)

    @classmethod
    def from_terms(cls, dim: int, terms) -> "SkewForm":
        return cls.from_kform(KForm.from_terms(dim, 2, terms))

    @classmethod
    def standard(cls, dim: int, lam: float = 1.0) -> "SkewForm":
        """``lam * (e12 + e34 + ...)``, the block form with Pfaffian ``lam^n``."""
        dim = check_dim(dim)
        m = np.zeros((dim, dim))
        for k in range(0, dim, 2):
            m[k, k + 1], m[k + 1, k] = lam, -lam
        return cls(m)

    @cached_property
    def kform(self) -> KForm:
        i, j = np.array(basis(self.dim, 2)).T - 1
        return KForm(self.dim, 2, self.matrix[i, j])

    def __add__(self, other: "SkewForm") -> "SkewForm":
        _check_pair(self, other)
        return SkewForm(self.matrix + other.matrix)

    def __sub__(self, other: "SkewForm") -> "SkewForm":
        _check_pair(self, other)
        return SkewForm(self.matrix - other.matrix)

    def __neg__(self) -> "SkewForm":
        return SkewForm(-self.matrix)

    def __mul__(self, c: float) -> "SkewForm":
        return SkewForm(float(c) * self.matrix)

    __rmul__ = __mul__

    def conjugate(self, q: np.ndarray) -> "SkewForm":
        """``Q^T w Q``."""
        return SkewForm(q.T @ self.matrix @ q)

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def __repr__(self) -> str:
        return f"SkewForm({self.kform!r})"


def _check_pair(a: SkewForm, b: SkewForm) -> None:
    if a.dim != b.dim:
        raise FormError(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True)
class Spectrum:
    lambdas: np.ndarray  # descending, >= 0
    pfaffian: float


@dataclass(frozen=True)
class InvariantSet:
    s: np.ndarray  # s[i-1] = s_{2i}
    q: np.ndarray  # q[i-1] = s_{2i} / C(n, i)


def pfaffian(w: SkewForm) -> float:
    """Pfaffian by skew Gaussian elimination with partial pivoting (Parlett-Reid).

    Normalized so that ``Pf(e12 + e34 + ...) = +1``.
    """
    a = np.array(w.matrix)
    dim = a.shape[0]
    pf = 1.0
    for k in range(0, dim - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if p != k + 1:
            a[[k + 1, p], :] = a[[p, k + 1], :]
            a[:, [k + 1, p]] = a[:, [p, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < dim:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def spectrum(w: SkewForm) -> Spectrum:
    """Eigenvalue moduli and Pfaffian of ``w``.

    The moduli come from a Hermitian eigensolve of ``i w``, whose spectrum
    is ``+-lambda_k``; squaring first (``-w^2``) would lose the small
    moduli to an absolute error of order ``eps * lambda_max^2``.  The
    Pfaffian is computed separately by elimination.
    """
    n = w.n
    try:
        ev = np.linalg.eigvalsh(1j * w.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve of i*w failed: {exc}") from exc
    positive, negative = ev[n:][::-1], -ev[:n]
    scale = max(float(np.abs(ev).max()), 1.0)
    mismatch = float(np.max(np.abs(positive - negative)))
    if mismatch > PAIR_TOL * scale:
        raise NumericalError(
            f"eigenvalues of i*w are not symmetric about 0: max mismatch {mismatch:.3e} "
            f"(scale {scale:.3e}); eigenvalues {ev.tolist()}")
    lambdas = np.clip(0.5 * (positive + negative), 0.0, None)
    return Spectrum(lambdas=lambdas, pfaffian=pfaffian(w))


def elementary_symmetric(values) -> np.ndarray:
    """``[e_1, ..., e_m]`` of the given values, accumulated in ascending order."""
    vals = np.sort(np.asarray(values, dtype=float))
    e = np.zeros(len(vals) + 1)
    e[0] = 1.0
    for x in vals:
        e[1:] = e[1:] + x * e[:-1]
    return e[1:]


def invariants_from_lambdas(lambdas) -> InvariantSet:
    lambdas = np.asarray(lambdas, dtype=float)
    n = len(lambdas)
    s = elementary_symmetric(lambdas ** 2)
    q = s / np.array([comb(n, i) for i in range(1, n + 1)], dtype=float)
    return InvariantSet(s=s, q=q)


def invariants(w: SkewForm) -> InvariantSet:
    return invariants_from_lambdas(spectrum(w).lambdas)


def eq21_residuals(w: SkewForm) -> list[float]:
    """Relative mismatch between ``(w^i, w^i) / (i!)^2`` and ``s_{2i}``, i = 1..n.

    The left side uses only the exterior algebra, the right side only the
    eigenvalues, so agreement cross-checks both.
    """
    s = invariants(w).s
    out = []
    power = KForm.scalar(w.dim)
    for i in range(1, w.n + 1):
        power = power ^ w.kform
        lhs = inner(power, power) / factorial(i) ** 2
        out.append(abs(lhs - s[i - 1]) / max(1.0, s[i - 1]))
    return out


def maclaurin_gaps(inv: InvariantSet) -> tuple[np.ndarray, np.ndarray]:
    """Gaps in the Maclaurin and Newton chains of the weighted means ``q_i``.

    Returns ``(chain, newton)`` where ``chain[r-1] = q_r^{1/r} - q_{r+1}^{1/(r+1)}``
    and ``newton[r-1] = q_r^2 - q_{r-1} q_{r+1}`` (``q_0 = 1``), r = 1..n-1.
    Both are nonnegative for real spectra.
    """
    q = inv.q
    n = len(q)
    roots = np.array([q[i] ** (1.0 / (i + 1)) for i in range(n)])
    chain = roots[:-1] - roots[1:]
    qq = np.concatenate(([1.0], q))
    newton = np.array([qq[r] ** 2 - qq[r - 1] * qq[r + 1] for r in range(1, n)])
    return chain, newton
