"""Dense exterior algebra over oriented Euclidean R^{2n}.

Forms are stored as dense coefficient vectors over the basis ``e_I``,
``I`` a strictly increasing multi-index, enumerated lexicographically.
Indices are 1-based in the public API (``(1, 2)`` is ``e1^e2``) and
0-based bit positions internally.

The metric is the standard one (basis forms orthonormal) and the
orientation is ``e1^...^e_{2n}``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FormError

MIN_DIM = 4
MAX_DIM = 12

MultiIndex = tuple[int, ...]


def check_dim(dim: int) -> int:
    if isinstance(dim, bool) or int(dim) != dim:
        raise FormError(f"dimension must be an integer, got {dim!r}")
    dim = int(dim)
    if dim % 2 or not MIN_DIM <= dim <= MAX_DIM:
        raise FormError(f"dimension must be even and in [{MIN_DIM}, {MAX_DIM}], got {dim}")
    return dim


@lru_cache(maxsize=None)
def basis(dim: int, k: int) -> tuple[MultiIndex, ...]:
    """All degree-``k`` multi-indices in lexicographic order (1-based)."""
    return tuple(itertools.combinations(range(1, dim + 1), k))


@lru_cache(maxsize=None)
def _masks(dim: int, k: int) -> np.ndarray:
    return np.array([sum(1 << (i - 1) for i in I) for I in basis(dim, k)], dtype=np.int64)


@lru_cache(maxsize=None)
def _position(dim: int) -> np.ndarray:
    # position of every subset mask within the basis of its own degree
    pos = np.empty(1 << dim, dtype=np.int64)
    for k in range(dim + 1):
        pos[_masks(dim, k)] = np.arange(comb(dim, k))
    return pos


def _bits(masks: np.ndarray, dim: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(dim)) & 1).astype(np.int64)


def _greater_counts(masks: np.ndarray, dim: int) -> np.ndarray:
    # entry [r, j]: number of elements of set r strictly greater than j
    bits = _bits(masks, dim)
    return bits[:, ::-1].cumsum(axis=1)[:, ::-1] - bits


@lru_cache(maxsize=None)
def _wedge_table(dim: int, p: int, q: int):
    ma, mb = _masks(dim, p), _masks(dim, q)
    ia, ib = np.nonzero((ma[:, None] & mb[None, :]) == 0)
    inversions = _greater_counts(ma, dim) @ _bits(mb, dim).T
    sign = 1.0 - 2.0 * (inversions[ia, ib] % 2)
    out = _position(dim)[ma[ia] | mb[ib]]
    # Canonical term order: tables for (p, q) and (q, p) list the same
    # products in the same sequence, and for p == q the swapped pairs
    # (I, J), (J, I) sit next to each other.  Summation order then makes
    # a^b and b^a agree bit for bit when p*q is even.
    lo, hi = (ma[ia], mb[ib]) if p <= q else (mb[ib], ma[ia])
    if p == q:
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        order = np.lexsort((ma[ia], hi, lo, out))
    else:
        order = np.lexsort((hi, lo, out))
    return ia[order], ib[order], out[order], sign[order]


@lru_cache(maxsize=None)
def _hodge_table(dim: int, k: int):
    m = _masks(dim, k)
    mc = ((1 << dim) - 1) ^ m
    inversions = (_greater_counts(m, dim) * _bits(mc, dim)).sum(axis=1)
    sign = 1.0 - 2.0 * (inversions % 2)
    return _position(dim)[mc], sign


class KForm:
    """A constant-coefficient k-form in dimension ``dim``.

    Immutable: the coefficient array is flagged read-only.  Degree
    ``dim + 1`` is reserved for the (empty) result of a wedge product
    whose degree overflows the dimension.
    """

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs=None):
        dim = check_dim(dim)
        if not 0 <= degree <= dim + 1:
            raise FormError(f"degree {degree} outside [0, {dim}]")
        size = comb(dim, degree)
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise FormError(
                    f"degree-{degree} form in dim {dim} needs {size} coefficients, got {arr.size}")
        arr.flags.writeable = False
        self.dim = dim
        self.degree = degree
        self.coeffs = arr

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def scalar(cls, dim: int, value: float = 1.0) -> "KForm":
        return cls(dim, 0, [value])

    @classmethod
    def volume(cls, dim: int, value: float = 1.0) -> "KForm":
        return cls(dim, dim, [value])

    @classmethod
    def from_terms(cls, dim: int, degree: int,
                   terms: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]]
                   ) -> "KForm":
        """Build a form from ``{indices: coefficient}``; repeated keys are summed.

        >>> KForm.from_terms(4, 2, {(1, 2): 1.0, (3, 4): 1.0}).terms()
        {(1, 2): 1.0, (3, 4): 1.0}
        """
        dim = check_dim(dim)
        items = terms.items() if isinstance(terms, Mapping) else terms
        coeffs = np.zeros(comb(dim, degree))
        pos = _position(dim)
        for idx, c in items:
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise FormError(f"index {idx} has length {len(idx)}, expected {degree}")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise FormError(f"index {idx} is not strictly increasing")
            if idx and (idx[0] < 1 or idx[-1] > dim):
                raise FormError(f"index {idx} out of range 1..{dim}")
            coeffs[pos[sum(1 << (i - 1) for i in idx)]] += float(c)
        return cls(dim, degree, coeffs)

    @classmethod
    def basis_form(cls, dim: int, *indices: int) -> "KForm":
        return cls.from_terms(dim, len(indices), {tuple(indices): 1.0})

    # -- views ----------------------------------------------------------

    def terms(self, atol: float = 0.0) -> dict[MultiIndex, float]:
        if self.degree > self.dim:
            return {}
        return {I: float(c) for I, c in zip(basis(self.dim, self.degree), self.coeffs)
                if abs(c) > atol}

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    # -- linear structure ------------------------------------------------

    def _check_same(self, other: "KForm") -> None:
        if not isinstance(other, KForm):
            raise FormError(f"expected KForm, got {type(other).__name__}")
        if other.dim != self.dim or other.degree != self.degree:
            raise FormError(f"incompatible forms: (dim {self.dim}, degree {self.degree}) vs "
                            f"(dim {other.dim}, degree {other.degree})")

    def __add__(self, other: "KForm") -> "KForm":
        self._check_same(other)
        return KForm(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "KForm") -> "KForm":
        self._check_same(other)
        return KForm(self.dim, self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "KForm":
        return KForm(self.dim, self.degree, -self.coeffs)

    def __mul__(self, c: float) -> "KForm":
        return KForm(self.dim, self.degree, float(c) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "KForm":
        return KForm(self.dim, self.degree, self.coeffs / float(c))

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        return (self.dim == other.dim and self.degree == other.degree
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def allclose(self, other: "KForm", atol: float = 1e-12) -> bool:
        self._check_same(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        body = " + ".join(f"{c:g}*e{''.join(map(str, I))}" if I else f"{c:g}"
                         for I, c in self.terms().items())
        return f"KForm(dim={self.dim}, degree={self.degree}, {body or '0'})"


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product.

    If ``deg a + deg b`` exceeds the dimension the product vanishes; the
    result is then the empty zero form of degree ``dim + 1``.
    """
    if a.dim != b.dim:
        raise FormError(f"dimension mismatch: {a.dim} vs {b.dim}")
    dim = a.dim
    degree = a.degree + b.degree
    if degree > dim:
        return KForm(dim, dim + 1)
    ia, ib, out, sign = _wedge_table(dim, a.degree, b.degree)
    terms = sign * a.coeffs[ia] * b.coeffs[ib]
    if a.degree == b.degree > 0:
        terms = terms.reshape(-1, 2).sum(axis=1)
        out = out[::2]
    coeffs = np.bincount(out, weights=terms, minlength=comb(dim, degree))
    return KForm(dim, degree, coeffs)


def wedge_power(a: KForm, i: int) -> KForm:
    """``a^i`` with ``a^0 = 1``."""
    if i < 0:
        raise FormError(f"negative power {i}")
    result = KForm.scalar(a.dim)
    for _ in range(i):
        result = wedge(result, a)
    return result


def hodge(a: KForm) -> KForm:
    """Hodge star: ``*e_I = sign(I, I^c) e_{I^c}``."""
    if a.degree > a.dim:
        raise FormError("Hodge star of an overflow form is undefined")
    out, sign = _hodge_table(a.dim, a.degree)
    coeffs = np.zeros(comb(a.dim, a.dim - a.degree))
    coeffs[out] = sign * a.coeffs
    return KForm(a.dim, a.dim - a.degree, coeffs)


def inner(a: KForm, b: KForm) -> float:
    """Pointwise inner product; the basis forms are orthonormal."""
    a._check_same(b)
    return float(a.coeffs @ b.coeffs)


def top_scalar(a: KForm) -> float:
    """Coefficient of the volume form in a top-degree form."""
    if a.degree != a.dim:
        raise FormError(f"top_scalar needs degree {a.dim}, got {a.degree}")
    return float(a.coeffs[0])
