"""Truncated Wirtinger-jet arithmetic.

A :class:`WJet` stores the Taylor coefficients of a function of ``(z, zbar)``
at a base point, written in the formal increments ``h_1..h_n`` (holomorphic)
and ``hbar_1..hbar_n`` (antiholomorphic), truncated at total degree ``D``.
The increments are treated as independent variables, so a coefficient at the
pair ``(alpha, beta)`` is ``d^alpha_z d^beta_zbar f / (alpha! beta!)``.

Coefficients live in a dense complex array indexed by a graded ordering of the
``2n``-component exponent vectors (holomorphic part first).  Because the order
is graded, truncating to a lower degree is a prefix slice.

Jets support ``+ - * / **`` with each other and with scalars, so closed-form
kernels and holomorphic maps can be written once and evaluated on either
complex numbers or jets.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import JetStructureError, SingularJetError, SingularMatrixError

DEFAULT_DEGREE = 6
HOLO = "holo"
ANTI = "anti"


@dataclass(frozen=True)
class MultiIndexPair:
    """Orders ``(alpha, beta)`` of a mixed derivative d^alpha_z d^beta_zbar."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        alpha = tuple(int(a) for a in self.alpha)
        beta = tuple(int(b) for b in self.beta)
        if len(alpha) != len(beta):
            raise JetStructureError("alpha and beta must have equal length")
        if any(a < 0 for a in alpha + beta):
            raise JetStructureError("multi-index entries must be non-negative")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def order(self) -> int:
        return sum(self.alpha) + sum(self.beta)

    @property
    def exponent(self) -> tuple[int, ...]:
        return self.alpha + self.beta

    @classmethod
    def unit(cls, n: int, holo: int | None = None, anti: int | None = None):
        """Pair with a single 1 in holomorphic slot ``holo`` and/or anti slot ``anti`` (0-based)."""
        a = [0] * n
        b = [0] * n
        if holo is not None:
            a[holo] = 1
        if anti is not None:
            b[anti] = 1
        return cls(tuple(a), tuple(b))


def _as_pair(idx) -> MultiIndexPair:
    if isinstance(idx, MultiIndexPair):
        return idx
    alpha, beta = idx
    return MultiIndexPair(tuple(alpha), tuple(beta))


class _Basis:
    """Monomial table for a given (n, D): ordering, lookup, product pairs."""

    def __init__(self, n: int, degree: int):
        self.n = n
        self.degree = degree
        nvar = 2 * n
        exps = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(nvar), d):
                e = [0] * nvar
                for k in combo:
                    e[k] += 1
                exps.append(tuple(e))
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), nvar)
        self.size = len(exps)
        self.deg = self.exps.sum(axis=1)
        self.index = {e: i for i, e in enumerate(exps)}
        # exponents never exceed `degree` componentwise, so base-(D+1) keys add
        radix = degree + 1
        self._weights = radix ** np.arange(nvar, dtype=np.int64)
        self.keys = self.exps @ self._weights
        self._key_order = np.argsort(self.keys)
        self._sorted_keys = self.keys[self._key_order]

    def lookup_keys(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_keys, keys)
        return self._key_order[pos]

    @functools.cached_property
    def mul_table(self):
        i, j = np.nonzero(self.deg[:, None] + self.deg[None, :] <= self.degree)
        k = self.lookup_keys(self.keys[i] + self.keys[j])
        return i, j, k

    def size_at(self, degree: int) -> int:
        return int(np.count_nonzero(self.deg <= degree))


@functools.lru_cache(maxsize=None)
def basis(n: int, degree: int) -> _Basis:
    if n < 1 or degree < 0:
        raise JetStructureError(f"invalid jet shape n={n}, D={degree}")
    return _Basis(n, degree)


@functools.lru_cache(maxsize=None)
def _shift_table(n: int, degree: int, exponent: tuple[int, ...]):
    src = basis(n, degree)
    order = sum(exponent)
    dst = basis(n, degree - order)
    shifted = dst.exps + np.array(exponent, dtype=np.int64)
    idx = src.lookup_keys(shifted @ src._weights)
    # (m + e)! / m! per component
    factor = np.ones(dst.size)
    for c, e in enumerate(exponent):
        for k in range(1, e + 1):
            factor *= dst.exps[:, c] + k
    return idx, factor


def _is_scalar(x) -> bool:
    return isinstance(x, numbers.Number) and not isinstance(x, bool)


class WJet:
    """Truncated Taylor table in ``(h, hbar)``; immutable value type."""

    __slots__ = ("dim", "degree", "coeffs")
    __array_ufunc__ = None

    def __init__(self, dim: int, degree: int, coeffs):
        b = basis(dim, degree)
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (b.size,):
            raise JetStructureError(f"expected {b.size} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("WJet is immutable")

    @property
    def basis(self) -> _Basis:
        return basis(self.dim, self.degree)

    @property
    def const(self) -> complex:
        return complex(self.coeffs[0])

    def coeff(self, idx) -> complex:
        pair = _as_pair(idx)
        if len(pair.alpha) != self.dim:
            raise JetStructureError("multi-index length does not match jet dimension")
        if pair.order > self.degree:
            raise JetStructureError(f"order {pair.order} exceeds jet degree {self.degree}")
        return complex(self.coeffs[self.basis.index[pair.exponent]])

    def truncate(self, degree: int) -> "WJet":
        if degree > self.degree or degree < 0:
            raise JetStructureError(f"cannot truncate degree {self.degree} jet to {degree}")
        if degree == self.degree:
            return self
        return WJet(self.dim, degree, self.coeffs[: self.basis.size_at(degree)])

    def conj(self) -> "WJet":
        """Jet of the complex conjugate function: swaps h <-> hbar and conjugates."""
        b = self.basis
        n = self.dim
        swapped = np.concatenate([b.exps[:, n:], b.exps[:, :n]], axis=1)
        idx = b.lookup_keys(swapped @ b._weights)
        return WJet(n, self.degree, np.conj(self.coeffs[idx]))

    def nilpotent(self) -> "WJet":
        c = self.coeffs.copy()
        c[0] = 0.0
        return WJet(self.dim, self.degree, c)

    def _check(self, other: "WJet"):
        if other.dim != self.dim or other.degree != self.degree:
            raise JetStructureError(
                f"jet shape mismatch: (n={self.dim}, D={self.degree}) vs (n={other.dim}, D={other.degree})"
            )

    # ring operations

    def __add__(self, other):
        if isinstance(other, WJet):
            self._check(other)
            return WJet(self.dim, self.degree, self.coeffs + other.coeffs)
        if _is_scalar(other):
            c = self.coeffs.copy()
            c[0] += other
            return WJet(self.dim, self.degree, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return WJet(self.dim, self.degree, -self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, WJet) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if _is_scalar(other):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, WJet):
            self._check(other)
            i, j, k = self.basis.mul_table
            prod = self.coeffs[i] * other.coeffs[j]
            m = self.basis.size
            out = np.bincount(k, weights=prod.real, minlength=m) + 1j * np.bincount(
                k, weights=prod.imag, minlength=m
            )
            return WJet(self.dim, self.degree, out)
        if _is_scalar(other):
            return WJet(self.dim, self.degree, self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, WJet):
            return self * jet_inv(other)
        if _is_scalar(other):
            return WJet(self.dim, self.degree, self.coeffs / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return jet_inv(self) * other
        return NotImplemented

    def __pow__(self, s):
        if isinstance(s, numbers.Integral) and s >= 0:
            return _int_pow(self, int(s))
        if _is_scalar(s):
            return jet_pow(self, s)
        return NotImplemented

    def __repr__(self):
        nz = np.count_nonzero(self.coeffs)
        return f"WJet(n={self.dim}, D={self.degree}, const={self.const:.6g}, nonzero={nz})"

    def allclose(self, other: "WJet", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        self._check(other)
        scale = max(np.max(np.abs(self.coeffs)), np.max(np.abs(other.coeffs)), 1e-300)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol + rtol * scale)


def _int_pow(a: WJet, s: int) -> WJet:
    result = jet_const(1.0, a.dim, a.degree)
    base = a
    while s:
        if s & 1:
            result = result * base
        s >>= 1
        if s:
            base = base * base
    return result


# constructors

def jet_const(c: complex, n: int, D: int = DEFAULT_DEGREE) -> WJet:
    coeffs = np.zeros(basis(n, D).size, dtype=complex)
    coeffs[0] = c
    return WJet(n, D, coeffs)


def jet_var(i: int, kind: str, base: complex, n: int, D: int = DEFAULT_DEGREE) -> WJet:
    """Coordinate jet ``base + h_i`` (kind ``holo``) or ``base + hbar_i`` (kind ``anti``); ``i`` is 1-based."""
    if not 1 <= i <= n:
        raise JetStructureError(f"variable index {i} out of range 1..{n}")
    if kind not in (HOLO, ANTI):
        raise JetStructureError(f"unknown variable kind {kind!r}")
    b = basis(n, D)
    coeffs = np.zeros(b.size, dtype=complex)
    coeffs[0] = base
    if D >= 1:
        e = [0] * (2 * n)
        e[(i - 1) if kind == HOLO else (n + i - 1)] = 1
        coeffs[b.index[tuple(e)]] = 1.0
    return WJet(n, D, coeffs)


def coordinate_jets(z, D: int = DEFAULT_DEGREE) -> tuple[list[WJet], list[WJet]]:
    """Jets of ``z + h`` and ``conj(z) + hbar`` for a base point ``z``."""
    z = np.asarray(z, dtype=complex)
    n = z.size
    u = [jet_var(i + 1, HOLO, z[i], n, D) for i in range(n)]
    v = [jet_var(i + 1, ANTI, np.conj(z[i]), n, D) for i in range(n)]
    return u, v


# functional aliases for the ring operations

def jet_add(a: WJet, b) -> WJet:
    return a + b


def jet_mul(a: WJet, b) -> WJet:
    return a * b


def jet_neg(a: WJet) -> WJet:
    return -a


def jet_scale(a: WJet, s) -> WJet:
    if not _is_scalar(s):
        raise JetStructureError("jet_scale expects a scalar")
    return a * s


# transcendental operations; each expands in the nilpotent part, which is exact
# because m**(D+1) == 0 in the truncated ring.

def _split(a: WJet, op: str):
    c = a.const
    if c == 0:
        raise SingularJetError(f"{op} of a jet with zero constant term")
    return c, a.nilpotent()


def jet_inv(a: WJet) -> WJet:
    c, m = _split(a, "inverse")
    x = m / c
    r = jet_const(1.0, a.dim, a.degree)
    for _ in range(a.degree):
        r = 1.0 - x * r
    return r / c


def jet_div(a: WJet, b: WJet) -> WJet:
    return a * jet_inv(b)


def jet_log(a: WJet) -> WJet:
    c, m = _split(a, "log")
    x = m / c
    D = a.degree
    if D == 0:
        return jet_const(cmath.log(c), a.dim, 0)
    r = jet_const((-1) ** (D + 1) / D, a.dim, D)
    for k in range(D - 1, 0, -1):
        r = (-1) ** (k + 1) / k + x * r
    return x * r + cmath.log(c)


def jet_exp(a: WJet) -> WJet:
    c = a.const
    m = a.nilpotent()
    D = a.degree
    r = jet_const(1.0, a.dim, D)
    for k in range(D, 0, -1):
        r = 1.0 + (m * r) / k
    return r * cmath.exp(c)


def jet_pow(a: WJet, s: float) -> WJet:
    """Principal-branch power ``a**s`` via the binomial series in the nilpotent part."""
    if isinstance(s, numbers.Integral) and s >= 0:
        return _int_pow(a, int(s))
    c, m = _split(a, "power")
    x = m / c
    D = a.degree
    coefs = [1.0]
    for k in range(1, D + 1):
        coefs.append(coefs[-1] * (s - k + 1) / k)
    r = jet_const(coefs[D], a.dim, D)
    for k in range(D - 1, -1, -1):
        r = coefs[k] + x * r
    return r * (c ** s)


# scalar/jet dispatch used by kernels and maps

def log(x):
    return jet_log(x) if isinstance(x, WJet) else cmath.log(x)


def exp(x):
    return jet_exp(x) if isinstance(x, WJet) else cmath.exp(x)


def conj(x):
    return x.conj() if isinstance(x, WJet) else np.conj(x)


def const_part(x) -> complex:
    return x.const if isinstance(x, WJet) else complex(x)


# derivatives

def extract_deriv(a: WJet, idx) -> complex:
    """``d^alpha_z d^beta_zbar f`` at the base point."""
    pair = _as_pair(idx)
    fact = math.prod(math.factorial(k) for k in pair.exponent)
    return a.coeff(pair) * fact


def jet_shift_derivative(a: WJet, idx) -> WJet:
    """Jet of ``d^alpha_z d^beta_zbar f``, of degree ``D - |alpha| - |beta|``."""
    pair = _as_pair(idx)
    if len(pair.alpha) != a.dim:
        raise JetStructureError("multi-index length does not match jet dimension")
    if pair.order > a.degree:
        raise JetStructureError(f"order {pair.order} exceeds jet degree {a.degree}")
    src, factor = _shift_table(a.dim, a.degree, pair.exponent)
    return WJet(a.dim, a.degree - pair.order, a.coeffs[src] * factor)


def d_holo(a: WJet, i: int) -> WJet:
    """d/dz_i (0-based)."""
    return jet_shift_derivative(a, MultiIndexPair.unit(a.dim, holo=i))


def d_anti(a: WJet, j: int) -> WJet:
    """d/dzbar_j (0-based)."""
    return jet_shift_derivative(a, MultiIndexPair.unit(a.dim, anti=j))


def complex_hessian(a: WJet) -> list[list[WJet]]:
    """Jets of ``d^2 f / dz_i dzbar_j`` as an ``n x n`` nested list."""
    n = a.dim
    return [
        [jet_shift_derivative(a, MultiIndexPair.unit(n, holo=i, anti=j)) for j in range(n)]
        for i in range(n)
    ]


def constant_matrix(M) -> np.ndarray:
    return np.array([[const_part(x) for x in row] for row in M], dtype=complex)


def jet_det(M) -> WJet:
    """Determinant over the jet ring by Gaussian elimination.

    Pivots are chosen by constant-term magnitude, which is what decides
    invertibility in the truncated ring.
    """
    rows = [list(r) for r in M]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise JetStructureError("jet_det needs a non-empty square matrix")
    ref = next((x for r in rows for x in r if isinstance(x, WJet)), None)
    if ref is None:
        raise JetStructureError("jet_det needs at least one jet entry")
    dim, D = ref.dim, ref.degree
    rows = [[x if isinstance(x, WJet) else jet_const(x, dim, D) for x in r] for r in rows]
    for r in rows:
        for x in r:
            ref._check(x)
    scale = max(abs(x.const) for r in rows for x in r)
    det = jet_const(1.0, dim, D)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(rows[i][k].const))
        if abs(rows[piv][k].const) <= 1e-14 * max(scale, 1e-300):
            raise SingularMatrixError("no pivot with nonzero constant term")
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        pivot = rows[k][k]
        det = det * pivot
        inv = jet_inv(pivot)
        for i in range(k + 1, n):
            f = rows[i][k] * inv
            for j in range(k + 1, n):
                rows[i][j] = rows[i][j] - f * rows[k][j]
    return det


def hermitian_defect(a: WJet) -> float:
    """max |coeff(beta, alpha) - conj(coeff(alpha, beta))| relative to max |coeff|."""
    scale = max(float(np.max(np.abs(a.coeffs))), 1e-300)
    return float(np.max(np.abs(a.conj().coeffs - a.coeffs))) / scale
