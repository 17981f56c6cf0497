"""Bergman kernel providers.

Every provider exposes the kernel as a function ``kernel(u, v)`` that is
holomorphic in ``u`` (the first slot) and in ``v`` (the conjugated second
slot), so ``K(z, w) = kernel(z, conj(w))``.  Because the formulas are plain
arithmetic, the same code evaluates on complex numbers and on Wirtinger jets;
``log_jet(z, D)`` feeds it the coordinate jets ``z + h`` and ``conj(z) + hbar``.
"""

from __future__ import annotations

import csv
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from . import wjet
from .errors import DomainError
from .tolerances import SERIES_TAIL_TOL
from .wjet import WJet, coordinate_jets, jet_const, jet_det

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# small helpers for mixed scalar/jet linear algebra

def _lin(row, u):
    """sum_j row[j] * u[j], skipping exact zeros."""
    acc = None
    for a, x in zip(row, u):
        if isinstance(a, (int, float, complex, np.number)) and a == 0:
            continue
        term = x * a
        acc = term if acc is None else acc + term
    if acc is None:
        return 0.0 * u[0]
    return acc


def matvec(A, u):
    return [_lin(row, u) for row in A]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[_lin(row, col) for col in Bt] for row in A]


def _as_point(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def _is_numeric(u) -> bool:
    return not any(isinstance(x, WJet) for x in u)


# ---------------------------------------------------------------------------
# biholomorphisms

class Biholomorphism:
    """Holomorphic map with a jet-evaluable forward map and Jacobian.

    ``forward`` and ``jacobian`` receive a list of coordinates (complex
    numbers or jets) and return a list / nested list of the same kind.
    """

    def __init__(
        self,
        n: int,
        forward: Callable,
        jacobian: Callable,
        inverse: Callable | None = None,
        name: str = "map",
    ):
        self.n = n
        self._forward = forward
        self._jacobian = jacobian
        self._inverse = inverse
        self.name = name

    def __call__(self, z):
        if isinstance(z, (list, tuple)) and not _is_numeric(z):
            return list(self._forward(list(z)))
        z = _as_point(z)
        return np.array([complex(x) for x in self._forward(list(z))])

    def jacobian(self, z):
        if isinstance(z, (list, tuple)) and not _is_numeric(z):
            return self._jacobian(list(z))
        J = self._jacobian(list(_as_point(z)))
        return np.array([[complex(x) for x in row] for row in J])

    def inverse(self, w):
        if self._inverse is None:
            raise NotImplementedError(f"{self.name} has no inverse")
        if isinstance(w, (list, tuple)) and not _is_numeric(w):
            return list(self._inverse(list(w)))
        w = _as_point(w)
        return np.array([complex(x) for x in self._inverse(list(w))])

    @property
    def has_inverse(self) -> bool:
        return self._inverse is not None

    def det_jacobian(self, u):
        """det of the complex Jacobian at ``u`` (scalars or jets)."""
        J = self._jacobian(list(u))
        if _is_numeric([x for row in J for x in row]):
            return complex(np.linalg.det(np.array(J, dtype=complex)))
        return jet_det(J)

    def jacobian_det_jet(self, z, D: int = wjet.DEFAULT_DEGREE) -> WJet:
        u, _ = coordinate_jets(z, D)
        d = self.det_jacobian(u)
        return d if isinstance(d, WJet) else jet_const(d, len(u), D)

    def conj_forward(self, v):
        """``conj(F(conj(v)))``: the map acting on the conjugated slot."""
        return [wjet.conj(x) for x in self._forward([wjet.conj(x) for x in v])]

    def conj_det_jacobian(self, v):
        return wjet.conj(self.det_jacobian([wjet.conj(x) for x in v]))

    def inverse_map(self) -> "Biholomorphism":
        if self._inverse is None:
            raise NotImplementedError(f"{self.name} has no inverse")
        fwd = self._forward
        inv = self._inverse
        jac = self._jacobian

        def inv_jacobian(w):
            z = inv(w)
            J = jac(z)
            if _is_numeric([x for row in J for x in row]):
                return np.linalg.inv(np.array(J, dtype=complex)).tolist()
            return _jet_matrix_inverse(J)

        return Biholomorphism(self.n, inv, inv_jacobian, fwd, name=f"inv({self.name})")


def _jet_matrix_inverse(J):
    """Inverse of a small matrix with jet entries by Gauss-Jordan elimination."""
    n = len(J)
    ref = next(x for row in J for x in row if isinstance(x, WJet))
    one = jet_const(1.0, ref.dim, ref.degree)
    A = [[x if isinstance(x, WJet) else one * x for x in row] for row in J]
    I = [[one if i == j else one * 0.0 for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(A[i][k].const))
        A[k], A[piv] = A[piv], A[k]
        I[k], I[piv] = I[piv], I[k]
        inv = wjet.jet_inv(A[k][k])
        A[k] = [x * inv for x in A[k]]
        I[k] = [x * inv for x in I[k]]
        for i in range(n):
            if i == k:
                continue
            f = A[i][k]
            A[i] = [a - f * b for a, b in zip(A[i], A[k])]
            I[i] = [a - f * b for a, b in zip(I[i], I[k])]
    return I


def compose(g: Biholomorphism, f: Biholomorphism) -> Biholomorphism:
    """``g o f`` with chain-rule Jacobian."""

    def forward(u):
        return g._forward(f._forward(u))

    def jacobian(u):
        return matmul(g._jacobian(f._forward(u)), f._jacobian(u))

    inverse = None
    if f.has_inverse and g.has_inverse:

        def inverse(w):
            return f._inverse(g._inverse(w))

    return Biholomorphism(f.n, forward, jacobian, inverse, name=f"{g.name}*{f.name}")


def compose_all(*maps: Biholomorphism) -> Biholomorphism:
    """``maps[0] o maps[1] o ... o maps[-1]``."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out


def identity_map(n: int) -> Biholomorphism:
    eye = np.eye(n, dtype=complex)
    return Biholomorphism(n, lambda u: list(u), lambda u: eye.tolist(), lambda w: list(w), name="id")


def affine_map(A, b=None, name: str = "affine") -> Biholomorphism:
    """``u -> A u + b``."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    b = np.zeros(n, dtype=complex) if b is None else np.asarray(b, dtype=complex)
    Ainv = np.linalg.inv(A)
    Al, Ainvl = A.tolist(), Ainv.tolist()

    def forward(u):
        return [x + c for x, c in zip(matvec(Al, u), b)]

    def inverse(w):
        return matvec(Ainvl, [x - c for x, c in zip(w, b)])

    return Biholomorphism(n, forward, lambda u: Al, inverse, name=name)


def ball_automorphism(a, U=None) -> Biholomorphism:
    """``U o phi_a``, with ``phi_a`` the involutive automorphism of the ball swapping ``a`` and 0."""
    a = _as_point(a)
    n = a.size
    aa = float(np.vdot(a, a).real)
    if aa >= 1.0:
        raise DomainError("automorphism centre must lie in the unit ball")
    s = math.sqrt(1.0 - aa)
    if aa > 0:
        P = np.outer(a, a.conj()) / aa
    else:
        P = np.zeros((n, n), dtype=complex)
    A = P + s * (np.eye(n) - P)
    U = np.eye(n, dtype=complex) if U is None else np.asarray(U, dtype=complex)
    Al, Ul, Uh = A.tolist(), U.tolist(), U.conj().T.tolist()
    abar = a.conj()

    def phi(u):
        d = 1.0 - _lin(abar, u)
        num = [ai - x for ai, x in zip(a, matvec(Al, u))]
        return [x / d for x in num]

    def phi_jac(u):
        d = 1.0 - _lin(abar, u)
        num = [ai - x for ai, x in zip(a, matvec(Al, u))]
        d2 = d * d
        return [[(num[i] * abar[j] - Al[i][j] * d) / d2 for j in range(n)] for i in range(n)]

    def forward(u):
        return matvec(Ul, phi(u))

    def jacobian(u):
        return matmul(Ul, phi_jac(u))

    def inverse(w):
        return phi(matvec(Uh, w))

    return Biholomorphism(n, forward, jacobian, inverse, name="ball_aut")


def random_ball_automorphism(n: int, rng: np.random.Generator, radius: float = 0.6) -> Biholomorphism:
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    a *= radius * rng.uniform() ** (1.0 / (2 * n)) / np.linalg.norm(a)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return ball_automorphism(a, Q)


# ---------------------------------------------------------------------------
# providers

class KernelProvider:
    """Base class: subclasses implement ``kernel`` and ``contains``."""

    dim: int
    domain_tag: str

    def kernel(self, u, v):
        raise NotImplementedError

    def log_kernel(self, u, v):
        return wjet.log(self.kernel(u, v))

    def contains(self, z) -> bool:
        raise NotImplementedError

    def _require(self, z):
        if not self.contains(z):
            raise DomainError(f"point {np.asarray(z)} outside {self.domain_tag}")

    def evaluate(self, z, w=None) -> complex:
        """``K(z, w)``; ``w`` defaults to ``z`` (diagonal)."""
        z = _as_point(z)
        w = z if w is None else _as_point(w)
        self._require(z)
        self._require(w)
        return complex(self.kernel(list(z), list(np.conj(w))))

    def log_jet(self, z, D: int = wjet.DEFAULT_DEGREE) -> WJet:
        """Jet of ``log K(z + h, z + h)`` in ``(h, hbar)``."""
        z = _as_point(z)
        self._require(z)
        u, v = coordinate_jets(z, D)
        return self.log_kernel(u, v)


def _sum_uv(u, v, idx):
    return _lin_pairs([(u[i], v[i]) for i in idx])


def _lin_pairs(pairs):
    acc = None
    for x, y in pairs:
        t = x * y
        acc = t if acc is None else acc + t
    return acc


class BallKernel(KernelProvider):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.dim = n
        self.domain_tag = f"ball{n}"
        self.const = math.factorial(n) / math.pi**n

    def _rho(self, u, v):
        return 1.0 - _sum_uv(u, v, range(self.dim))

    def kernel(self, u, v):
        return self.const * self._rho(u, v) ** (-(self.dim + 1))

    def log_kernel(self, u, v):
        return math.log(self.const) - (self.dim + 1) * wjet.log(self._rho(u, v))

    def contains(self, z) -> bool:
        z = _as_point(z)
        return z.size == self.dim and float(np.vdot(z, z).real) < 1.0


class PolydiscKernel(KernelProvider):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.dim = n
        self.domain_tag = f"polydisc{n}"

    def kernel(self, u, v):
        out = 1.0
        for x, y in zip(u, v):
            out = out * ((1.0 - x * y) ** -2 / math.pi)
        return out

    def log_kernel(self, u, v):
        acc = -self.dim * math.log(math.pi)
        for x, y in zip(u, v):
            acc = acc - 2.0 * wjet.log(1.0 - x * y)
        return acc

    def contains(self, z) -> bool:
        z = _as_point(z)
        return z.size == self.dim and bool(np.all(np.abs(z) < 1.0))


class SiegelKernel(KernelProvider):
    """Closed-form kernel of ``{2 Re z_n + |'z|^2 < 0}``."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.dim = n
        self.domain_tag = f"siegel{n}"
        self.const = math.factorial(n) / math.pi**n

    def _rho(self, u, v):
        n = self.dim
        s = u[n - 1] + v[n - 1]
        if n > 1:
            s = s + _sum_uv(u, v, range(n - 1))
        return -s

    def kernel(self, u, v):
        return self.const * self._rho(u, v) ** (-(self.dim + 1))

    def log_kernel(self, u, v):
        return math.log(self.const) - (self.dim + 1) * wjet.log(self._rho(u, v))

    def contains(self, z) -> bool:
        z = _as_point(z)
        r = 2.0 * z[-1].real + float(np.vdot(z[:-1], z[:-1]).real)
        return z.size == self.dim and r < 0.0


class TransformedKernel(KernelProvider):
    """Kernel of ``Omega_1`` obtained from ``Omega_2`` through ``F: Omega_1 -> Omega_2``."""

    def __init__(self, target: KernelProvider, F: Biholomorphism, domain_tag: str | None = None):
        self.target = target
        self.F = F
        self.dim = target.dim
        self.domain_tag = domain_tag or f"{F.name}^*({target.domain_tag})"

    def kernel(self, u, v):
        jf = self.F.det_jacobian(u)
        jg = self.F.conj_det_jacobian(v)
        return jf * self.target.kernel(self.F._forward(list(u)), self.F.conj_forward(v)) * jg

    def log_kernel(self, u, v):
        jf = self.F.det_jacobian(u)
        jg = self.F.conj_det_jacobian(v)
        inner = self.target.log_kernel(self.F._forward(list(u)), self.F.conj_forward(v))
        return inner + wjet.log(jf) + wjet.log(jg)

    def contains(self, z) -> bool:
        try:
            w = self.F(z)
        except ZeroDivisionError:
            return False
        return bool(np.all(np.isfinite(w))) and self.target.contains(w)


def transform_kernel(target: KernelProvider, F: Biholomorphism, domain_tag: str | None = None):
    return TransformedKernel(target, F, domain_tag)


def ball_kernel(n: int) -> BallKernel:
    return BallKernel(n)


def polydisc_kernel(n: int) -> PolydiscKernel:
    return PolydiscKernel(n)


def siegel_kernel(n: int) -> SiegelKernel:
    return SiegelKernel(n)


# ---------------------------------------------------------------------------
# complete Reinhardt domains sum_i |z_i|^(2 p_i) < 1

@dataclass(frozen=True)
class ReinhardtSpec:
    """Complex ellipsoid with exponents ``p`` and total-degree truncation ``N``."""

    p: tuple[float, ...]
    N: int = 40
    tail_tol: float = field(default=SERIES_TAIL_TOL, compare=False)

    def __post_init__(self):
        p = tuple(float(x) for x in np.atleast_1d(self.p))
        if not p or any(x <= 0 for x in p):
            raise ValueError("exponents must be positive")
        if self.N < 0:
            raise ValueError("truncation must be non-negative")
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return len(self.p)

    def with_truncation(self, N: int) -> "ReinhardtSpec":
        return ReinhardtSpec(self.p, int(N), self.tail_tol)

    def moment_table(self, max_degree: int = 6) -> dict[tuple[int, ...], float]:
        return {a: reinhardt_moment(self, a) for a in _multi_indices(self.dim, max_degree)}


def _multi_indices(n: int, max_degree: int):
    for d in range(max_degree + 1):
        for combo in _compositions(d, n):
            yield combo


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _log_inv_moment(p, alphas):
    """``-log c_alpha`` from the Beta form; ``alphas`` broadcast per axis."""
    n = len(p)
    s = 1.0
    acc = -n * math.log(math.pi) + sum(math.log(pi) for pi in p)
    for pi, a in zip(p, alphas):
        x = (np.asarray(a, dtype=float) + 1.0) / pi
        s = s + x
        acc = acc - gammaln(x)
    return acc + gammaln(s)


def reinhardt_moment(spec: ReinhardtSpec | Sequence[float], alpha, method: str = "beta") -> float:
    """``c_alpha = int |z^alpha|^2 dV`` over the ellipsoid.

    ``method="beta"`` uses the closed Gamma-function form and falls back to
    quadrature if that overflows; ``method="quad"`` forces quadrature.
    """
    p = spec.p if isinstance(spec, ReinhardtSpec) else tuple(float(x) for x in spec)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(p) or any(a < 0 for a in alpha):
        raise ValueError(f"bad multi-index {alpha} for dimension {len(p)}")
    if method == "beta":
        val = math.exp(-float(_log_inv_moment(p, alpha)))
        if math.isfinite(val) and val > 0:
            return val
        method = "quad"
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    return reinhardt_moment_quad(p, alpha)


def reinhardt_moment_quad(p, alpha, epsrel: float = 1e-12) -> float:
    """Polar-coordinate quadrature: (2 pi)^n int prod r_i^(2 a_i + 1) dr over sum r_i^(2 p_i) < 1."""
    p = tuple(float(x) for x in p)
    n = len(p)

    def integrand(*r):
        return math.prod(ri ** (2 * a + 1) for ri, a in zip(r, alpha))

    def bounds_for(i):
        def bounds(*outer):
            # nquad passes inner-to-outer: outer = (r_{i-1}, ..., r_0)
            used = sum(rk ** (2 * p[k]) for k, rk in zip(range(i - 1, -1, -1), outer))
            top = max(1.0 - used, 0.0) ** (1.0 / (2 * p[i]))
            return (0.0, top)

        return bounds

    ranges = [bounds_for(i) for i in range(n - 1, -1, -1)]
    # nquad integrates the first argument innermost; reverse so r_0 is outermost
    val, _ = integrate.nquad(
        lambda *r: integrand(*reversed(r)), ranges, opts={"epsrel": epsrel, "epsabs": 0.0, "limit": 200}
    )
    return (2 * math.pi) ** n * val


def write_moment_csv(path, table: dict[tuple[int, ...], float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for alpha, c in table.items():
            w.writerow([*alpha, f"{c:.17g}"])


def read_moment_csv(path) -> dict[tuple[int, ...], float]:
    out = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            *alpha, c = row
            out[tuple(int(a) for a in alpha)] = float(c)
    return out


@dataclass(frozen=True)
class SeriesInfo:
    N: int
    tail: float
    flagged: bool


_ZERO_T = 1e-30
_CHUNK = 1 << 21


@functools.lru_cache(maxsize=256)
def _series_derivatives(p: tuple, N: int, t0: tuple, D: int):
    """Partial derivatives ``d^gamma F(t0)``, ``|gamma| <= D``, of ``F(t) = sum t^alpha / c_alpha``.

    Returns ``(gammas, values, rel_tail)``.  Terms are formed in log space so
    that ``1/c_alpha`` (which grows geometrically in ``|alpha|``) never
    overflows; axes with ``t0_i == 0`` only need ``alpha_i <= D``.
    """
    n = len(p)
    t0 = np.asarray(t0, dtype=complex)
    zero = np.abs(t0) < _ZERO_T
    ranges = [np.arange(0, (min(N, D) if zero[i] else N) + 1) for i in range(n)]
    logt = np.where(zero, 0.0, np.log(np.where(zero, 1.0, t0)))

    # per-axis factors A_i[g, a]
    A = []
    for i in range(n):
        a = ranges[i].astype(float)
        F = np.zeros((D + 1, a.size), dtype=complex)
        if zero[i]:
            for g in range(min(D, a.size - 1) + 1):
                F[g, g] = math.factorial(g)
        else:
            ff = np.ones(a.size)
            inv_t = 1.0 / t0[i]
            scale = 1.0 + 0j
            for g in range(D + 1):
                if g > 0:
                    ff = ff * (a - g + 1)
                    ff[: g] = 0.0
                    scale = scale * inv_t
                F[g] = ff * scale
        A.append(F)

    full = np.zeros((D + 1,) * n, dtype=complex)
    shellN = np.zeros_like(full)
    shellN1 = np.zeros_like(full)
    inner = math.prod(r.size for r in ranges[1:]) if n > 1 else 1
    step = max(1, _CHUNK // max(inner, 1))
    letters = "abcdefgh"[:n]
    glet = "pqrstuvw"[:n]
    spec_str = ",".join(f"{g}{a}" for g, a in zip(glet, letters))
    ein = f"{letters},{spec_str}->{glet}"
    for start in range(0, ranges[0].size, step):
        r0 = ranges[0][start : start + step]
        grids = np.meshgrid(r0, *ranges[1:], indexing="ij", sparse=True)
        deg = sum(grids)
        logw = _log_inv_moment(p, grids)
        for i in range(n):
            if not zero[i]:
                logw = logw + grids[i] * logt[i]
        W = np.where(deg <= N, np.exp(logw), 0.0)
        facs = [A[0][:, start : start + step]] + A[1:]
        full += np.einsum(ein, W, *facs, optimize=True)
        if N >= 1:
            shellN += np.einsum(ein, np.where(deg == N, W, 0.0), *facs, optimize=True)
            shellN1 += np.einsum(ein, np.where(deg == N - 1, W, 0.0), *facs, optimize=True)

    gammas = [g for g in _multi_indices(n, D)]
    vals = np.array([full[g] for g in gammas])
    sN = np.array([abs(shellN[g]) for g in gammas])
    sN1 = np.array([abs(shellN1[g]) for g in gammas])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(sN1 > 0, sN / sN1, np.where(sN > 0, np.inf, 0.0))
        tail = np.where(rho < 1, sN * rho / (1 - rho), np.where(sN > 0, np.inf, 0.0))
        rel = np.where(np.abs(vals) > 0, tail / np.abs(vals), np.where(tail > 0, np.inf, 0.0))
    return gammas, vals, float(np.max(rel))


class ReinhardtKernel(KernelProvider):
    """Truncated orthonormal-monomial series ``sum_{|alpha|<=N} z^alpha conj(w)^alpha / c_alpha``."""

    def __init__(self, spec: ReinhardtSpec):
        self.spec = spec
        self.dim = spec.dim
        self.domain_tag = "ellipsoid(" + ",".join(f"{x:g}" for x in spec.p) + f";N={spec.N})"

    def contains(self, z) -> bool:
        z = _as_point(z)
        if z.size != self.dim:
            return False
        return float(sum(abs(zi) ** (2 * pi) for zi, pi in zip(z, self.spec.p))) < 1.0

    def _derivs(self, t0, D):
        key = tuple(complex(x) for x in t0)
        return _series_derivatives(self.spec.p, self.spec.N, key, D)

    def kernel(self, u, v):
        n = self.dim
        t = [x * y for x, y in zip(u, v)]
        t0 = [wjet.const_part(x) for x in t]
        if _is_numeric(t):
            _, vals, _ = self._derivs(t0, 0)
            return complex(vals[0])
        ref = next(x for x in t if isinstance(x, WJet))
        D = ref.degree
        gammas, vals, rel = self._derivs(t0, D)
        if rel > self.spec.tail_tol:
            log.warning("series tail %.3g exceeds %.3g (N=%d)", rel, self.spec.tail_tol, self.spec.N)
        s = [x - c for x, c in zip(t, t0)]
        powers = []
        for i in range(n):
            pw = [jet_const(1.0, ref.dim, D)]
            for _ in range(D):
                pw.append(pw[-1] * s[i])
            powers.append(pw)
        acc = jet_const(0.0, ref.dim, D)
        for g, val in zip(gammas, vals):
            coef = val / math.prod(math.factorial(k) for k in g)
            term = None
            for i, k in enumerate(g):
                if k:
                    term = powers[i][k] if term is None else term * powers[i][k]
            acc = acc + (coef if term is None else term * coef)
        return acc

    def series_info(self, z, D: int = wjet.DEFAULT_DEGREE) -> SeriesInfo:
        z = _as_point(z)
        t0 = [zi * np.conj(zi) for zi in z]
        _, _, rel = self._derivs(t0, D)
        return SeriesInfo(self.spec.N, rel, rel > self.spec.tail_tol)


def reinhardt_kernel(spec: ReinhardtSpec) -> ReinhardtKernel:
    return ReinhardtKernel(spec)


def choose_truncation(
    spec: ReinhardtSpec,
    points,
    D: int = wjet.DEFAULT_DEGREE,
    tol: float | None = None,
    N_start: int = 40,
    N_max: int = 20000,
) -> ReinhardtSpec:
    """Smallest ``N`` on a x1.5 ladder from ``N_start`` whose tail estimate is below ``tol`` at all points."""
    tol = spec.tail_tol if tol is None else tol
    pts = [_as_point(z) for z in np.atleast_2d(np.asarray(points, dtype=complex))]
    N = N_start
    while True:
        cand = ReinhardtKernel(spec.with_truncation(N))
        if all(cand.series_info(z, D).tail <= tol for z in pts):
            return cand.spec
        if N >= N_max:
            log.warning("truncation capped at N=%d without meeting tail %.3g", N_max, tol)
            return cand.spec
        N = min(N_max, int(math.ceil(N * 1.5)))
