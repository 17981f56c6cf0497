"""Pinchuk scaling at a strictly pseudoconvex boundary point.

A :class:`DomainModel` carries a defining function ``r(u, v)`` written as
arithmetic in the holomorphic slot ``u`` and the conjugated slot ``v``, so
gradients and complex Hessians come from a degree-2 jet.  The scaling map at
a boundary foot ``p`` is ``S = T o Phi3 o Phi2 o Phi1`` composed with a rigid
normalization ``z -> U (z - p0)``:

* ``Phi1(z) = P (z - p)`` straightens the complex normal;
* ``Phi2`` removes the tangential holomorphic quadratic terms;
* ``Phi3`` makes the tangential Levi form the identity;
* ``T`` is the anisotropic dilation by ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import wjet
from .errors import ConvergenceError, DomainError, PseudoconvexityError
from .kernels import (
    Biholomorphism,
    KernelProvider,
    ReinhardtSpec,
    _as_point,
    _lin,
    affine_map,
    ball_kernel,
    compose_all,
    matvec,
    reinhardt_kernel,
    siegel_kernel,
    transform_kernel,
)
from .tolerances import STATIONARITY_ATOL, TANGENT_ATOL
from .wjet import MultiIndexPair, coordinate_jets, extract_deriv

B_STAR_IMAG = 0.0


def b_star(n: int) -> np.ndarray:
    """The base point ``('0, -1)`` of the Siegel domain."""
    b = np.zeros(n, dtype=complex)
    b[-1] = -1.0
    return b


@dataclass(frozen=True)
class BoundaryDerivatives:
    value: float
    grad_zbar: np.ndarray  # dr/dzbar_i
    hess_zz: np.ndarray  # d2r/dz_i dz_j
    hess_zzbar: np.ndarray  # d2r/dz_i dzbar_j

    @property
    def grad_z(self) -> np.ndarray:
        return self.grad_zbar.conj()


@dataclass
class DomainModel:
    """Defining function, kernel provider and per-domain constants."""

    dim: int
    r_expr: Callable
    provider: KernelProvider | None = None
    name: str = "domain"
    uniqueness_radius: float = 0.2
    # proof-only constants (c0, the comparison domain D, Omega_H) are not computed
    metadata: dict = field(default_factory=dict)

    def r(self, z) -> float:
        z = _as_point(z)
        return float(np.real(self.r_expr(list(z), list(z.conj()))))

    def contains(self, z) -> bool:
        return self.r(z) < 0.0

    def derivatives(self, z) -> BoundaryDerivatives:
        z = _as_point(z)
        n = self.dim
        u, v = coordinate_jets(z, 2)
        jet = self.r_expr(u, v)
        unit = MultiIndexPair.unit
        grad = np.array([extract_deriv(jet, unit(n, anti=i)) for i in range(n)])
        hzz = np.empty((n, n), dtype=complex)
        hzzb = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                a = [0] * n
                a[i] += 1
                a[j] += 1
                hzz[i, j] = extract_deriv(jet, (tuple(a), (0,) * n))
                hzzb[i, j] = extract_deriv(jet, unit(n, holo=i, anti=j))
        return BoundaryDerivatives(jet.const.real, grad, hzz, hzzb)

    def grad_zbar(self, z) -> np.ndarray:
        return self.derivatives(z).grad_zbar


def ball_model(n: int) -> DomainModel:
    def r(u, v):
        return _lin(u, v) - 1.0

    return DomainModel(n, r, ball_kernel(n), f"ball{n}", uniqueness_radius=0.2)


def siegel_model(n: int) -> DomainModel:
    def r(u, v):
        out = u[-1] + v[-1]
        if n > 1:
            out = out + _lin(u[:-1], v[:-1])
        return out

    return DomainModel(n, r, siegel_kernel(n), f"siegel{n}", uniqueness_radius=0.2)


def ellipsoid_model(p, N: int = 40, provider: KernelProvider | None = None) -> DomainModel:
    """``sum_i |z_i|^(2 p_i) < 1`` with the truncated monomial-series kernel."""
    spec = p if isinstance(p, ReinhardtSpec) else ReinhardtSpec(tuple(p), N)

    def r(u, v):
        acc = -1.0
        for x, y, pi in zip(u, v, spec.p):
            t = x * y
            acc = acc + (t ** int(pi) if float(pi).is_integer() else t ** pi)
        return acc

    prov = provider if provider is not None else reinhardt_kernel(spec)
    return DomainModel(spec.dim, r, prov, "ellipsoid(" + ",".join(f"{x:g}" for x in spec.p) + ")", 0.05)


# ---------------------------------------------------------------------------
# nearest boundary point


def _real_jacobian(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Real 2n x 2n Jacobian of ``f = A dz + B dzbar`` in coordinates (x, y)."""
    top = np.hstack([(A + B).real, -(A - B).imag])
    bot = np.hstack([(A + B).imag, (A - B).real])
    return np.vstack([top, bot])


def nearest_boundary_point(
    omega: DomainModel, z, radius: float | None = None, tol: float = 1e-13, maxiter: int = 50
) -> tuple[np.ndarray, float]:
    """Foot point ``p`` and distance ``delta`` via Newton on ``z - p = lam grad_zbar r(p), r(p) = 0``."""
    z = _as_point(z)
    n = omega.dim
    radius = omega.uniqueness_radius if radius is None else radius
    d0 = omega.derivatives(z)
    gnorm = float(np.linalg.norm(d0.grad_zbar))
    if d0.value >= 0:
        raise DomainError("point is not interior")
    if gnorm == 0 or abs(d0.value) / (2 * gnorm) > radius:
        raise DomainError(f"point too far from the boundary (uniqueness radius {radius})")

    # seed: projected-gradient steps onto r = 0
    p = z.copy()
    for _ in range(20):
        d = omega.derivatives(p)
        g = d.grad_zbar
        p = p - d.value * g / (2 * float(np.vdot(g, g).real))
        if abs(d.value) < 1e-14:
            break
    g = omega.derivatives(p).grad_zbar
    lam = float(np.vdot(g, z - p).real / np.vdot(g, g).real)

    for it in range(maxiter):
        d = omega.derivatives(p)
        g = d.grad_zbar
        F1 = z - p - lam * g
        F = np.concatenate([F1.real, F1.imag, [d.value]])
        if np.max(np.abs(F)) < tol:
            break
        # d(grad_zbar_i) = sum_j d2r/dz_j dzbar_i dp_j + d2r/dzbar_j dzbar_i dpbar_j
        A = -np.eye(n) - lam * d.hess_zzbar.T
        B = -lam * d.hess_zz.conj()
        J = np.zeros((2 * n + 1, 2 * n + 1))
        J[: 2 * n, : 2 * n] = _real_jacobian(A, B)
        J[:n, 2 * n] = -g.real
        J[n : 2 * n, 2 * n] = -g.imag
        # dr = 2 Re(sum conj(g_j) dp_j)
        J[2 * n, : 2 * n] = _real_jacobian(g.conj()[None, :], g[None, :])[0]
        step = np.linalg.solve(J, -F)
        p = p + step[:n] + 1j * step[n : 2 * n]
        lam = lam + step[2 * n]
    else:
        raise ConvergenceError(f"nearest point Newton did not converge; residual {np.max(np.abs(F)):.3g}")
    d = omega.derivatives(p)
    resid = np.max(np.abs(z - p - lam * d.grad_zbar))
    if resid > STATIONARITY_ATOL or abs(d.value) > STATIONARITY_ATOL:
        raise ConvergenceError(f"stationarity residual {resid:.3g}, r(p) = {d.value:.3g}")
    delta = float(np.linalg.norm(z - p))
    if delta > radius:
        raise DomainError(f"distance {delta:.3g} exceeds uniqueness radius {radius}")
    return p, delta


# ---------------------------------------------------------------------------
# coordinate changes


def _phase_fix(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > 1e-12))
    return v * (abs(v[k]) / v[k])


def _normalizing_unitary(g: np.ndarray) -> np.ndarray:
    """Unitary ``U`` with ``U g / |g| = e_n``; identity when ``g`` is already along ``e_n``."""
    n = g.size
    g = g / np.linalg.norm(g)
    en = np.zeros(n)
    en[-1] = 1.0
    if np.allclose(g, en, atol=1e-15):
        return np.eye(n, dtype=complex)
    M = np.column_stack([g, np.eye(n, dtype=complex)])
    Q, _ = np.linalg.qr(M)
    comp = []
    for k in range(1, n):
        q = Q[:, k]
        q = q - np.vdot(g, q) * g
        for c in comp:
            q = q - np.vdot(c, q) * c
        comp.append(_phase_fix(q / np.linalg.norm(q)))
    rows = [c.conj() for c in comp] + [g.conj()]
    return np.array(rows)


def normalize_coordinates(omega: DomainModel, p0) -> tuple[Biholomorphism, DomainModel]:
    """Rigid map ``w = U (z - p0)`` and the domain in ``w`` with ``grad_zbar r(0) = ('0, 1)``."""
    p0 = _as_point(p0)
    g = omega.derivatives(p0).grad_zbar
    gn = float(np.linalg.norm(g))
    if gn == 0:
        raise DomainError("defining function has zero gradient at p0")
    U = _normalizing_unitary(g)
    rigid = affine_map(U, -U @ p0, name="rigid")
    back = affine_map(U.conj().T, p0, name="rigid_inv")
    Uh = U.conj().T.tolist()
    UT = U.T.tolist()
    p0c = p0.conj()

    def r(u, v):
        z = [x + c for x, c in zip(matvec(Uh, u), p0)]
        zb = [x + c for x, c in zip(matvec(UT, v), p0c)]
        return omega.r_expr(z, zb) * (1.0 / gn)

    provider = None
    if omega.provider is not None:
        provider = transform_kernel(omega.provider, back, domain_tag=f"normalized({omega.provider.domain_tag})")
    model = DomainModel(
        omega.dim, r, provider, f"normalized({omega.name})", omega.uniqueness_radius,
        {"p0": p0, "U": U, "gradient_scale": gn},
    )
    return rigid, model


def phi1_matrix(d: BoundaryDerivatives) -> np.ndarray:
    g = d.grad_zbar
    dz = d.grad_z
    n = g.size
    P = np.zeros((n, n), dtype=complex)
    for mu in range(n - 1):
        P[mu, mu] = g[n - 1]
        P[mu, n - 1] = -g[mu]
    P[n - 1, :] = dz
    return P


def phi1(omega: DomainModel, p) -> tuple[Biholomorphism, Biholomorphism, np.ndarray]:
    """Affine ``w = P (z - p)``, its inverse, and ``P``."""
    p = _as_point(p)
    d = omega.derivatives(p)
    if abs(d.grad_z[-1]) == 0:
        raise DomainError("dr/dz_n vanishes at p")
    P = phi1_matrix(d)
    if abs(np.linalg.det(P)) < 1e-14:
        raise DomainError("P is singular")
    fwd = affine_map(P, -P @ p, name="phi1")
    inv = affine_map(np.linalg.inv(P), p, name="phi1_inv")
    return fwd, inv, P


def quadratic_data(omega: DomainModel, p, P: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``G1(w) = sum a_{mn} w_m w_n`` and ``L1(w) = sum b_{mn} w_m conj(w_n)``."""
    d = omega.derivatives(p)
    P = phi1_matrix(d) if P is None else P
    M = np.linalg.inv(P)
    a1 = 0.5 * M.T @ d.hess_zz @ M
    b1 = M.T @ d.hess_zzbar @ M.conj()
    return a1, b1


def phi2(a1: np.ndarray) -> tuple[Biholomorphism, Biholomorphism]:
    """``w = ('z, z_n + sum_{m,v<n} a_{mv} z_m z_v)`` and its inverse."""
    a1 = np.asarray(a1, dtype=complex)
    n = a1.shape[0]
    a = a1[: n - 1, : n - 1]

    def quad(u):
        acc = 0.0 * u[-1]
        for m in range(n - 1):
            for v in range(n - 1):
                if a[m, v] != 0:
                    acc = acc + u[m] * u[v] * a[m, v]
        return acc

    def jac(u):
        J = np.eye(n, dtype=complex).tolist()
        last = []
        for gamma in range(n - 1):
            s = 0.0 * u[-1]
            for m in range(n - 1):
                c = a[m, gamma] + a[gamma, m]
                if c != 0:
                    s = s + u[m] * c
            last.append(s)
        J[n - 1] = last + [1.0]
        return J

    def jac_inv(w):
        J = jac(w)
        J[n - 1] = [-x for x in J[n - 1][:-1]] + [1.0]
        return J

    fwd = Biholomorphism(n, lambda u: list(u[:-1]) + [u[-1] + quad(u)], jac, lambda w: list(w[:-1]) + [w[-1] - quad(w)], "phi2")
    inv = Biholomorphism(n, lambda w: list(w[:-1]) + [w[-1] - quad(w)], jac_inv, lambda u: list(u[:-1]) + [u[-1] + quad(u)], "phi2_inv")
    return fwd, inv


def levi_stretch(b1: np.ndarray) -> np.ndarray:
    """Matrix ``A`` with ``L1(A 'w, 0) = |'w|^2``: unitary eigenbasis times ``diag(lambda^-1/2)``.

    Eigenvalues are sorted descending and eigenvectors phase-fixed (first
    nonzero component real positive) so the result is deterministic.
    """
    b1 = np.asarray(b1, dtype=complex)
    n = b1.shape[0]
    if n == 1:
        return np.zeros((0, 0), dtype=complex)
    # L1('z) = z^T B zbar = z^* B^T z
    C = b1[: n - 1, : n - 1].T
    C = 0.5 * (C + C.conj().T)
    lam, V = np.linalg.eigh(C)
    order = np.argsort(lam)[::-1]
    lam, V = lam[order], V[:, order]
    if np.any(lam <= 0):
        raise PseudoconvexityError(f"Levi form not positive definite: eigenvalues {lam}")
    V = np.column_stack([_phase_fix(V[:, k]) for k in range(n - 1)])
    return V @ np.diag(lam ** -0.5)


def phi3(b1: np.ndarray) -> tuple[Biholomorphism, Biholomorphism, np.ndarray]:
    """``w = (A^-1 'z, z_n)`` so the new tangential Levi form is ``|'w|^2``; returns (map, inverse, A)."""
    b1 = np.asarray(b1, dtype=complex)
    n = b1.shape[0]
    A = levi_stretch(b1)
    M = np.eye(n, dtype=complex)
    Minv = np.eye(n, dtype=complex)
    if n > 1:
        M[: n - 1, : n - 1] = np.linalg.inv(A)
        Minv[: n - 1, : n - 1] = A
    return affine_map(M, name="phi3"), affine_map(Minv, name="phi3_inv"), A


def dilation(eta: float, n: int) -> tuple[Biholomorphism, Biholomorphism]:
    """``T(z) = ('z / sqrt(eta), z_n / eta)`` and its inverse."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    d = np.full(n, 1.0 / math.sqrt(eta))
    d[-1] = 1.0 / eta
    return affine_map(np.diag(d), name="T"), affine_map(np.diag(1.0 / d), name="T_inv")


def cayley(n: int) -> Biholomorphism:
    """``H(z) = (sqrt2 'z / (z_n - 1), (z_n + 1) / (z_n - 1))``; an involution exchanging Siegel and ball."""
    s2 = math.sqrt(2.0)

    def forward(u):
        d = u[-1] - 1.0
        if not isinstance(d, wjet.WJet) and d == 0:
            raise ZeroDivisionError("Cayley map is singular at z_n = 1")
        inv = 1.0 / d
        return [x * inv * s2 for x in u[:-1]] + [(u[-1] + 1.0) * inv]

    def jacobian(u):
        d = u[-1] - 1.0
        inv = 1.0 / d
        inv2 = inv * inv
        J = []
        for i in range(n - 1):
            row = [(inv * s2 if j == i else 0.0) for j in range(n - 1)]
            row.append(-s2 * u[i] * inv2)
            J.append(row)
        J.append([0.0] * (n - 1) + [-2.0 * inv2])
        return J

    return Biholomorphism(n, forward, jacobian, forward, name="cayley")


# ---------------------------------------------------------------------------
# scaling step


@dataclass
class ScalingStep:
    index: int
    delta: float
    eta: float
    zeta: np.ndarray
    foot: np.ndarray
    q: np.ndarray
    P: np.ndarray
    a1: np.ndarray
    b1: np.ndarray
    A: np.ndarray
    Q: np.ndarray
    T: Biholomorphism
    S: Biholomorphism
    S_inv: Biholomorphism
    psi: Biholomorphism
    psi_inv: Biholomorphism
    normalized: DomainModel
    provider: KernelProvider | None
    residuals: dict

    @property
    def det_T(self) -> float:
        return float(np.prod(np.diag(np.asarray(self.T.jacobian(np.zeros(self.Q.shape[0])))).real))

    def r_tilde(self, w) -> float:
        """Scaled defining function ``r_j(T^-1 w) / eta``."""
        z = self.psi_inv(np.asarray(self.T.inverse(w)))
        return self.normalized.r(z) / self.eta


def make_scaling_step(omega: DomainModel, p0, delta: float, index: int = 0) -> ScalingStep:
    """Full scaling package for the point at distance ``delta`` along the inward normal at ``p0``."""
    p0 = _as_point(p0)
    n = omega.dim
    g0 = omega.derivatives(p0).grad_zbar
    zeta = p0 - delta * g0 / np.linalg.norm(g0)
    foot, dj = nearest_boundary_point(omega, zeta)

    rigid, norm = normalize_coordinates(omega, p0)
    rigid_inv = affine_map(norm.metadata["U"].conj().T, p0, name="rigid_inv")
    zn = rigid(zeta)
    pn = rigid(foot)
    f1, f1_inv, P = phi1(norm, pn)
    a1, b1 = quadratic_data(norm, pn, P)
    f2, f2_inv = phi2(a1)
    f3, f3_inv, A = phi3(b1)
    psi = compose_all(f3, f2, f1)
    psi_inv = compose_all(f1_inv, f2_inv, f3_inv)
    gp = norm.derivatives(pn).grad_zbar
    eta = dj * float(np.linalg.norm(gp))
    T, T_inv = dilation(eta, n)
    S = compose_all(T, psi, rigid)
    S_inv = compose_all(rigid_inv, psi_inv, T_inv)
    q = psi(zn)
    Q = psi.jacobian(zn)

    provider = None
    if omega.provider is not None:
        provider = transform_kernel(omega.provider, S_inv, domain_tag=f"scaled[{index}]({omega.name})")

    bs = b_star(n)
    residuals = {
        "S_zeta_minus_bstar": float(np.max(np.abs(S(zeta) - bs))),
        "eta_over_delta_minus_grad": abs(eta / dj - float(np.linalg.norm(gp))),
        "q_minus_expected": float(np.max(np.abs(q - np.r_[np.zeros(n - 1), -dj * np.linalg.norm(gp)]))),
        "foot_minus_p0": float(np.linalg.norm(foot - p0)),
    }
    return ScalingStep(
        index, dj, eta, zeta, foot, q, P, a1, b1, A, Q, T, S, S_inv, psi, psi_inv, norm, provider, residuals
    )


# ---------------------------------------------------------------------------
# tangent decomposition and Levi form


@dataclass(frozen=True)
class TangentSplit:
    base: np.ndarray
    foot: np.ndarray
    X_H: np.ndarray
    X_N: np.ndarray


def tangent_split(omega: DomainModel, z, X, foot=None) -> TangentSplit:
    """Split ``X`` into complex-tangential and normal parts at the foot ``pi(z)``."""
    z = _as_point(z)
    X = _as_point(X)
    if foot is None:
        foot, _ = nearest_boundary_point(omega, z)
    g = omega.derivatives(foot).grad_zbar
    nu = g / np.linalg.norm(g)
    XN = np.vdot(nu, X) * nu
    return TangentSplit(z, foot, X - XN, XN)


def levi_form(omega: DomainModel, p, X_H, normalize_at=None) -> float:
    """``sum d2r/dz_m dzbar_v X^m conj(X^v)`` with ``r`` scaled so ``|grad_zbar r| = 1`` at ``normalize_at`` (default ``p``)."""
    p = _as_point(p)
    X = _as_point(X_H)
    d = omega.derivatives(p)
    g = d.grad_zbar
    if abs(np.vdot(g, X)) > TANGENT_ATOL * max(np.linalg.norm(X) * np.linalg.norm(g), 1.0):
        raise ValueError("X_H is not complex-tangent at p")
    scale = np.linalg.norm(g if normalize_at is None else omega.derivatives(normalize_at).grad_zbar)
    return float((X @ d.hess_zzbar @ X.conj()).real / scale)


def tangent_basis(omega: DomainModel, p) -> np.ndarray:
    """Orthonormal basis (rows) of the complex tangent space at ``p``."""
    g = omega.derivatives(p).grad_zbar
    U = _normalizing_unitary(g)
    return U[:-1].conj()


def levi_check(omega: DomainModel, p) -> np.ndarray:
    """Eigenvalues of the normalized Levi form on the complex tangent space; raises if not all positive."""
    p = _as_point(p)
    E = tangent_basis(omega, p)
    if E.shape[0] == 0:
        return np.zeros(0)
    d = omega.derivatives(p)
    L = (E.conj() @ d.hess_zzbar.T @ E.T) / np.linalg.norm(d.grad_zbar)
    lam = np.linalg.eigvalsh(0.5 * (L + L.conj().T))
    if np.any(lam <= 0):
        raise PseudoconvexityError(f"Levi form not positive definite at {p}: {lam}")
    return lam


def levi_determinant(omega: DomainModel, p) -> float:
    return float(np.prod(levi_check(omega, p)))
