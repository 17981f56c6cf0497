"""Bergman and Kobayashi-Fuks metrics and their curvatures from a kernel provider.

Everything is read off Wirtinger jets of ``log K(z, z)``:

* Bergman metric: complex Hessian of ``log K``;
* Kobayashi-Fuks metric: complex Hessian of ``log(K^(n+1) det G_b)``;
* curvature tensor ``R_{a~ b c d~} = -d_c dbar_d g_{b a~} + g^{v m~} d_c g_{b m~} dbar_d g_{v a~}``;
* Ricci form ``-d dbar log det G``.

With the default degree 6 the Kobayashi-Fuks metric jets keep degree 2,
enough for its curvature tensor and Ricci form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import wjet
from .errors import ConsistencyError, PositivityError
from .kernels import KernelProvider, _as_point
from .tolerances import KF_TWO_ROUTE_RTOL
from .wjet import WJet, complex_hessian, constant_matrix, extract_deriv, jet_det, jet_log

BERGMAN = "b"
KOBAYASHI_FUKS = "kf"
_KIND_ALIASES = {"b": BERGMAN, "bergman": BERGMAN, "~b": KOBAYASHI_FUKS, "kf": KOBAYASHI_FUKS, "tilde_b": KOBAYASHI_FUKS}


def _kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown metric kind {kind!r}; use 'b' or 'kf'") from None


@dataclass(frozen=True)
class MetricTensor:
    base: np.ndarray
    matrix: np.ndarray
    kind: str

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix).real)

    def quadratic(self, X) -> float:
        X = np.asarray(X, dtype=complex)
        return float((X @ self.matrix @ X.conj()).real)


@dataclass(frozen=True)
class CurvatureData:
    """Metric, inverse, curvature tensor and Ricci form of one Kahler metric at a point.

    ``R4[a, b, c, d]`` holds ``R_{a~ b c d~}``.  ``kernel_value`` is
    ``K(z, z)`` so that the canonical invariant comes for free.
    """

    base: np.ndarray
    kind: str
    G: np.ndarray
    Ginv: np.ndarray
    R4: np.ndarray
    ric_matrix: np.ndarray
    kernel_value: float
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def metric(self) -> MetricTensor:
        return MetricTensor(self.base, self.G, self.kind)

    @property
    def volume(self) -> float:
        return float(np.linalg.det(self.G).real)

    @property
    def beta(self) -> float:
        return self.volume / self.kernel_value

    def length_sq(self, X) -> float:
        X = np.asarray(X, dtype=complex)
        return float((X @ self.G @ X.conj()).real)

    def length(self, X) -> float:
        return math.sqrt(max(self.length_sq(X), 0.0))

    def hsc(self, X) -> float:
        X = _nonzero(X)
        num = np.einsum("abcd,a,b,c,d->", self.R4, X.conj(), X, X, X.conj())
        return float(num.real) / self.length_sq(X) ** 2

    def ricci(self, X) -> float:
        X = _nonzero(X)
        return float((X @ self.ric_matrix @ X.conj()).real) / self.length_sq(X)


def _nonzero(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if not np.any(X):
        raise ValueError("tangent vector must be nonzero")
    return X


def _cholesky_inverse(G: np.ndarray, what: str) -> np.ndarray:
    H = 0.5 * (G + G.conj().T)
    try:
        c = linalg.cho_factor(H, lower=True)
    except linalg.LinAlgError as exc:
        raise PositivityError(f"{what} is not positive definite: eigenvalues {np.linalg.eigvalsh(H)}") from exc
    return linalg.cho_solve(c, np.eye(G.shape[0], dtype=complex))


def _ricci_form(metric_jets) -> np.ndarray:
    """``-d dbar log det G`` at the base point."""
    logdet = jet_log(jet_det(metric_jets))
    return -constant_matrix(complex_hessian(logdet))


def _curvature_tensor(metric_jets, Ginv: np.ndarray) -> np.ndarray:
    n = len(metric_jets)
    d2 = np.empty((n, n, n, n), dtype=complex)  # [b, a, c, d] = d_c dbar_d g_{b a~}
    dz = np.empty((n, n, n), dtype=complex)  # [b, m, c] = d_c g_{b m~}
    dzb = np.empty((n, n, n), dtype=complex)  # [v, a, d] = dbar_d g_{v a~}
    unit = wjet.MultiIndexPair.unit
    for b in range(n):
        for a in range(n):
            g = metric_jets[b][a]
            for c in range(n):
                dz[b, a, c] = extract_deriv(g, unit(n, holo=c))
                dzb[b, a, c] = extract_deriv(g, unit(n, anti=c))
                for d in range(n):
                    d2[b, a, c, d] = extract_deriv(g, unit(n, holo=c, anti=d))
    R = -np.transpose(d2, (1, 0, 2, 3))
    # g^{v m~} is the (m, v) entry of G^{-1} when G[i, j] = g_{i j~}
    R = R + np.einsum("mv,bmc,vad->abcd", Ginv, dz, dzb)
    return R


def log_kernel_jet(K: KernelProvider, z, D: int = wjet.DEFAULT_DEGREE) -> WJet:
    return K.log_jet(_as_point(z), D)


def bergman_metric_jets(L: WJet):
    return complex_hessian(L)


def kf_potential_jet(L: WJet) -> WJet:
    """``log(K^(n+1) g_b)`` as a jet of degree ``D - 2``."""
    n = L.dim
    Gb = complex_hessian(L)
    return (n + 1) * L.truncate(L.degree - 2) + jet_log(jet_det(Gb))


def _check_two_routes(L: WJet, potential: WJet) -> np.ndarray:
    n = L.dim
    Gb = complex_hessian(L)
    route1 = (n + 1) * constant_matrix(Gb) - _ricci_form(Gb)
    route2 = constant_matrix(complex_hessian(potential))
    err = np.max(np.abs(route1 - route2)) / max(np.max(np.abs(route2)), 1e-300)
    if err > KF_TWO_ROUTE_RTOL:
        raise ConsistencyError(f"Kobayashi-Fuks routes disagree: relative {err:.3g}")
    return route2


def curvature_data(K: KernelProvider, z, kind: str = KOBAYASHI_FUKS, D: int = wjet.DEFAULT_DEGREE) -> CurvatureData:
    """All metric and curvature data of the kind-``kind`` metric at ``z``."""
    kind = _kind(kind)
    z = _as_point(z)
    need = 4 if kind == BERGMAN else 6
    if D < need:
        raise ValueError(f"kind {kind!r} needs jets of degree >= {need}")
    L = K.log_jet(z, D)
    kval = math.exp(L.const.real)
    extras = {}
    if kind == BERGMAN:
        jets = complex_hessian(L)
        G = constant_matrix(jets)
    else:
        potential = kf_potential_jet(L)
        G = _check_two_routes(L, potential)
        jets = complex_hessian(potential)
        extras["bergman_matrix"] = constant_matrix(complex_hessian(L))
    Ginv = _cholesky_inverse(G, f"G_{kind}")
    R4 = _curvature_tensor(jets, Ginv)
    ric = _ricci_form(jets)
    return CurvatureData(z, kind, G, Ginv, R4, ric, kval, extras)


# thin per-quantity entry points

def bergman_metric(K: KernelProvider, z) -> MetricTensor:
    z = _as_point(z)
    L = K.log_jet(z, 2)
    return MetricTensor(z, constant_matrix(complex_hessian(L)), BERGMAN)


def bergman_volume(K: KernelProvider, z) -> float:
    z = _as_point(z)
    L = K.log_jet(z, 2)
    return float(jet_det(complex_hessian(L)).const.real)


def ricci_bergman(K: KernelProvider, z) -> CurvatureData:
    return curvature_data(K, z, BERGMAN, D=4)


def kf_metric(K: KernelProvider, z) -> MetricTensor:
    z = _as_point(z)
    L = K.log_jet(z, 4)
    G = _check_two_routes(L, kf_potential_jet(L))
    return MetricTensor(z, G, KOBAYASHI_FUKS)


def kf_volume(K: KernelProvider, z) -> float:
    return kf_metric(K, z).det


def canonical_invariant(K: KernelProvider, z, kind: str = KOBAYASHI_FUKS) -> float:
    kind = _kind(kind)
    z = _as_point(z)
    G = bergman_metric(K, z) if kind == BERGMAN else kf_metric(K, z)
    return G.det / K.evaluate(z).real


def length(K: KernelProvider, z, X, kind: str = KOBAYASHI_FUKS) -> float:
    kind = _kind(kind)
    G = bergman_metric(K, z) if kind == BERGMAN else kf_metric(K, z)
    return math.sqrt(max(G.quadratic(X), 0.0))


def hsc(K: KernelProvider, z, X, kind: str = KOBAYASHI_FUKS) -> float:
    X = _nonzero(X)
    kind = _kind(kind)
    return curvature_data(K, z, kind, D=4 if kind == BERGMAN else 6).hsc(X)


def ricci_curvature(K: KernelProvider, z, X, kind: str = KOBAYASHI_FUKS) -> float:
    X = _nonzero(X)
    kind = _kind(kind)
    return curvature_data(K, z, kind, D=4 if kind == BERGMAN else 6).ricci(X)
