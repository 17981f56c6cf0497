import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkf import wjet
from bergkf.errors import JetStructureError, SingularJetError, SingularMatrixError
from bergkf.kernels import ball_kernel, polydisc_kernel, reinhardt_kernel, ReinhardtSpec, siegel_kernel
from bergkf.tolerances import FD_RTOL, HERMITIAN_RTOL, RING_RTOL, SERIES_RTOL
from bergkf.wjet import (
    ANTI,
    HOLO,
    MultiIndexPair,
    WJet,
    basis,
    complex_hessian,
    coordinate_jets,
    extract_deriv,
    jet_const,
    jet_det,
    jet_exp,
    jet_inv,
    jet_log,
    jet_pow,
    jet_shift_derivative,
    jet_var,
)

from conftest import random_jet

jet_params = st.tuples(st.integers(1, 3), st.integers(0, 2**32 - 1))


def _rng(seed):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# constructors


def test_jet_const_is_ring_identity():
    one = jet_const(1, 2, 6)
    assert one.const == 1
    assert np.all(one.coeffs[1:] == 0)
    x = random_jet(_rng(1), 2, 6)
    assert (x * one).allclose(x, rtol=0)
    assert (x + jet_const(0, 2, 6)).allclose(x, rtol=0)


def test_scalar_jet_rotates_coefficients():
    x = random_jet(_rng(2), 3, 6)
    y = x * jet_const(2 + 3j, 3, 6)
    np.testing.assert_allclose(y.coeffs, (2 + 3j) * x.coeffs, rtol=RING_RTOL)


def test_jet_var_seeds_one_increment():
    h = jet_var(1, HOLO, 0, 1, 6)
    assert h.coeff(((1,), (0,))) == 1
    assert np.count_nonzero(h.coeffs) == 1
    hb = jet_var(1, ANTI, 0, 1, 6)
    p = h * hb
    assert np.count_nonzero(p.coeffs) == 1
    assert extract_deriv(p, ((1,), (1,))) == 1


def test_holo_plus_anti_is_twice_real_part():
    z = 0.3 - 0.7j
    s = jet_var(1, HOLO, z, 1, 4) + jet_var(1, ANTI, np.conj(z), 1, 4)
    assert s.const == pytest.approx(2 * z.real)
    assert s.coeff(((1,), (0,))) == 1 and s.coeff(((0,), (1,))) == 1


def test_jet_var_rejects_bad_index():
    with pytest.raises(JetStructureError):
        jet_var(3, HOLO, 0, 2, 6)
    with pytest.raises(JetStructureError):
        jet_var(1, "sideways", 0, 2, 6)


def test_multi_index_pair_validation():
    with pytest.raises(JetStructureError):
        MultiIndexPair((1,), (0, 0))
    with pytest.raises(JetStructureError):
        MultiIndexPair((-1,), (0,))
    assert MultiIndexPair((2, 1), (0, 3)).order == 6


def test_mismatched_jets_raise():
    with pytest.raises(JetStructureError):
        jet_const(1, 2, 6) + jet_const(1, 2, 4)
    with pytest.raises(JetStructureError):
        jet_const(1, 1, 6) * jet_const(1, 2, 6)


def test_basis_sizes():
    # number of exponent vectors of length 2n with total degree <= D
    for n, D in [(1, 6), (2, 6), (3, 6), (2, 4)]:
        assert basis(n, D).size == math.comb(2 * n + D, D)


# ---------------------------------------------------------------------------
# ring axioms


@settings(max_examples=30, deadline=None)
@given(jet_params)
def test_ring_axioms(params):
    n, seed = params
    rng = _rng(seed)
    a, b, c = (random_jet(rng, n, 6) for _ in range(3))
    assert (a * b).allclose(b * a, rtol=RING_RTOL)
    assert ((a * b) * c).allclose(a * (b * c), rtol=RING_RTOL, atol=RING_RTOL * 100)
    assert (a * (b + c)).allclose(a * b + a * c, rtol=RING_RTOL, atol=RING_RTOL * 100)
    assert ((a + b) + c).allclose(a + (b + c), rtol=RING_RTOL)
    assert (a - a).allclose(jet_const(0, n, 6), rtol=0, atol=0)


def test_ring_axioms_hundred_jets():
    rng = _rng(100)
    for _ in range(100):
        a, b = random_jet(rng, 2, 6), random_jet(rng, 2, 6)
        assert (a * b).allclose(b * a, rtol=RING_RTOL)


def test_product_example():
    h, hb = coordinate_jets([0.0], 6)
    p = (1 + h[0]) * (1 + hb[0])
    want = {((0,), (0,)): 1, ((1,), (0,)): 1, ((0,), (1,)): 1, ((1,), (1,)): 1}
    for e in basis(1, 6).exps:
        key = ((int(e[0]),), (int(e[1]),))
        assert p.coeff(key) == want.get(key, 0)


@settings(max_examples=30, deadline=None)
@given(jet_params)
def test_exp_log_and_inverse(params):
    n, seed = params
    rng = _rng(seed)
    a = random_jet(rng, n, 6, scale=0.3, const=np.exp(1j * rng.uniform(0, 2 * np.pi)))
    assert jet_exp(jet_log(a)).allclose(a, rtol=SERIES_RTOL, atol=SERIES_RTOL)
    assert (a * jet_inv(a)).allclose(jet_const(1, n, 6), rtol=SERIES_RTOL, atol=SERIES_RTOL)
    assert jet_log(jet_exp(a.nilpotent())).allclose(a.nilpotent(), rtol=SERIES_RTOL, atol=SERIES_RTOL)


def test_log_of_constant_e():
    assert jet_log(jet_const(math.e, 2, 6)).allclose(jet_const(1, 2, 6), rtol=1e-15)


def test_zero_constant_is_singular():
    h, _ = coordinate_jets([0.0, 0.0], 4)
    for f in (jet_inv, jet_log, lambda a: jet_pow(a, -0.5)):
        with pytest.raises(SingularJetError):
            f(h[0])


def test_pow_binomial_series():
    h, hb = coordinate_jets([0.0], 4)
    p = jet_pow(1 - h[0] * hb[0], -2)
    # (1 - x)^-2 = sum (k+1) x^k, x = h hbar
    for k in range(3):
        assert p.coeff(((k,), (k,))) == pytest.approx(k + 1, rel=1e-15)
    assert np.count_nonzero(np.abs(p.coeffs) > 1e-15) == 3


def test_integer_and_real_powers_agree():
    a = random_jet(_rng(5), 2, 6, scale=0.2, const=1.3 - 0.4j)
    assert (a**3).allclose(a * a * a, rtol=RING_RTOL)
    assert (a**3).allclose(jet_pow(a, 3.0), rtol=SERIES_RTOL)
    assert (a**-2).allclose(jet_inv(a * a), rtol=SERIES_RTOL)
    r = jet_pow(a, 0.5)
    assert (r * r).allclose(a, rtol=SERIES_RTOL)


def test_disc_log_kernel_metric_at_origin():
    L = polydisc_kernel(1).log_jet([0.0], 6)
    assert L.coeff(((1,), (1,))) == pytest.approx(2, rel=1e-15)


# ---------------------------------------------------------------------------
# term-expansion oracle: polynomial products computed with dictionaries


def _poly_from_jet(a: WJet) -> dict:
    b = a.basis
    return {tuple(int(x) for x in e): c for e, c in zip(b.exps, a.coeffs) if c != 0}


def _poly_mul(p: dict, q: dict, D: int) -> dict:
    out = {}
    for (e1, c1), (e2, c2) in itertools.product(p.items(), q.items()):
        e = tuple(x + y for x, y in zip(e1, e2))
        if sum(e) <= D:
            out[e] = out.get(e, 0) + c1 * c2
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_products_match_term_expansion(n):
    rng = _rng(7 + n)
    D = 6
    a, b, c = (random_jet(rng, n, D) for _ in range(3))
    want = _poly_mul(_poly_mul(_poly_from_jet(a), _poly_from_jet(b), D), _poly_from_jet(c), D)
    got = _poly_from_jet(a * b * c)
    for e, v in want.items():
        assert got.get(e, 0) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_high_order_extraction_on_polynomials():
    # f = h1^2 hbar2 (3 + h1 hbar1 hbar2)  -> orders 3 and 6
    h, hb = coordinate_jets([0.0, 0.0], 6)
    f = h[0] ** 2 * hb[1] * (3 + h[0] * hb[0] * hb[1])
    assert extract_deriv(f, ((2, 0), (0, 1))) == pytest.approx(3 * 2)
    # coefficient 1 on h1^3 hbar1 hbar2^2 -> derivative 3! 1! 2! = 12
    assert extract_deriv(f, ((3, 0), (1, 2))) == pytest.approx(12)
    g = (h[0] * hb[0]) ** 2
    assert extract_deriv(g, ((2, 0), (2, 0))) == pytest.approx(4)


def test_exp_of_h_hbar_fourth_order():
    h, hb = coordinate_jets([0.0], 6)
    e = jet_exp(h[0] * hb[0])
    # exp(x) = 1 + x + x^2/2 + x^3/6 with x = h hbar
    assert extract_deriv(e, ((1,), (1,))) == pytest.approx(1)
    assert extract_deriv(e, ((2,), (2,))) == pytest.approx(0.5 * 4)
    assert extract_deriv(e, ((3,), (3,))) == pytest.approx(36 / 6)


def test_extract_out_of_range():
    with pytest.raises(JetStructureError):
        extract_deriv(jet_const(1, 1, 2), ((2,), (1,)))


# ---------------------------------------------------------------------------
# shift derivative


def test_shift_of_square():
    h, _ = coordinate_jets([0.0], 6)
    d = jet_shift_derivative(h[0] ** 2, ((1,), (0,)))
    assert d.degree == 5
    assert d.coeff(((1,), (0,))) == pytest.approx(2)
    assert np.count_nonzero(d.coeffs) == 1


def test_shift_commutes_on_random_jets():
    rng = _rng(11)
    e1, e2 = ((1, 0), (0, 0)), ((0, 0), (0, 1))
    both = ((1, 0), (0, 1))
    for _ in range(50):
        a = random_jet(rng, 2, 6)
        s12 = jet_shift_derivative(jet_shift_derivative(a, e1), e2)
        s21 = jet_shift_derivative(jet_shift_derivative(a, e2), e1)
        s = jet_shift_derivative(a, both)
        assert s12.allclose(s, rtol=1e-14) and s21.allclose(s, rtol=1e-14)


def test_shift_agrees_with_extraction():
    a = random_jet(_rng(12), 2, 6)
    sh = jet_shift_derivative(a, ((1, 0), (0, 1)))
    for idx in [((0, 0), (0, 0)), ((1, 1), (0, 0)), ((0, 2), (1, 1))]:
        shifted = (tuple(x + y for x, y in zip(idx[0], (1, 0))), tuple(x + y for x, y in zip(idx[1], (0, 1))))
        assert extract_deriv(sh, idx) == pytest.approx(extract_deriv(a, shifted), rel=1e-13)


def test_disc_metric_via_shift():
    z = 0.3
    L = polydisc_kernel(1).log_jet([z], 6)
    g = jet_shift_derivative(L, ((1,), (1,)))
    assert g.const.real == pytest.approx(2 / (1 - z * z) ** 2, rel=1e-12)


# ---------------------------------------------------------------------------
# finite-difference oracle on pointwise kernel evaluation, in 40-digit arithmetic
# so that third differences at step 1e-3 are not swamped by roundoff

mp.mp.dps = 40


def _stencil(order):
    return {0: {0: 1}, 1: {-1: -0.5, 1: 0.5}, 2: {-1: 1, 0: -2, 1: 1},
            3: {-2: -0.5, -1: 1, 1: -1, 2: 0.5}}[order]


def _fd(f, z, alpha, beta, h):
    """Central differences of F(u, v) = f(u, v) in the independent slots u = z, v = conj z."""
    n = len(z)
    h = mp.mpf(h)
    u0 = [mp.mpc(x.real, x.imag) for x in z]
    v0 = [mp.conj(x) for x in u0]
    stencils = [_stencil(k) for k in list(alpha) + list(beta)]
    total = mp.mpc(0)
    for offs in itertools.product(*[s.items() for s in stencils]):
        w = mp.mpf(1)
        for _, c in offs:
            w *= c
        u = [x + o * h for x, (o, _) in zip(u0, offs[:n])]
        v = [x + o * h for x, (o, _) in zip(v0, offs[n:])]
        total += w * f(u, v)
    return complex(total / h ** (sum(alpha) + sum(beta)))


def _fd_richardson(f, z, alpha, beta, h=1e-3):
    return (4 * _fd(f, z, alpha, beta, h / 2) - _fd(f, z, alpha, beta, h)) / 3


def _low_order_pairs(n):
    for a in itertools.product(range(4), repeat=n):
        for b in itertools.product(range(4), repeat=n):
            if 1 <= sum(a) + sum(b) <= 3:
                yield a, b


def _mp_log(provider):
    return lambda u, v: mp.log(provider.kernel(u, v))


def _mp_ellipsoid_log(p, N):
    """Independent truncated monomial series with Beta-form moments in mpmath."""
    terms = []
    for a1 in range(N + 1):
        for a2 in range(N + 1 - a1):
            c = mp.pi**2 / (p[0] * p[1]) * mp.gamma(mp.mpf(a1 + 1) / p[0]) * mp.gamma(mp.mpf(a2 + 1) / p[1])
            c /= mp.gamma(1 + mp.mpf(a1 + 1) / p[0] + mp.mpf(a2 + 1) / p[1])
            terms.append((a1, a2, 1 / c))
    return lambda u, v: mp.log(mp.fsum(w * (u[0] * v[0]) ** a1 * (u[1] * v[1]) ** a2 for a1, a2, w in terms))


@pytest.mark.parametrize(
    "provider,oracle,z",
    [
        (ball_kernel(2), _mp_log(ball_kernel(2)), np.array([0.3 + 0.1j, -0.2j])),
        (polydisc_kernel(2), _mp_log(polydisc_kernel(2)), np.array([0.4, 0.1 + 0.5j])),
        (siegel_kernel(2), _mp_log(siegel_kernel(2)), np.array([0.2 - 0.1j, -0.8 + 0.3j])),
        (reinhardt_kernel(ReinhardtSpec((1.0, 2.0), 12)), _mp_ellipsoid_log((1, 2), 12), np.array([0.3, 0.2 + 0.2j])),
    ],
    ids=["ball", "polydisc", "siegel", "ellipsoid"],
)
def test_derivatives_match_finite_differences(provider, oracle, z):
    L = provider.log_jet(z, 6)
    for a, b in _low_order_pairs(2):
        want = _fd_richardson(oracle, z, a, b)
        got = extract_deriv(L, (a, b))
        assert abs(got - want) <= FD_RTOL * max(abs(want), 1e-12), (a, b, got, want)


# ---------------------------------------------------------------------------
# Hermitian symmetry and determinants


@pytest.mark.parametrize(
    "provider,n",
    [(ball_kernel(3), 3), (polydisc_kernel(2), 2), (siegel_kernel(2), 2),
     (reinhardt_kernel(ReinhardtSpec((1.0, 2.0), 40)), 2)],
)
def test_log_kernel_jets_are_hermitian(provider, n):
    rng = _rng(13)
    for _ in range(5):
        z = 0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(n)
        if isinstance(provider, type(siegel_kernel(2))):
            z[-1] = -1.0 + 0.3j
        if not provider.contains(z):
            continue
        assert wjet.hermitian_defect(provider.log_jet(z, 6)) <= HERMITIAN_RTOL


def test_det_identity_and_diagonal():
    h, hb = coordinate_jets([0.0], 6)
    one = jet_const(1, 1, 6)
    zero = jet_const(0, 1, 6)
    assert jet_det([[one, zero], [zero, one]]).allclose(one, rtol=0)
    d = 1 + h[0] * hb[0]
    det = jet_det([[d, zero], [zero, d]])
    assert det.allclose(1 + 2 * h[0] * hb[0] + (h[0] * hb[0]) ** 2, rtol=1e-15)


def test_det_matches_laplace_expansion():
    rng = _rng(14)
    M = [[random_jet(rng, 2, 4, scale=0.2, const=c) for c in row] for row in ([3, 1, 0.5], [1j, 2, 0.1], [0.2, -1, 4])]
    lap = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
           - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
           + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    assert jet_det(M).allclose(lap, rtol=1e-12, atol=1e-12)


def test_det_of_ball_hessian():
    L = ball_kernel(2).log_jet([0.0, 0.0], 6)
    assert jet_det(complex_hessian(L)).const.real == pytest.approx(9, rel=1e-14)


def test_det_singular_raises():
    z = jet_const(0, 1, 4)
    with pytest.raises(SingularMatrixError):
        jet_det([[z, z], [z, z]])


def test_truncate_is_prefix():
    a = random_jet(_rng(15), 2, 6)
    t = a.truncate(3)
    assert t.degree == 3
    np.testing.assert_array_equal(t.coeffs, a.coeffs[: basis(2, 3).size])
