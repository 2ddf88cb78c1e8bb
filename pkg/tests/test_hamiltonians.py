import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bulkedge.errors import GeometryError, ParameterError
from bulkedge.hamiltonians import (
    DIRAC_POINTS, BlochSymbol, StencilOperator, build_model, c0_from, eta, model_constants,
    omega, s_alpha, shortrange_certificate, symbol_eval,
)
from bulkedge.lattice import TorusWindow
from bulkedge.spectral import torus_spectrum

KINDS = ["wallace_h0", "haldane_plus", "haldane_minus", "imaginary_s"]
angles = st.floats(-math.pi, math.pi, allow_nan=False)


def test_model_amplitudes():
    h0 = build_model("wallace_h0")
    assert h0.amplitude((0, 0), 0, 1) == 1
    assert h0.amplitude((-1, 0), 0, 1) == 1 and h0.amplitude((0, -1), 0, 1) == 1
    assert h0.amplitude((1, 0), 1, 0) == 1
    S = build_model("imaginary_s", 0.5)
    assert abs(S.amplitude((1, 0), 0, 0)) == 0.5
    for (d1, d2, a, b), amp in S.hops.items():
        assert S.amplitude((-d1, -d2), a, b) == -amp
        assert amp.real == 0
    for kind in KINDS:
        op = build_model(kind, 0.7)
        assert op.range <= 2
        assert all(abs(d1) + abs(d2) <= 2 for d1, d2, _, _ in op.hops)


def test_haldane_pair_relations():
    s = 0.3
    hp, hm = build_model("haldane_plus", s), build_model("haldane_minus", s)
    h0, S = build_model("wallace_h0"), build_model("imaginary_s", s)
    assert (hp - S).hops == h0.hops
    assert (hm + S).hops == h0.hops
    assert (hp - 2 * S).hops == hm.hops


def test_model_parameter_errors():
    with pytest.raises(ParameterError):
        build_model("haldane_plus", 1.5)
    with pytest.raises(ParameterError):
        build_model("haldane_plus", -0.1)
    with pytest.raises(ParameterError):
        build_model("kane_mele", 0.5)


@pytest.mark.parametrize("kind", KINDS)
def test_torus_matrices_hermitian(kind):
    op = build_model(kind, 0.8)
    assert op.is_hermitian()
    w = TorusWindow(7)
    M = op.matrix(w)
    assert np.abs(M - M.conj().T).max() <= 1e-12
    rng = np.random.default_rng(0)
    mask = rng.random(w.n_sites) < 0.5
    Mm = op.matrix(w, mask, mask)
    assert np.abs(Mm - Mm.conj().T).max() <= 1e-12


def test_matrix_needs_room_for_the_stencil():
    op = StencilOperator({(3, 0, 0, 0): 1.0, (-3, 0, 0, 0): 1.0})
    with pytest.raises(GeometryError):
        op.matrix(TorusWindow(6))


def test_symbol_examples():
    sym = BlochSymbol(0.5, 1)
    v = symbol_eval(sym, (0.0, 0.0))
    assert v.omega == pytest.approx(3) and v.eta == pytest.approx(0) and v.lam == pytest.approx(3)
    assert np.allclose(np.linalg.eigvalsh(v.matrix), [-3, 3])
    for s in (0.1, 0.5, 1.0):
        v = symbol_eval(BlochSymbol(s, 1), DIRAC_POINTS[0])
        assert abs(v.omega) < 1e-12
        assert v.eta == pytest.approx(3 * math.sqrt(3) / 2)
        assert v.lam == pytest.approx(3 * math.sqrt(3) * s)
    assert symbol_eval(sym, DIRAC_POINTS[1]).eta == pytest.approx(-3 * math.sqrt(3) / 2)


@given(angles, angles, st.floats(0.0, 1.0), st.sampled_from([-1, 1]))
def test_symbol_hermitian_traceless_with_band_eigenvalues(x1, x2, s, sign):
    sym = BlochSymbol(s, sign)
    M = sym.matrix(np.array([x1, x2]))
    assert np.abs(M - M.conj().T).max() <= 1e-14
    assert abs(np.trace(M)) <= 1e-14
    lam = sym.band(np.array([x1, x2]))
    assert np.allclose(np.linalg.eigvalsh(M), [-lam, lam], atol=1e-12)


@given(angles, angles, st.floats(0.0, 1.0), st.sampled_from(["haldane_plus", "haldane_minus"]))
def test_stencil_on_plane_wave_matches_multiplier(x1, x2, s, kind):
    op = build_model(kind, s)
    xi = np.array([x1, x2])
    sym = BlochSymbol(s, 1 if kind == "haldane_plus" else -1)
    assert np.abs(op.multiplier(xi) - sym.multiplier(xi)).max() <= 1e-12
    assert np.abs(op.symbol(xi) - sym.matrix(xi)).max() <= 1e-12


def test_stencil_applied_to_plane_wave_on_torus():
    n = 12
    w = TorusWindow(n)
    op = build_model("haldane_plus", 0.4)
    M = op.matrix(w)
    k = 2 * np.pi * np.array([2, 5]) / n
    v = np.array([0.3 - 0.2j, 0.9])
    psi = (np.exp(1j * w.coords @ k)[:, None] * v[None, :]).ravel()
    Hpsi = (M @ psi).reshape(-1, 2)
    expect = np.exp(1j * w.coords @ k)[:, None] * (op.multiplier(k) @ v)[None, :]
    assert np.abs(Hpsi - expect).max() <= 1e-12


@pytest.mark.parametrize("kind", ["haldane_plus", "haldane_minus"])
@pytest.mark.parametrize("n", [12, 24, 36])
@pytest.mark.parametrize("s", [0.1, 0.5, 1.0])
def test_torus_spectrum_paired_and_gapped(kind, n, s):
    w = TorusWindow(n)
    lam = torus_spectrum(build_model(kind, s), w)
    assert np.abs(lam + lam[::-1]).max() <= 1e-9
    lambda0 = model_constants(512).lambda0
    assert np.abs(lam).min() >= lambda0 * s - 1e-12


def test_dense_spectrum_matches_momentum_blocks():
    w = TorusWindow(9)
    op = build_model("haldane_minus", 0.6)
    dense = np.linalg.eigvalsh(op.matrix(w))
    assert np.abs(dense - torus_spectrum(op, w)).max() <= 1e-12


def test_model_constants_values():
    mc = model_constants(512)
    assert mc.lambda0 == pytest.approx(1.0, abs=0.01)
    assert mc.mu0 == pytest.approx(0.18, abs=0.01)
    assert mc.mu0 == pytest.approx(3 / (math.pi * math.sqrt(26)), rel=1e-3)
    assert 27 <= mc.c0 <= 34
    assert mc.c0 == pytest.approx(c0_from(mc.lambda0, mc.mu0))
    assert mc.rho0 == pytest.approx(6.0**-3 * mc.c0**-3)
    assert mc.s_threshold(2) == pytest.approx(mc.rho0 / 2)
    with pytest.raises(ParameterError):
        model_constants(64)


def test_omega_lower_bound_on_grid():
    mc = model_constants(512)
    ax = np.linspace(-np.pi, np.pi, 512)
    xi = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
    dist = np.min(np.linalg.norm(xi[..., None, :] - DIRAC_POINTS, axis=-1), axis=-1)
    assert (np.abs(omega(xi)) >= mc.mu0 * dist - 1e-12).all()
    lam = np.sqrt(4 * eta(xi) ** 2 + np.abs(omega(xi)) ** 2)
    assert lam.min() >= mc.lambda0 - 1e-12


def test_shortrange_certificates():
    cert = shortrange_certificate(build_model("haldane_plus", 0.5), 0.25)
    assert cert.passed and cert.slope_chain_ok
    assert cert.schur_norm_bound == 256
    zero = shortrange_certificate(StencilOperator({}), 0.6)
    assert zero.passed and zero.s_alpha == 0
    big = shortrange_certificate(build_model("wallace_h0") * 10, 0.25)
    assert not big.passed and big.max_violation > 0
    with pytest.raises(ParameterError):
        shortrange_certificate(build_model("wallace_h0"), 0.25, alpha=0.5)


def test_s_alpha_exact_sum():
    op = build_model("haldane_plus", 0.5)
    # per row: three unit hops at distances 0, 1, 1 and six 0.5 hops at 1, 1, 1, 1, 2, 2
    a = 0.2
    expect = 2 * math.expm1(a) + 0.5 * (4 * math.expm1(a) + 2 * math.expm1(2 * a))
    assert s_alpha(op, a) == pytest.approx(expect)
