import numpy as np
import pytest
from hypothesis import given, strategies as st

from bulkedge.conductance import (
    SwitchPair, chern_fhs, kernel_constant, locality_bound, sigma_realspace, sigma_swapped,
    small_factor_eps, translation_invariance_check, trilinear_bound_value, trilinear_trace_bound,
)
from bulkedge.errors import GeometryError, HypothesisError, ParameterError, SingularityError
from bulkedge.hamiltonians import BlochSymbol
from bulkedge.lattice import Site, TorusWindow
from bulkedge.runner import perturbed_outside_ball
from bulkedge.spectral import eig_hermitian, spectral_projector

from conftest import bulk_projector


def test_trivial_projectors_give_zero():
    w = TorusWindow(16)
    assert sigma_realspace(np.zeros((w.dim, w.dim)), (0, 0), 4, w).sigma == 0
    assert abs(sigma_realspace(np.eye(w.dim), (0, 0), 4, w).sigma) <= 1e-14


def test_haldane_pair_realspace(hplus24):
    w, H, sd, P = hplus24
    rep = sigma_realspace(P, SwitchPair(), 6, w)
    assert rep.sigma_rounded == -1 and rep.rounding_defect <= 0.01
    assert rep.imaginary_residual <= 1e-10
    _, _, _, Pm = bulk_projector("haldane_minus", 0.5, 24)
    assert sigma_realspace(Pm, (0, 0), 6, w).sigma == pytest.approx(1, abs=0.01)


def test_swap_antisymmetry(hplus24):
    w, H, sd, P = hplus24
    sw = SwitchPair(Site(2, -1))
    assert sigma_swapped(P, sw, 6, w) == pytest.approx(-sigma_realspace(P, sw, 6, w).sigma, abs=1e-10)


def test_truncation_radius_limit(hplus24):
    w, H, sd, P = hplus24
    with pytest.raises(GeometryError):
        sigma_realspace(P, (0, 0), 7, w)
    with pytest.raises(GeometryError):
        sigma_realspace(np.eye(10), (0, 0), 1, w)


def test_translation_invariance(hplus24):
    w, H, sd, P = hplus24
    res = translation_invariance_check(P, [(0, 0), (3, 0), (-3, 3)], 6, w)
    assert res.max_deviation <= 1e-10
    with pytest.raises(GeometryError):
        translation_invariance_check(P, [(0, 0), (6, 0)], 6, w)


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0])
@pytest.mark.parametrize("grid", [32, 64, 128])
def test_chern_grid_stability(s, grid):
    assert chern_fhs(BlochSymbol(s, 1), grid) == -1
    assert chern_fhs(BlochSymbol(s, -1), grid) == 1


def test_chern_trivial_and_gapless():
    const = lambda xi: np.broadcast_to(np.diag([1.0, -1.0]).astype(complex), xi.shape[:-1] + (2, 2))
    assert chern_fhs(const, 16) == 0
    with pytest.raises(SingularityError):
        chern_fhs(BlochSymbol(0.0, 1), 48)
    with pytest.raises(ParameterError):
        chern_fhs(BlochSymbol(0.5, 1), 2)


@given(st.floats(0.05, 1.0), st.sampled_from([1, -1]))
def test_chern_matches_sign(s, sign):
    assert chern_fhs(BlochSymbol(s, sign), 48) == -sign


def test_trilinear_zero_and_validation():
    coords = np.array([(x, y) for x in range(-3, 4) for y in range(-3, 4)])
    Z = np.zeros((2 * len(coords),) * 2)
    I = np.eye(2 * len(coords))
    res = trilinear_trace_bound(Z, I, I, C=1, beta=0.5, r=2, eps=0.0, coords=coords)
    assert res.trace_value == 0 and res.passed and res.small_index == 0
    # identity commutes with both switches
    assert trilinear_trace_bound(I, I, I, 1, 0.5, 0, 1.0, coords).trace_value == 0
    with pytest.raises(HypothesisError):
        trilinear_trace_bound(2 * I, I, I, 1, 0.5, 1, 1.0, coords)
    with pytest.raises(HypothesisError):
        trilinear_trace_bound(I, I, I, 1, 0.5, 1, 0.1, coords)
    with pytest.raises(ParameterError):
        trilinear_trace_bound(Z, I, I, 1, 1.5, 1, 0.1, coords)


def test_trilinear_bound_formula():
    assert trilinear_bound_value(1, 1, 0, 0) == 2**16
    assert trilinear_bound_value(2, 0.5, 0, 0) == 8 * 2**16 * 64


def test_trilinear_far_perturbation_pair():
    n = 24
    w = TorusWindow(n)
    _, H1, sd1, P1 = bulk_projector("haldane_plus", 0.5, n)
    H2 = perturbed_outside_ball(H1, w, 8, 1.0)
    P2 = spectral_projector(eig_hermitian(H2), 0.0).matrix
    keep = np.flatnonzero(np.abs(w.coords - np.array(w.origin)).max(axis=1) <= 5)
    coords = w.coords[keep] - np.array(w.origin)
    idx = (2 * keep[:, None] + np.arange(2)).ravel()
    D = (P1.matrix - P2)[np.ix_(idx, idx)]
    A = P1.matrix[np.ix_(idx, idx)]
    beta = 0.25
    C = max(kernel_constant(M, coords, beta) for M in (D, A))
    r = 2.0
    eps = small_factor_eps(D, coords, r, C)
    res = trilinear_trace_bound(D, A, A, C, beta, r, eps, coords, k=0)
    assert res.passed
    assert abs(res.trace_value) <= 1e-3


def test_locality_bound_values():
    v = locality_bound(0.5, 10, 0.0, 0.25)
    assert v > 1  # vacuous at desk scale
    assert locality_bound(0.5, 10, 1e-4, 0.25) > v


def test_local_sigma_insensitive_to_far_mass():
    n = 24
    w = TorusWindow(n)
    _, H1, _, P1 = bulk_projector("haldane_plus", 0.5, n)
    sd2 = eig_hermitian(perturbed_outside_ball(H1, w, 10, 1.0))
    assert sd2.eigenvalues[sd2.eigenvalues < 0].size == w.n_sites
    s1 = sigma_realspace(P1, w.origin, 4, w).sigma
    s2 = sigma_realspace(spectral_projector(sd2, 0.0), w.origin, 4, w).sigma
    assert abs(s1 - s2) <= 0.05
