"""Hermitian eigenanalysis, spectral projectors, gaps, densities and kernel decay.

Also hosts the Fourier machinery for the strip inverse estimate and the
invertibility margin of the Haldane edge operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .domains import Domain
from .errors import ContractViolation, DegenerateCutError, GapError, ParameterError, SingularityError
from .hamiltonians import DEFAULT_NU, BlochSymbol, build_model, model_constants
from .lattice import ORBITALS, TorusWindow

HERMITIAN_TOL = 1e-10
CUT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    dim: int

    def residual(self, M: np.ndarray) -> float:
        V, lam = self.eigenvectors, self.eigenvalues
        return float(np.abs(M @ V - V * lam[None, :]).max())


def _hermitian_part(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {M.shape}")
    defect = float(np.abs(M - M.conj().T).max()) if M.size else 0.0
    scale = max(1.0, float(np.abs(M).max()) if M.size else 1.0)
    if defect > HERMITIAN_TOL * scale:
        raise ContractViolation(f"matrix is not Hermitian (defect {defect:.3e})")
    return (M + M.conj().T) / 2


def eig_hermitian(M: np.ndarray, vectors: bool = True) -> SpectralData:
    """Full eigendecomposition with ascending eigenvalues.

    Uses LAPACK's MRRR driver (``zheevr``), several times faster than the
    divide-and-conquer default at the sizes used here.
    """
    H = _hermitian_part(M)
    if not vectors:
        return SpectralData(np.linalg.eigvalsh(H), None, H.shape[0])
    lam, V = sla.eigh(H, driver="evr", overwrite_a=True, check_finite=False)
    return SpectralData(lam, V, H.shape[0])


def torus_spectrum(op, w: TorusWindow) -> np.ndarray:
    """Exact spectrum of a stencil on the torus from its momentum blocks."""
    k = 2 * np.pi * np.arange(w.n) / w.n
    xi = np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1)
    return np.sort(np.linalg.eigvalsh(op.multiplier(xi)).ravel())


@dataclass(frozen=True, eq=False)
class ProjectorData:
    matrix: np.ndarray
    energy: float
    rank: int

    @property
    def idempotency_defect(self) -> float:
        return float(np.abs(self.matrix @ self.matrix - self.matrix).max())

    @property
    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


def spectral_projector(sd: SpectralData, energy: float) -> ProjectorData:
    """Projector onto the eigenvectors with eigenvalue below ``energy``."""
    if sd.eigenvectors is None:
        raise ContractViolation("spectral data carries no eigenvectors")
    lam = sd.eigenvalues
    if lam.size and np.min(np.abs(lam - energy)) <= CUT_TOL:
        raise DegenerateCutError(f"energy {energy} lies on the spectrum")
    k = int(np.searchsorted(lam, energy))
    V = sd.eigenvectors[:, :k]
    P = V @ V.conj().T
    return ProjectorData(P, float(energy), k)


def gap_at(sd, energy: float) -> float:
    """Distance from ``energy`` to the spectrum."""
    lam = sd.eigenvalues if isinstance(sd, SpectralData) else np.asarray(sd)
    return float(np.min(np.abs(lam - energy)))


@dataclass(frozen=True)
class DensityReport:
    gap_interval: tuple[float, float]
    density: float
    n_in_gap: int
    ball_radius: float | None = None
    empirical_coefficient: float | None = None


def delta_density(sd, G: tuple[float, float], ball_radius: float | None = None) -> DensityReport:
    """``sup_{l in G} dist(l, spec & G)`` for the open interval ``G``.

    End gaps count at full width (the sup over an open interval is reached
    as a limit at the endpoint); interior gaps count at half width.  With no
    spectrum inside ``G`` the density is ``|G|``.
    """
    a, b = map(float, G)
    if not b > a:
        raise ParameterError(f"empty interval {G}")
    lam = sd.eigenvalues if isinstance(sd, SpectralData) else np.sort(np.asarray(sd, dtype=float))
    inside = lam[(lam > a) & (lam < b)]
    if inside.size == 0:
        density = b - a
    else:
        gaps = [inside[0] - a, b - inside[-1]]
        if inside.size > 1:
            gaps.append(float(np.max(np.diff(inside))) / 2)
        density = float(max(gaps))
    coeff = None
    if ball_radius is not None and ball_radius > 1:
        coeff = density * ball_radius / math.log(ball_radius)
    return DensityReport((a, b), density, int(inside.size), ball_radius, coeff)


# --------------------------------------------------------------------------
# kernel decay

def site_kernel(M: np.ndarray, w: TorusWindow) -> np.ndarray:
    """Largest orbital entry ``|M(x, y)|`` for every pair of sites."""
    return np.abs(M).reshape(w.n_sites, ORBITALS, w.n_sites, ORBITALS).max(axis=(1, 3))


def kernel_s_alpha(M: np.ndarray, w: TorusWindow, alpha: float) -> float:
    """``sup_x sum_y |M(x, y)| (exp(alpha |x - y|) - 1)`` with torus distances."""
    D = w.site_distance_matrix()
    weight = np.expm1(alpha * D)
    rows = (np.abs(M).reshape(w.n_sites, ORBITALS, w.n_sites, ORBITALS)
            * weight[:, None, :, None]).sum(axis=(2, 3))
    return float(rows.max())


def max_by_distance(K: np.ndarray, w: TorusWindow) -> tuple[np.ndarray, np.ndarray]:
    D = w.site_distance_matrix().ravel()
    dmax = int(D.max())
    out = np.zeros(dmax + 1)
    np.maximum.at(out, D, K.ravel())
    return np.arange(dmax + 1), out


def projector_constant(nu: float) -> float:
    return 32.0 * nu**-4


@dataclass(frozen=True, eq=False)
class DecayFit:
    kind: str
    rate: float
    prefactor: float
    bound_rate: float
    passed: bool
    distances: np.ndarray = field(repr=False)
    max_kernel: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)

    @property
    def worst_ratio(self) -> float:
        return float(np.max(self.max_kernel / self.bound))


def _fit(distances, values, n):
    window = (distances >= 2) & (distances <= max(2, n // 4))
    sel = window & (values > 0)
    if window.any() and not sel.any():
        return float("inf"), 0.0
    if sel.sum() < 2:
        return float("nan"), float("nan")
    slope, icpt = np.polyfit(distances[sel], np.log(values[sel]), 1)
    return float(-slope), float(np.exp(icpt))


def decay_probe(M: np.ndarray, w: TorusWindow, kind: str = "projector", energy: complex = 0.0,
                nu: float = DEFAULT_NU, delta: float | None = None,
                alpha: float | None = None, sd: SpectralData | None = None) -> DecayFit:
    """Compare kernel decay with the projector or Combes-Thomas envelope.

    ``projector``: ``|P(x, y)| <= (C/delta) exp(-delta |x - y| / C)``,
    ``C = 32 nu^-4``; needs ``delta <= gap``.
    ``resolvent``: ``|(H - z)^-1(x, y)| <= exp(-alpha |x - y|) / (D - S_alpha)``
    with ``D = dist(z, spec)``; ``alpha`` defaults to ``2^-5 nu^4 D``.
    """
    if kind not in ("projector", "resolvent"):
        raise ParameterError(f"unknown decay kind {kind!r}")
    if sd is None:
        sd = eig_hermitian(M, vectors=(kind == "projector"))
    if kind == "projector":
        gap = gap_at(sd, float(np.real(energy)))
        delta = gap if delta is None else delta
        if not 0 < delta <= gap:
            raise GapError(f"delta={delta} exceeds the gap {gap} at {energy}")
        C = projector_constant(nu)
        K = site_kernel(spectral_projector(sd, float(np.real(energy))).matrix, w)
        dist, mk = max_by_distance(K, w)
        bound = (C / delta) * np.exp(-delta * dist / C)
        bound_rate = delta / C
    else:
        Delta = float(np.min(np.abs(sd.eigenvalues - energy)))
        alpha = 2**-5 * nu**4 * Delta if alpha is None else alpha
        s_a = kernel_s_alpha(M, w, alpha)
        if not Delta > s_a:
            raise GapError(f"dist(z, spec)={Delta} does not exceed S_alpha={s_a}")
        R = np.linalg.solve(M - energy * np.eye(M.shape[0]), np.eye(M.shape[0]))
        dist, mk = max_by_distance(site_kernel(R, w), w)
        bound = np.exp(-alpha * dist) / (Delta - s_a)
        bound_rate = alpha
    rate, pref = _fit(dist, mk, w.n)
    return DecayFit(kind, rate, pref, bound_rate, bool(np.all(mk <= bound * (1 + 1e-12))), dist, mk, bound)


def projector_difference_bound(delta: float, r: float, eps: float, nu: float = DEFAULT_NU) -> float:
    """Envelope ``(C/delta^6)(exp(-delta r / C) + eps)`` with ``C = 2^35 nu^-20``
    for the difference of two projectors on ``B_2r``."""
    C = 2.0**35 * nu**-20
    return C / delta**6 * (math.exp(-delta * r / C) + eps)


# --------------------------------------------------------------------------
# Fourier inverse and the strip estimate

def momentum_grid(n: int) -> np.ndarray:
    k = 2 * np.pi * np.arange(n) / n
    return np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1)


def fourier_apply_inverse(sym, u: np.ndarray, singular_tol: float = 1e-12) -> np.ndarray:
    """Apply ``H^-1`` on the torus through per-momentum 2x2 solves.

    ``sym`` is anything with a ``multiplier`` method (a :class:`BlochSymbol`
    or a stencil).  ``u`` has shape ``(2 n^2,)`` or ``(2 n^2, k)``.
    """
    u = np.asarray(u, dtype=complex)
    n = int(round(math.sqrt(u.shape[0] / ORBITALS)))
    if ORBITALS * n * n != u.shape[0]:
        raise ContractViolation(f"vector length {u.shape[0]} is not 2 n^2")
    extra = u.shape[1:]
    mult = sym.multiplier(momentum_grid(n))
    smallest = np.abs(np.linalg.eigvalsh(mult)).min()
    if smallest <= singular_tol:
        raise SingularityError(f"symbol singular on the n={n} grid (min |eig| = {smallest:.3e})")
    uh = np.fft.fft2(u.reshape((n, n, ORBITALS) + extra), axes=(0, 1))
    if extra:
        vh = np.linalg.solve(mult, uh)
    else:
        vh = np.linalg.solve(mult, uh[..., None])[..., 0]
    return np.fft.ifft2(vh, axes=(0, 1)).reshape(u.shape)


@lru_cache(maxsize=4)
def _constants(grid_n: int = 512):
    return model_constants(grid_n)


def strip_bound(L: float, s: float, c0: float | None = None) -> float:
    c0 = _constants().c0 if c0 is None else c0
    return c0 * L ** (1 / 3) * s ** (-2 / 3)


class StripInverseResult(NamedTuple):
    max_ratio: float
    bound: float
    ratios: np.ndarray


def strip_inverse_ratio(L: int, s: float, n: int, trials: int = 32, seed: int = 0,
                        c0: float | None = None) -> StripInverseResult:
    """Largest ``||H+^-1 u|| / ||u||`` over random ``u`` supported in |x2| <= L.

    Draws use ``numpy.random.default_rng(seed)`` (PCG64): real and imaginary
    parts standard normal, one block of ``trials`` vectors.
    """
    if n < 4 * (2 * L + 1):
        raise ParameterError(f"n={n} must be at least 4(2L+1)={4 * (2 * L + 1)}")
    if trials < 1:
        raise ParameterError("trials must be positive")
    w = TorusWindow(n)
    rows = np.repeat(np.abs(w.coords[:, 1]) <= L, ORBITALS)
    rng = np.random.default_rng(seed)
    u = np.zeros((w.dim, trials), dtype=complex)
    m = int(rows.sum())
    u[rows] = rng.standard_normal((m, trials)) + 1j * rng.standard_normal((m, trials))
    v = fourier_apply_inverse(BlochSymbol(s, 1), u)
    ratios = np.linalg.norm(v, axis=0) / np.linalg.norm(u, axis=0)
    return StripInverseResult(float(ratios.max()), strip_bound(L, s, c0), ratios)


class MarginReport(NamedTuple):
    norm: float
    margin: float
    min_singular_bound: float
    gap_plus: float


def invertibility_margin(s: float, d: Domain, w: TorusWindow) -> MarginReport:
    """Neumann-series margin for ``H_e = H+ (I - K)``, ``K = 2 H+^-1 1_Oc S 1_Oc``.

    ``norm`` is the largest singular value of ``K``.  When ``margin = 1 - norm``
    is positive, ``min |spec(H_e)| >= margin * min |spec(H+)|``, reported as
    ``min_singular_bound`` (0 otherwise).
    """
    outside = ~d.mask(w)
    S = build_model("imaginary_s", s).matrix(w, outside, outside)
    sym = BlochSymbol(s, 1)
    K = 2 * fourier_apply_inverse(sym, S)
    norm = float(sla.svdvals(K, check_finite=False)[0]) if s > 0 else 0.0
    gap_plus = float(np.min(np.abs(torus_spectrum(sym, w))))
    margin = 1.0 - norm
    return MarginReport(norm, margin, margin * gap_plus if margin > 0 else 0.0, gap_plus)
