"""Bulk conductance from the real-space trace formula and from Bloch bands.

The real-space value is ``-2 pi i Tr(P [[P, L1], [P, L2]])`` with switch
functions ``L1 = 1{x1 >= n1}`` and ``L2 = 1{x2 >= n2}`` anchored at a
corner ``n``.  On a torus the switches are defined from coordinates relative
to the corner, wrapped so the second cut of each switch sits opposite the
corner, and the trace only runs over a square patch around the corner.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import GeometryError, HypothesisError, ParameterError, SingularityError
from .lattice import ORBITALS, Site, TorusWindow
from .spectral import ProjectorData


@dataclass(frozen=True)
class SwitchPair:
    corner: Site = Site(0, 0)

    def __post_init__(self):
        object.__setattr__(self, "corner", Site(*map(int, self.corner)))

    def values(self, w: TorusWindow) -> tuple[np.ndarray, np.ndarray]:
        """0/1 switch values on the basis of ``w``."""
        rel = w.offsets_from(self.corner)
        l1 = np.repeat((rel[:, 0] >= 0).astype(float), ORBITALS)
        l2 = np.repeat((rel[:, 1] >= 0).astype(float), ORBITALS)
        return l1, l2

    def patch(self, w: TorusWindow, radius: int) -> np.ndarray:
        """Basis indices of the sites with ``max |x - corner|_i <= radius``."""
        rel = w.offsets_from(self.corner)
        sites = np.flatnonzero(np.abs(rel).max(axis=1) <= radius)
        return (ORBITALS * sites[:, None] + np.arange(ORBITALS)).ravel()


@dataclass(frozen=True)
class ConductanceReport:
    sigma: float
    corner: Site
    truncation_radius: int
    rounding_defect: float
    imaginary_residual: float = 0.0

    @property
    def sigma_rounded(self) -> int:
        return int(round(self.sigma))


def _diag_term(P, rows, la, lb):
    """Diagonal of ``P [P, La] [P, Lb]`` on ``rows``, at O(len(rows) N^2).

    Uses ``P [P, La] = P La - P La P`` (idempotency) for the row block.
    """
    Pr = P[rows, :]
    left = Pr * la[None, :]
    left = left - left @ P
    Pc = P[:, rows]
    right = Pc * lb[rows][None, :] - lb[:, None] * Pc
    return np.einsum("ij,ji->i", left, right)


def local_trace(P: np.ndarray, l1: np.ndarray, l2: np.ndarray, rows: np.ndarray) -> complex:
    """``sum_{x in rows} <x| P [[P, L1], [P, L2]] |x>``."""
    d = _diag_term(P, rows, l1, l2) - _diag_term(P, rows, l2, l1)
    return complex(d.sum())


def sigma_realspace(P, sw: SwitchPair | Sequence[int] = Site(0, 0), R_tr: int | None = None,
                    w: TorusWindow | None = None) -> ConductanceReport:
    """Conductance trace restricted to the square patch of radius ``R_tr``.

    ``R_tr`` defaults to ``n // 4`` and may not exceed ``n / 4``.
    """
    if not isinstance(sw, SwitchPair):
        sw = SwitchPair(Site(*sw))
    M = P.matrix if isinstance(P, ProjectorData) else np.asarray(P)
    if w is None:
        n = int(round(math.sqrt(M.shape[0] / ORBITALS)))
        w = TorusWindow(n)
    if M.shape != (w.dim, w.dim):
        raise GeometryError(f"projector shape {M.shape} does not fit the n={w.n} window")
    R_tr = w.n // 4 if R_tr is None else int(R_tr)
    if R_tr < 0 or 4 * R_tr > w.n:
        raise GeometryError(f"truncation radius {R_tr} exceeds n/4 = {w.n / 4}")
    l1, l2 = sw.values(w)
    value = -2j * np.pi * local_trace(M, l1, l2, sw.patch(w, R_tr))
    sigma = float(value.real)
    return ConductanceReport(sigma, sw.corner, R_tr, abs(sigma - round(sigma)), float(abs(value.imag)))


def sigma_swapped(P, sw: SwitchPair, R_tr: int, w: TorusWindow) -> float:
    """Same trace with the two switches exchanged (the negative of sigma)."""
    M = P.matrix if isinstance(P, ProjectorData) else np.asarray(P)
    l1, l2 = sw.values(w)
    return float((-2j * np.pi * local_trace(M, l2, l1, sw.patch(w, R_tr))).real)


def chern_fhs(sym: Callable, grid_n: int = 64, gap_tol: float = 1e-9) -> int:
    """Chern number of the lower band from plaquette products of overlaps.

    ``sym`` maps an array of momenta ``(..., 2)`` to Hermitian ``2 x 2``
    blocks (for instance a :class:`~bulkedge.hamiltonians.BlochSymbol`).
    Each plaquette phase lies in ``(-pi, pi]``, so the sum is an exact
    multiple of ``2 pi`` once the band is resolved.
    """
    if grid_n < 3:
        raise ParameterError("grid_n must be at least 3")
    k = 2 * np.pi * np.arange(grid_n) / grid_n - np.pi
    xi = np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1)
    lam, vec = np.linalg.eigh(sym(xi))
    if lam[..., 0].max() >= -gap_tol or lam[..., 1].min() <= gap_tol:
        raise SingularityError("lower band is not separated from 0 on the grid")
    u = vec[..., 0]
    u1 = np.roll(u, -1, axis=0)
    u2 = np.roll(u, -1, axis=1)
    u12 = np.roll(u1, -1, axis=1)

    def link(a, b):
        z = np.sum(a.conj() * b, axis=-1)
        return z / np.abs(z)

    F = np.angle(link(u, u1) * link(u1, u12) * link(u12, u2) * link(u2, u))
    total = F.sum() / (2 * np.pi)
    c = int(round(total))
    if abs(total - c) > 1e-6:
        raise SingularityError(f"plaquette sum {total} is not an integer")
    return c


class InvarianceResult(NamedTuple):
    max_deviation: float
    sigmas: tuple


def translation_invariance_check(P, corners: Sequence, R_tr: int | None = None,
                                 w: TorusWindow | None = None,
                                 max_offset: int | None = None) -> InvarianceResult:
    """Largest pairwise difference of the conductance over several corners.

    Corners must lie within ``n / 8`` of the window origin in every
    coordinate (``max_offset`` overrides that limit).
    """
    M = P.matrix if isinstance(P, ProjectorData) else np.asarray(P)
    if w is None:
        w = TorusWindow(int(round(math.sqrt(M.shape[0] / ORBITALS))))
    limit = w.n / 8 if max_offset is None else max_offset
    for c in corners:
        off = max(abs(c[0] - w.origin.x1), abs(c[1] - w.origin.x2))
        if off > limit:
            raise GeometryError(f"corner {tuple(c)} is {off} away from the window origin (limit {limit})")
    sig = tuple(sigma_realspace(M, SwitchPair(Site(*c)), R_tr, w).sigma for c in corners)
    dev = max((abs(a - b) for a, b in itertools.combinations(sig, 2)), default=0.0)
    return InvarianceResult(float(dev), sig)


# --------------------------------------------------------------------------
# trilinear trace bound

def plane_distances(coords: np.ndarray) -> np.ndarray:
    """l1 distances between the given sites, without wrap-around."""
    return np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=-1)


def _site_abs(A: np.ndarray, m: int) -> np.ndarray:
    return np.abs(A).reshape(m, ORBITALS, m, ORBITALS).max(axis=(1, 3))


def kernel_constant(A: np.ndarray, coords: np.ndarray, beta: float) -> float:
    """Smallest ``C`` with ``|A(x, y)| <= C exp(-2 beta |x - y|)``."""
    m = len(coords)
    return float((_site_abs(A, m) * np.exp(2 * beta * plane_distances(coords))).max())


def ball_indices(coords: np.ndarray, radius: float) -> np.ndarray:
    return np.flatnonzero(np.abs(coords).sum(axis=1) <= radius)


def small_factor_eps(A: np.ndarray, coords: np.ndarray, r: float, C: float) -> float:
    """Smallest ``eps`` with ``|A(x, y)| <= C eps`` for ``x, y`` in ``B_2r(0)``."""
    b = ball_indices(coords, 2 * r)
    if b.size == 0:
        return 0.0
    K = _site_abs(A, len(coords))[np.ix_(b, b)]
    return float(K.max() / C)


@dataclass(frozen=True)
class TrilinearResult:
    trace_value: complex
    bound: float
    small_index: int

    @property
    def passed(self) -> bool:
        return abs(self.trace_value) <= self.bound


def trilinear_bound_value(C: float, beta: float, r: float, eps: float) -> float:
    return C**3 * 2.0**16 / beta**6 * (math.exp(-beta * r) + math.sqrt(eps))


def trilinear_trace_bound(A0: np.ndarray, A1: np.ndarray, A2: np.ndarray, C: float, beta: float,
                          r: float, eps: float, coords: np.ndarray, k: int | None = None,
                          slack: float = 1e-12) -> TrilinearResult:
    """Check ``|Tr A0 [A1, L1] [A2, L2]| <= C^3 2^16 beta^-6 (e^{-beta r} + eps^1/2)``.

    The matrices are kernels on ``Z^2`` supported on the sites ``coords``
    (two orbitals each, zero elsewhere); distances are plane distances and
    the switches are ``1{x1 >= 0}``, ``1{x2 >= 0}``.  The two hypotheses are
    scanned entrywise first: every ``|Aj(x, y)| <= C exp(-2 beta |x - y|)``,
    and one factor (``k``, or the first that qualifies) is ``<= C eps`` on
    ``B_2r(0)``.
    """
    if not 0 < beta <= 1:
        raise ParameterError("beta must lie in (0, 1]")
    coords = np.asarray(coords, dtype=np.int64)
    m = len(coords)
    mats = [np.asarray(A, dtype=complex) for A in (A0, A1, A2)]
    for A in mats:
        if A.shape != (ORBITALS * m, ORBITALS * m):
            raise ParameterError(f"matrix shape {A.shape} does not match {m} sites")
    env = C * np.exp(-2 * beta * plane_distances(coords))
    for j, A in enumerate(mats):
        excess = _site_abs(A, m) - env * (1 + slack)
        if (excess > 0).any():
            x, y = np.unravel_index(int(np.argmax(excess)), excess.shape)
            raise HypothesisError(
                f"A{j} violates the decay envelope at x={tuple(coords[x])}, y={tuple(coords[y])}"
            )
    b = ball_indices(coords, 2 * r)
    candidates = [k] if k is not None else [0, 1, 2]
    chosen = None
    for j in candidates:
        K = _site_abs(mats[j], m)[np.ix_(b, b)] if b.size else np.zeros((0, 0))
        if K.size == 0 or K.max() <= C * eps * (1 + slack):
            chosen = j
            break
    if chosen is None:
        raise HypothesisError(f"no factor is below C*eps={C * eps:.3e} on B_2r(0)")
    l1 = np.repeat((coords[:, 0] >= 0).astype(float), ORBITALS)
    l2 = np.repeat((coords[:, 1] >= 0).astype(float), ORBITALS)
    B1 = mats[1] * l1[None, :] - l1[:, None] * mats[1]
    B2 = mats[2] * l2[None, :] - l2[:, None] * mats[2]
    tr = complex(np.einsum("ij,ji->", mats[0], B1 @ B2))
    return TrilinearResult(tr, trilinear_bound_value(C, beta, r, eps), chosen)


def locality_bound(delta: float, r: float, eps: float, nu: float) -> float:
    """``(C/delta^12)(exp(-delta r / 2C) + eps^1/2)`` with the difference-lemma
    constant ``C = 2^35 nu^-20``; astronomically slack at desk scale."""
    C = 2.0**35 * nu**-20
    return C / delta**12 * (math.exp(-delta * r / (2 * C)) + math.sqrt(eps))
