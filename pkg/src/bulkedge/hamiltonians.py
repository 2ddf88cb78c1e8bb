"""Finite-range stencil operators and the Haldane-type models on Z^2.

A stencil stores hopping amplitudes ``hops[(d1, d2, a, b)]`` meaning

    (H psi)_n^a += amp * psi_{n + d}^b,

so the Wallace Hamiltonian ``H0``, the imaginary second-neighbour term ``S``
and ``H+- = H0 +- S`` are written exactly as the component formulas read.

Two Fourier conventions appear below:

* :meth:`StencilOperator.multiplier` is the matrix by which the stencil acts
  on a plane wave ``psi_n = exp(i n.xi) v``.  It is the one to use with FFTs.
* :meth:`StencilOperator.symbol` is the *display* convention
  ``sum_d h(d)^T exp(-i d.xi)``, i.e. ``multiplier(-xi).T``.  For the Haldane
  pair it reproduces the textbook matrix ``[[+-2s eta, conj(omega)],
  [omega, -+2s eta]]`` and it is the convention in which the plaquette Chern
  number of :func:`bulkedge.conductance.chern_fhs` equals the real-space
  conductance.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from .errors import GeometryError, ParameterError
from .lattice import ORBITALS, TorusWindow

A, B = 0, 1
DEFAULT_NU = 0.25
DIRAC_POINTS = np.array([[2 * np.pi / 3, -2 * np.pi / 3], [-2 * np.pi / 3, 2 * np.pi / 3]])

HopKey = tuple[int, int, int, int]


class StencilOperator:
    """Translation-covariant hopping operator with finite range."""

    def __init__(self, hops: Mapping[HopKey, complex], label: str = ""):
        clean = {}
        for (d1, d2, a, b), amp in hops.items():
            if a not in (A, B) or b not in (A, B):
                raise ParameterError(f"orbital indices must be 0 or 1, got {(a, b)}")
            amp = complex(amp)
            if amp != 0:
                key = (int(d1), int(d2), int(a), int(b))
                clean[key] = clean.get(key, 0) + amp
        self.hops: Mapping[HopKey, complex] = MappingProxyType(
            {k: v for k, v in sorted(clean.items()) if v != 0}
        )
        self.label = label

    def __repr__(self):
        return f"StencilOperator({self.label or 'anonymous'}, {len(self.hops)} hops, range={self.range})"

    @property
    def range(self) -> int:
        return max((abs(d1) + abs(d2) for d1, d2, _, _ in self.hops), default=0)

    def amplitude(self, d, a: int, b: int) -> complex:
        return self.hops.get((int(d[0]), int(d[1]), a, b), 0j)

    def hermiticity_defect(self) -> float:
        keys = set(self.hops) | {(-d1, -d2, b, a) for d1, d2, a, b in self.hops}
        return max(
            (abs(self.amplitude((-d1, -d2), b, a) - np.conj(self.amplitude((d1, d2), a, b)))
             for d1, d2, a, b in keys),
            default=0.0,
        )

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        return self.hermiticity_defect() <= tol

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "StencilOperator") -> "StencilOperator":
        hops = dict(self.hops)
        for k, v in other.hops.items():
            hops[k] = hops.get(k, 0) + v
        return StencilOperator(hops, f"({self.label}+{other.label})")

    def __mul__(self, c) -> "StencilOperator":
        return StencilOperator({k: c * v for k, v in self.hops.items()}, f"{c}*{self.label}")

    __rmul__ = __mul__

    def __neg__(self) -> "StencilOperator":
        return StencilOperator({k: -v for k, v in self.hops.items()}, f"-{self.label}")

    def __sub__(self, other: "StencilOperator") -> "StencilOperator":
        return self + (-other)

    # realisations ---------------------------------------------------------
    def matrix(self, w: TorusWindow, left=None, right=None) -> np.ndarray:
        """Dense ``1_left H 1_right`` on the torus window.

        ``left``/``right`` are boolean site masks aligned with ``w.coords``.
        """
        if 2 * self.range + 1 > w.n:
            raise GeometryError(f"window n={w.n} too small for stencil range {self.range}")
        n = w.n
        grid = np.arange(w.n_sites).reshape(n, n)
        M = np.zeros((w.dim, w.dim), dtype=complex)
        src = grid.ravel()
        for (d1, d2, a, b), amp in self.hops.items():
            tgt = np.roll(grid, shift=(-d1, -d2), axis=(0, 1)).ravel()
            M[ORBITALS * src + a, ORBITALS * tgt + b] += amp
        if left is not None:
            M *= np.repeat(np.asarray(left, dtype=float), ORBITALS)[:, None]
        if right is not None:
            M *= np.repeat(np.asarray(right, dtype=float), ORBITALS)[None, :]
        return M

    def multiplier(self, xi) -> np.ndarray:
        """Action on ``exp(i n.xi) v``; ``xi`` has shape ``(..., 2)``."""
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1] + (ORBITALS, ORBITALS), dtype=complex)
        for (d1, d2, a, b), amp in self.hops.items():
            out[..., a, b] += amp * np.exp(1j * (d1 * xi[..., 0] + d2 * xi[..., 1]))
        return out

    def symbol(self, xi) -> np.ndarray:
        """Display-convention symbol ``multiplier(-xi)`` transposed."""
        return np.swapaxes(self.multiplier(-np.asarray(xi, dtype=float)), -1, -2)


# --------------------------------------------------------------------------
# Haldane-type models

MODEL_ALIASES = {
    "wallace_h0": "wallace_h0", "h0": "wallace_h0", "wallace": "wallace_h0",
    "haldane_plus": "haldane_plus", "haldane+": "haldane_plus", "h+": "haldane_plus",
    "haldane_minus": "haldane_minus", "haldane-": "haldane_minus", "h-": "haldane_minus",
    "imaginary_s": "imaginary_s", "s": "imaginary_s",
}


def _wallace() -> StencilOperator:
    hops = {}
    for d in ((0, 0), (-1, 0), (0, -1)):
        hops[(d[0], d[1], A, B)] = 1.0
        hops[(-d[0], -d[1], B, A)] = 1.0
    return StencilOperator(hops, "H0")


def _imaginary_s(s: float) -> StencilOperator:
    # sublattice A pattern; B carries the opposite sign
    pattern = {(1, 0): 1, (-1, 0): -1, (0, -1): 1, (0, 1): -1, (-1, 1): 1, (1, -1): -1}
    hops = {}
    for (d1, d2), sgn in pattern.items():
        hops[(d1, d2, A, A)] = 1j * s * sgn
        hops[(d1, d2, B, B)] = -1j * s * sgn
    return StencilOperator(hops, f"S(s={s})")


def _check_s(s) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {s}")
    return s


def build_model(kind: str, s: float = 0.5) -> StencilOperator:
    """``wallace_h0``, ``haldane_plus``, ``haldane_minus`` or ``imaginary_s``."""
    try:
        kind = MODEL_ALIASES[kind.lower()]
    except KeyError:
        raise ParameterError(f"unknown model {kind!r}") from None
    if kind == "wallace_h0":
        return _wallace()
    s = _check_s(s)
    if kind == "imaginary_s":
        return _imaginary_s(s)
    op = _wallace() + _imaginary_s(s) if kind == "haldane_plus" else _wallace() - _imaginary_s(s)
    op.label = f"{'H+' if kind == 'haldane_plus' else 'H-'}(s={s})"
    return op


# --------------------------------------------------------------------------
# Bloch symbols

def omega(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return 1 + np.exp(1j * xi[..., 0]) + np.exp(1j * xi[..., 1])


def eta(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return np.sin(xi[..., 0]) - np.sin(xi[..., 1]) + np.sin(xi[..., 1] - xi[..., 0])


@dataclass(frozen=True)
class BlochSymbol:
    """Symbol of ``H0 + sign * S`` (sign 0 gives the Wallace model)."""

    s: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ParameterError("sign must be -1, 0 or +1")
        _check_s(self.s)

    @classmethod
    def for_model(cls, kind: str, s: float = 0.5) -> "BlochSymbol":
        kind = MODEL_ALIASES[kind.lower()]
        sign = {"wallace_h0": 0, "haldane_plus": 1, "haldane_minus": -1}.get(kind)
        if sign is None:
            raise ParameterError("imaginary_s alone has no gapped symbol")
        return cls(s if sign else 0.0, sign)

    def band(self, xi) -> np.ndarray:
        """Upper band ``lambda(xi) = sqrt((2 s eta)^2 + |omega|^2)`` of ``H0 +- S``."""
        mass = 2 * self.s * eta(xi) if self.sign else 0.0
        return np.sqrt(mass**2 + np.abs(omega(xi)) ** 2)

    def matrix(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        w = omega(xi)
        m = self.sign * 2 * self.s * eta(xi)
        out = np.empty(xi.shape[:-1] + (2, 2), dtype=complex)
        out[..., 0, 0] = m
        out[..., 0, 1] = np.conj(w)
        out[..., 1, 0] = w
        out[..., 1, 1] = -m
        return out

    def multiplier(self, xi) -> np.ndarray:
        return np.swapaxes(self.matrix(-np.asarray(xi, dtype=float)), -1, -2)

    def __call__(self, xi) -> np.ndarray:
        return self.matrix(xi)


class SymbolValue(NamedTuple):
    matrix: np.ndarray
    omega: complex
    eta: float
    lam: float


def symbol_eval(sym: BlochSymbol, xi) -> SymbolValue:
    xi = np.asarray(xi, dtype=float)
    return SymbolValue(sym.matrix(xi), complex(omega(xi)), float(eta(xi)), float(sym.band(xi)))


# --------------------------------------------------------------------------
# model constants

@dataclass(frozen=True)
class ModelConstants:
    lambda0: float
    mu0: float
    c0: float
    rho0: float
    grid_n: int

    def s_threshold(self, L: float) -> float:
        """Sufficient bound on s for the strip edge operator to stay invertible."""
        return self.rho0 / L

    def to_dict(self) -> dict:
        return asdict(self)


def c0_from(lambda0: float, mu0: float) -> float:
    return 2 ** (13 / 6) * math.pi ** (2 / 3) * mu0 ** (-2 / 3) * lambda0 ** (-2 / 3)


def model_constants(grid_n: int = 512) -> ModelConstants:
    """Grid minimisations over [-pi, pi]^2 (endpoints included).

    ``mu0`` uses the Euclidean distance to the two zeros of ``omega`` without
    periodic wrapping; the grid point nearest each zero is dropped (0/0).
    """
    if grid_n < 128:
        raise ParameterError("grid_n must be at least 128")
    ax = np.linspace(-np.pi, np.pi, grid_n)
    xi = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
    w = np.abs(omega(xi))
    lam = np.sqrt(4 * eta(xi) ** 2 + w**2)
    dist = np.min(np.linalg.norm(xi[..., None, :] - DIRAC_POINTS, axis=-1), axis=-1)
    keep = np.ones(dist.shape, dtype=bool)
    for p in DIRAC_POINTS:
        nearest = np.argmin(np.linalg.norm(xi - p, axis=-1))
        keep.flat[nearest] = False
    keep &= dist > 0
    lambda0 = float(lam.min())
    mu0 = float((w[keep] / dist[keep]).min())
    c0 = c0_from(lambda0, mu0)
    return ModelConstants(lambda0, mu0, c0, 6.0**-3 * c0**-3, grid_n)


# --------------------------------------------------------------------------
# short-range certificates

@dataclass(frozen=True)
class ShortRangeCertificate:
    nu: float
    alpha: float
    max_violation: float
    worst_ratio: float
    s_alpha: float
    s_nu: float
    schur_norm_bound: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= 0

    @property
    def slope_chain_ok(self) -> bool:
        return self.s_alpha / self.alpha <= self.s_nu / self.nu + 1e-12 <= 16 / self.nu**4 + 1e-12


def s_alpha(op: StencilOperator, alpha: float) -> float:
    """``sup_x sum_y |H(x, y)| (exp(alpha |x - y|) - 1)``, exact for a stencil."""
    rows = np.zeros(ORBITALS)
    for (d1, d2, a, _), amp in op.hops.items():
        rows[a] += abs(amp) * math.expm1(alpha * (abs(d1) + abs(d2)))
    return float(rows.max())


def shortrange_certificate(op: StencilOperator, nu: float = DEFAULT_NU,
                           alpha: float | None = None) -> ShortRangeCertificate:
    alpha = nu if alpha is None else alpha
    if not (0 < alpha <= nu <= 1):
        raise ParameterError(f"need 0 < alpha <= nu <= 1, got alpha={alpha}, nu={nu}")
    # far (zero) kernel entries approach the envelope from below, so the sup
    # of |H| - envelope over all of Z^2 is never below 0
    violation = 0.0
    ratio = 0.0
    for (d1, d2, _, _), amp in op.hops.items():
        r = abs(d1) + abs(d2)
        env = math.exp(-2 * nu * r) / nu
        violation = max(violation, abs(amp) - env)
        ratio = max(ratio, abs(amp) / env)
    return ShortRangeCertificate(
        nu=nu,
        alpha=alpha,
        max_violation=violation,
        worst_ratio=ratio,
        s_alpha=s_alpha(op, alpha),
        s_nu=s_alpha(op, nu),
        schur_norm_bound=4 / nu**3,
    )
