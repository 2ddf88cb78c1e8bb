"""Interface operators joining two bulk Hamiltonians across a domain."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import Domain, dist_to_boundary
from .errors import GeometryError
from .hamiltonians import DEFAULT_NU, StencilOperator, build_model
from .lattice import ORBITALS, TorusWindow


@dataclass(frozen=True, eq=False)
class InterfaceOperator:
    h_plus: StencilOperator
    h_minus: StencilOperator
    domain: Domain
    window: TorusWindow
    assembled: np.ndarray
    e_part: np.ndarray

    @property
    def hermiticity_defect(self) -> float:
        return float(np.abs(self.assembled - self.assembled.conj().T).max())

    def bulk_part(self) -> np.ndarray:
        """``1_O H+ 1_O + 1_Oc H- 1_Oc`` on the window."""
        inside = self.domain.mask(self.window)
        return (self.h_plus.matrix(self.window, inside, inside)
                + self.h_minus.matrix(self.window, ~inside, ~inside))


def _check_geometry(hp: StencilOperator, hm: StencilOperator, d: Domain, w: TorusWindow):
    rng = max(hp.range, hm.range)
    if 2 * rng + 1 > w.n:
        raise GeometryError(f"window n={w.n} too small for stencil range {rng}")
    width = d.strip_width()
    if width is not None and w.n - width < 2 * rng + 1:
        # the wrapped complement would be thinner than the stencil reach and
        # the two interface components would couple directly
        raise GeometryError(
            f"strip of {width} rows leaves only {w.n - width} complement rows on n={w.n}"
        )


def assemble_interface(hp: StencilOperator, hm: StencilOperator, d: Domain,
                       w: TorusWindow) -> InterfaceOperator:
    """``1_O H+ 1_O + 1_Oc H- 1_Oc + 1_O H+ 1_Oc + 1_Oc H+ 1_O``.

    The cross terms are taken from ``H+`` on both sides, which keeps the sum
    Hermitian; the correction ``E`` is exactly those cross terms.
    """
    _check_geometry(hp, hm, d, w)
    inside = d.mask(w)
    outside = ~inside
    e_part = hp.matrix(w, inside, outside) + hp.matrix(w, outside, inside)
    total = hp.matrix(w, inside, inside) + hm.matrix(w, outside, outside) + e_part
    return InterfaceOperator(hp, hm, d, w, total, e_part)


def assemble_haldane_edge(s: float, d: Domain, w: TorusWindow) -> InterfaceOperator:
    """Edge operator ``H+ - 2 1_Oc S 1_Oc`` of the Haldane pair."""
    hp = build_model("haldane_plus", s)
    hm = build_model("haldane_minus", s)
    S = build_model("imaginary_s", s)
    _check_geometry(hp, hm, d, w)
    inside = d.mask(w)
    outside = ~inside
    total = hp.matrix(w) - 2 * S.matrix(w, outside, outside)
    bulk = hp.matrix(w, inside, inside) + hm.matrix(w, outside, outside)
    return InterfaceOperator(hp, hm, d, w, total, total - bulk)


@dataclass(frozen=True)
class A2Report:
    nu: float
    worst_ratio: float
    worst_entry: tuple | None

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0


def verify_assumption_a2(op: InterfaceOperator, nu: float = DEFAULT_NU) -> A2Report:
    """Entrywise check of ``|E(x, y)| <= exp(-2 nu d(x, boundary)) / nu``.

    Distances are taken on the torus, to the boundary of the domain as the
    window sees it (wrap-around interfaces included).
    """
    dist = dist_to_boundary(op.domain, op.window, periodic=True)
    row_dist = np.repeat(dist, ORBITALS).astype(float)
    scaled = np.abs(op.e_part) * (nu * np.exp(2 * nu * row_dist))[:, None]
    if not scaled.size or not scaled.any():
        return A2Report(nu, 0.0, None)
    flat = int(np.argmax(scaled))
    i, j = divmod(flat, scaled.shape[1])
    w = op.window
    entry = (tuple(w.site(i // ORBITALS)), i % ORBITALS, tuple(w.site(j // ORBITALS)), j % ORBITALS)
    return A2Report(nu, float(scaled[i, j]), entry)


def e_support_distance(op: InterfaceOperator) -> int:
    """Largest boundary distance of a site touched by a nonzero entry of E."""
    dist = dist_to_boundary(op.domain, op.window, periodic=True)
    rows, cols = np.nonzero(np.abs(op.e_part) > 0)
    if rows.size == 0:
        return 0
    sites = np.concatenate([rows, cols]) // ORBITALS
    return int(dist[sites].max())
