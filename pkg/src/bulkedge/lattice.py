"""Integer-lattice primitives and the periodic window standing in for Z^2.

Basis convention used everywhere in the package: a window of side ``n`` has
``n*n`` sites ordered row-major in the local offsets ``(i1, i2)``, and each
site carries the two sublattice orbitals A, B.  The flat index of orbital
``o`` at site ``(i1, i2)`` is ``2 * (i1 * n + i2) + o``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import GeometryError

MAX_WINDOW = 128
MIN_WINDOW = 5  # twice the maximal stencil range, plus one


class Site(NamedTuple):
    x1: int
    x2: int

    def __add__(self, other):  # type: ignore[override]
        return Site(self.x1 + other[0], self.x2 + other[1])

    def __sub__(self, other):
        return Site(self.x1 - other[0], self.x2 - other[1])


class Orbital(enum.IntEnum):
    A = 0
    B = 1


ORBITALS = 2


def l1_distance(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def ball_sites(center, r: int) -> list[Site]:
    """All sites of the closed l1 ball of radius ``r`` around ``center``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    c1, c2 = center
    out = []
    for d1 in range(-r, r + 1):
        rest = r - abs(d1)
        for d2 in range(-rest, rest + 1):
            out.append(Site(c1 + d1, c2 + d2))
    return out


def _wrap_offset(v, n: int):
    h = n // 2
    return (v + h) % n - h


@dataclass(frozen=True)
class TorusWindow:
    """Periodic ``n x n`` window centred at ``origin``.

    Canonical coordinates are ``origin + o`` with each offset component in
    ``[-(n // 2), ceil(n / 2) - 1]``.
    """

    n: int
    origin: Site = Site(0, 0)

    def __post_init__(self):
        if not MIN_WINDOW <= self.n <= MAX_WINDOW:
            raise GeometryError(
                f"window side must lie in [{MIN_WINDOW}, {MAX_WINDOW}], got {self.n}"
            )
        object.__setattr__(self, "origin", Site(*map(int, self.origin)))

    @property
    def n_sites(self) -> int:
        return self.n * self.n

    @property
    def dim(self) -> int:
        return ORBITALS * self.n * self.n

    @property
    def margin(self) -> int:
        """Largest radius r such that B_r(origin) sits inside the window."""
        return (self.n - 1) // 2

    @property
    def diameter(self) -> int:
        return 2 * (self.n - 1)

    def wrap(self, s) -> Site:
        return Site(
            self.origin.x1 + int(_wrap_offset(s[0] - self.origin.x1, self.n)),
            self.origin.x2 + int(_wrap_offset(s[1] - self.origin.x2, self.n)),
        )

    def distance(self, a, b) -> int:
        """l1 distance on the torus (minimum over periodic images)."""
        d1 = abs(int(_wrap_offset(a[0] - b[0], self.n)))
        d2 = abs(int(_wrap_offset(a[1] - b[1], self.n)))
        return d1 + d2

    def index(self, s) -> int:
        """Flat site index of (the canonical representative of) ``s``."""
        h = self.n // 2
        i1 = (s[0] - self.origin.x1 + h) % self.n
        i2 = (s[1] - self.origin.x2 + h) % self.n
        return int(i1 * self.n + i2)

    def site(self, index: int) -> Site:
        i1, i2 = divmod(int(index), self.n)
        h = self.n // 2
        return Site(self.origin.x1 + i1 - h, self.origin.x2 + i2 - h)

    @cached_property
    def coords(self) -> np.ndarray:
        """``(n*n, 2)`` integer array of canonical site coordinates."""
        off = np.arange(self.n) - self.n // 2
        i1, i2 = np.meshgrid(off, off, indexing="ij")
        xy = np.stack([i1.ravel(), i2.ravel()], axis=1).astype(np.int64)
        xy += np.array(self.origin, dtype=np.int64)
        xy.setflags(write=False)
        return xy

    def sites(self) -> list[Site]:
        return [Site(int(a), int(b)) for a, b in self.coords]

    def contains(self, s) -> bool:
        return self.wrap(s) == Site(*s)

    def site_distance_matrix(self, periodic: bool = True) -> np.ndarray:
        """``(n*n, n*n)`` matrix of l1 distances between window sites."""
        xy = self.coords
        d = xy[:, None, :] - xy[None, :, :]
        if periodic:
            d = _wrap_offset(d, self.n)
        return np.abs(d).sum(axis=-1)

    def offsets_from(self, corner) -> np.ndarray:
        """Coordinates of every window site relative to ``corner``, wrapped
        into ``[-(n // 2), ceil(n / 2) - 1]`` so the cut lines sit opposite
        ``corner`` on the torus."""
        return _wrap_offset(self.coords - np.asarray(corner, dtype=np.int64), self.n)

    def orbital_sites(self) -> np.ndarray:
        """Site index of each basis vector."""
        return np.repeat(np.arange(self.n_sites), ORBITALS)


def torus_wrap(w: TorusWindow, s) -> Site:
    return w.wrap(s)


def torus_distance(w: TorusWindow, a, b) -> int:
    return w.distance(a, b)
