"""Lattice domains, their boundaries, filling radii and boundary distances.

A :class:`Domain` wraps a vectorised membership predicate defined on all of
Z^2.  Geometry is then evaluated on a :class:`~bulkedge.lattice.TorusWindow`
either in the plane (``periodic=False``: the analytic predicate is evaluated
on unwrapped neighbours) or on the torus itself (``periodic=True``: the
domain is first restricted to the window and neighbours wrap around).  The
torus variant is what the assembled operators actually see.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .lattice import Site, TorusWindow

Predicate = Callable[[np.ndarray, np.ndarray], np.ndarray]

SHAPES = ("half_plane", "quadrant", "strip", "half_strip", "parabola",
          "full", "empty", "custom")

_UNIT_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class Domain:
    membership: Predicate = field(repr=False, compare=False)
    label: str
    params: tuple = ()

    def __call__(self, x1, x2) -> np.ndarray:
        return np.asarray(self.membership(np.asarray(x1), np.asarray(x2)), dtype=bool)

    def __contains__(self, s) -> bool:
        return bool(self(np.array([s[0]]), np.array([s[1]]))[0])

    def complement(self) -> "Domain":
        inner = self.membership
        return Domain(lambda a, b: ~np.asarray(inner(a, b), dtype=bool),
                      f"complement({self.label})", self.params)

    def mask(self, w: TorusWindow) -> np.ndarray:
        """Membership of each window site (canonical coordinates)."""
        return self(w.coords[:, 0], w.coords[:, 1])

    def descriptor(self) -> str:
        if not self.params:
            return self.label
        return self.label + ":" + ",".join(f"{k}={v}" for k, v in self.params)

    def strip_width(self) -> int | None:
        """Number of lattice rows a strip-like domain occupies, if bounded."""
        p = dict(self.params)
        if self.label in ("strip", "half_strip"):
            return 2 * int(p["L"]) + 1
        return None


def _require(cond, msg):
    if not cond:
        raise ParameterError(msg)


def make_domain(shape: str, **params) -> Domain:
    """Build one of the gallery domains.

    ``half_plane``: x1 >= c (or x2 >= c with ``axis=2``).
    ``quadrant``: x1 >= c1 and x2 >= c2.
    ``strip``: |x2 - c| <= L; ``rotate=True`` bounds x1 instead.
    ``half_strip``: x1 >= 0 and |x2 - c| <= L.
    ``parabola``: x2 >= a * x1**2.
    ``custom``: explicit ``members`` (iterable of sites).
    """
    shape = shape.replace("-", "_").lower()
    if shape == "halfplane":
        shape = "half_plane"
    if shape == "halfstrip":
        shape = "half_strip"
    if shape not in SHAPES:
        raise ParameterError(f"unknown shape {shape!r}; expected one of {SHAPES}")

    if shape == "half_plane":
        c = int(params.get("c", 0))
        axis = int(params.get("axis", 1))
        _require(axis in (1, 2), "half_plane axis must be 1 or 2")
        if axis == 1:
            return Domain(lambda a, b: a >= c, shape, (("c", c),) if c else ())
        return Domain(lambda a, b: b >= c, shape, (("axis", 2), ("c", c)))
    if shape == "quadrant":
        c1, c2 = int(params.get("c1", 0)), int(params.get("c2", 0))
        return Domain(lambda a, b: (a >= c1) & (b >= c2), shape,
                      (("c1", c1), ("c2", c2)) if (c1 or c2) else ())
    if shape in ("strip", "half_strip"):
        _require("L" in params, f"{shape} needs a half-width L")
        L = params["L"]
        _require(float(L) == int(L) and int(L) >= 0, f"strip half-width must be an integer >= 0, got {L}")
        L = int(L)
        c = int(params.get("c", 0))
        rotate = bool(params.get("rotate", False))
        if shape == "strip":
            if rotate:
                pred = lambda a, b: np.abs(a - c) <= L
            else:
                pred = lambda a, b: np.abs(b - c) <= L
        else:
            _require(not rotate, "half_strip does not support rotate")
            pred = lambda a, b: (a >= 0) & (np.abs(b - c) <= L)
        extra = (("c", c),) if c else ()
        extra += (("rotate", True),) if rotate else ()
        return Domain(pred, shape, (("L", L),) + extra)
    if shape == "parabola":
        a_ = params.get("a", 1)
        _require(a_ > 0, "parabola coefficient must be positive")
        return Domain(lambda a, b: b >= a_ * a * a, shape, (("a", a_),) if a_ != 1 else ())
    if shape == "full":
        return Domain(lambda a, b: np.ones(np.shape(a), dtype=bool), shape)
    if shape == "empty":
        return Domain(lambda a, b: np.zeros(np.shape(a), dtype=bool), shape)

    members = params.get("members")
    _require(members is not None, "custom domain needs members")
    keys = np.array(sorted({(int(p[0]), int(p[1])) for p in members}), dtype=np.int64).reshape(-1, 2)
    lookup = {tuple(k) for k in keys.tolist()}

    def pred(a, b):
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = np.fromiter(((int(u), int(v)) in lookup for u, v in zip(a.ravel(), b.ravel())),
                          dtype=bool, count=a.size)
        return out.reshape(a.shape)

    return Domain(pred, "custom", (("count", len(lookup)),))


def load_custom_domain(path) -> Domain:
    """Read one ``x1 x2`` pair per line (``#`` comments allowed)."""
    members = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ParameterError(f"{path}:{lineno}: expected 'x1 x2', got {line!r}")
        members.append((int(parts[0]), int(parts[1])))
    return make_domain("custom", members=members)


def parse_domain(descriptor: str) -> Domain:
    """Parse ``shape[:k=v,...]`` descriptors such as ``strip:L=2``."""
    name, _, rest = descriptor.strip().partition(":")
    params: dict = {}
    if rest:
        for item in rest.split(","):
            k, eq, v = item.partition("=")
            if not eq:
                raise ParameterError(f"bad domain parameter {item!r} in {descriptor!r}")
            k, v = k.strip(), v.strip()
            if k == "path":
                return load_custom_domain(v)
            if v.lower() in ("true", "false"):
                params[k] = v.lower() == "true"
            else:
                try:
                    params[k] = int(v)
                except ValueError:
                    try:
                        params[k] = float(v)
                    except ValueError as exc:
                        raise ParameterError(f"bad value {v!r} for {k}") from exc
    return make_domain(name, **params)


def _boundary_mask(d: Domain, w: TorusWindow, periodic: bool) -> np.ndarray:
    xy = w.coords
    inside = d(xy[:, 0], xy[:, 1])
    on = np.zeros_like(inside)
    if periodic:
        grid = inside.reshape(w.n, w.n)
        for s1, s2 in _UNIT_STEPS:
            nb = np.roll(grid, shift=(-s1, -s2), axis=(0, 1)).ravel()
            on |= nb != inside
    else:
        for s1, s2 in _UNIT_STEPS:
            on |= d(xy[:, 0] + s1, xy[:, 1] + s2) != inside
    return on


def boundary(d: Domain, w: TorusWindow, periodic: bool = False) -> list[Site]:
    """Sites of the window lying on the boundary of ``d``.

    A site belongs to the boundary when its unit ball leaves the side of the
    partition it sits in; the definition is symmetric in ``d`` and its
    complement.
    """
    idx = np.flatnonzero(_boundary_mask(d, w, periodic))
    return [Site(int(a), int(b)) for a, b in w.coords[idx]]


class FillingRadius(NamedTuple):
    radius: int
    ball_fits: bool  # False when not even B_0 fits, i.e. d misses the window


def filling_radius(d: Domain, w: TorusWindow) -> FillingRadius:
    """Window-limited filling radius.

    Largest integer r <= ``w.margin`` such that B_r(c) lies in ``d`` for some
    centre c of the window.  Membership is evaluated analytically (unclipped),
    so the result is a lower bound for the true filling radius.
    """
    m = w.margin
    h = w.n // 2
    off = np.arange(-h - m - 1, w.n - h + m + 1)
    g1, g2 = np.meshgrid(off + w.origin.x1, off + w.origin.x2, indexing="ij")
    inside = d(g1, g2)
    if not inside.any():
        return FillingRadius(0, False)
    if inside.all():
        return FillingRadius(m, True)
    # taxicab distance to the nearest non-member; B_r(c) fits iff it exceeds r
    dist = ndimage.distance_transform_cdt(inside, metric="taxicab")
    core = dist[m + 1 : m + 1 + w.n, m + 1 : m + 1 + w.n]
    best = int(core.max())
    if best == 0:
        return FillingRadius(0, False)
    return FillingRadius(min(best - 1, m), True)


def dist_to_boundary(d: Domain, w: TorusWindow, periodic: bool = False) -> np.ndarray:
    """Exact l1 distance from each window site to the boundary sites.

    Returns an array aligned with ``w.coords``.  Only boundary sites inside
    the window are seen; with an empty boundary every entry equals
    ``w.diameter``.
    """
    on = _boundary_mask(d, w, periodic).reshape(w.n, w.n)
    if not on.any():
        return np.full(w.n_sites, w.diameter, dtype=np.int64)
    if periodic:
        tiled = np.tile(~on, (3, 3))
        dist = ndimage.distance_transform_cdt(tiled, metric="taxicab")
        dist = dist[w.n : 2 * w.n, w.n : 2 * w.n]
    else:
        dist = ndimage.distance_transform_cdt(~on, metric="taxicab")
    return dist.ravel().astype(np.int64)


@dataclass(frozen=True)
class GeometryReport:
    fr_omega: int
    fr_complement: int
    boundary_sites: list


def geometry_report(d: Domain, w: TorusWindow) -> GeometryReport:
    return GeometryReport(
        filling_radius(d, w).radius,
        filling_radius(d.complement(), w).radius,
        boundary(d, w),
    )
