"""Scenario configs, the operations they chain, and report serialisation.

A scenario is a small INI file::

    [scenario]
    name = strip-margin
    seed = 0
    operations = margin

    [model]
    kind = haldane
    s = 0.01
    nu = 0.25

    [window]
    n = 32

    [domain]
    descriptor = strip:L=2

    [energy]
    G = -0.5, 0.5

    [op.margin]
    # optional per-operation parameters

Reports carry the SHA-256 of the canonical scenario JSON; every emitted
file starts with it.  Wall time is kept on the in-memory report only so
that emitted files are byte-identical across reruns.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .bounds import default_sweep
from .conductance import SwitchPair, chern_fhs, sigma_realspace
from .domains import filling_radius, parse_domain
from .errors import BulkEdgeError, ContractViolation, ParameterError
from .hamiltonians import DEFAULT_NU, MODEL_ALIASES, BlochSymbol, build_model, model_constants
from .interface import assemble_haldane_edge
from .lattice import MAX_WINDOW, MIN_WINDOW, ORBITALS, Site, TorusWindow
from .spectral import (
    decay_probe,
    delta_density,
    eig_hermitian,
    gap_at,
    invertibility_margin,
    spectral_projector,
    strip_inverse_ratio,
    torus_spectrum,
)

# published values of the model constants and the tolerances they are checked at
REFERENCE_CONSTANTS = {
    "lambda0": (1.00, 0.01),
    "mu0": (0.18, 0.01),
    "c0_range": (27.0, 34.0),
    "rho0": (1.5e-7, 0.15),
}


@dataclass
class Scenario:
    name: str
    model: str = "haldane"
    s: float = 0.5
    nu: float = DEFAULT_NU
    n: int = 24
    domain: str | None = None
    G: tuple[float, float] = (-0.5, 0.5)
    operations: list[tuple[str, dict]] = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name, "model": self.model, "s": self.s, "nu": self.nu, "n": self.n,
            "domain": self.domain, "G": list(self.G),
            "operations": [[op, dict(sorted(p.items()))] for op, p in self.operations],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(d["name"], d["model"], d["s"], d["nu"], d["n"], d["domain"], tuple(d["G"]),
                   [(op, dict(p)) for op, p in d["operations"]], d["seed"])

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def validate(self) -> None:
        errors = []
        if self.model not in MODEL_ALIASES and self.model != "haldane":
            errors.append(f"model: unknown kind {self.model!r}")
        if not isinstance(self.s, (int, float)) or not 0 <= self.s <= 1:
            errors.append(f"s: must lie in [0, 1], got {self.s!r}")
        if not isinstance(self.nu, (int, float)) or not 0 < self.nu <= 1:
            errors.append(f"nu: must lie in (0, 1], got {self.nu!r}")
        if not isinstance(self.n, int) or not MIN_WINDOW <= self.n <= MAX_WINDOW:
            errors.append(f"n: must be an integer in [{MIN_WINDOW}, {MAX_WINDOW}], got {self.n!r}")
        if len(self.G) != 2 or not self.G[0] < self.G[1]:
            errors.append(f"G: need a < b, got {self.G!r}")
        if self.domain is not None:
            try:
                d = parse_domain(self.domain)
                width = d.strip_width()
                if width is not None and isinstance(self.n, int) and self.n - width < MIN_WINDOW:
                    errors.append(f"domain: {width} strip rows leave fewer than {MIN_WINDOW} on n={self.n}")
            except BulkEdgeError as exc:
                errors.append(f"domain: {exc}")
        for op, _ in self.operations:
            if op not in OPERATIONS:
                errors.append(f"operations: unknown operation {op!r}")
        if not self.operations:
            errors.append("operations: empty list")
        if errors:
            raise ParameterError("invalid scenario: " + "; ".join(errors))


def _bulk_kind(model: str) -> str:
    return "haldane_plus" if model == "haldane" else model


# --------------------------------------------------------------------------
# INI configs

def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case (R_tr, G)
    return cp


def load_config(path) -> Scenario:
    cp = _parser()
    if not cp.read(path):
        raise ParameterError(f"cannot read config {path}")
    return scenario_from_parser(cp)


def parse_config(text: str) -> Scenario:
    cp = _parser()
    cp.read_string(text)
    return scenario_from_parser(cp)


def _typed(v: str):
    v = v.strip()
    if v.lower() in ("true", "false"):
        return v.lower() == "true"
    if "," in v:
        return [_typed(x) for x in v.split(",") if x.strip()]
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def scenario_from_parser(cp: configparser.ConfigParser) -> Scenario:
    errors = []

    def get(section, key, conv, default):
        if not cp.has_option(section, key):
            return default
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError:
            errors.append(f"{section}.{key}: cannot parse {raw!r}")
            return default

    name = get("scenario", "name", str, "scenario")
    seed = get("scenario", "seed", int, 0)
    ops = [o.strip() for o in get("scenario", "operations", str, "").split(",") if o.strip()]
    model = get("model", "kind", str, "haldane")
    s = get("model", "s", float, 0.5)
    nu = get("model", "nu", float, DEFAULT_NU)
    n = get("window", "n", int, 24)
    domain = get("domain", "descriptor", str, None)
    G = get("energy", "G", lambda v: tuple(float(x) for x in v.split(",")), (-0.5, 0.5))
    operations = []
    for op in ops:
        sec = f"op.{op}"
        params = {k: _typed(v) for k, v in cp.items(sec)} if cp.has_section(sec) else {}
        operations.append((op, params))
    if errors:
        raise ParameterError("invalid config: " + "; ".join(errors))
    return Scenario(name, model, s, nu, n, domain, G, operations, seed)


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ", ".join(map(_fmt, v)) + ("," if len(v) == 1 else "")
    return repr(v) if isinstance(v, float) else str(v)


def dump_config(sc: Scenario) -> str:
    cp = _parser()
    cp["scenario"] = {"name": sc.name, "seed": str(sc.seed),
                      "operations": ", ".join(op for op, _ in sc.operations)}
    cp["model"] = {"kind": sc.model, "s": repr(sc.s), "nu": repr(sc.nu)}
    cp["window"] = {"n": str(sc.n)}
    if sc.domain is not None:
        cp["domain"] = {"descriptor": sc.domain}
    cp["energy"] = {"G": f"{sc.G[0]!r}, {sc.G[1]!r}"}
    for op, p in sc.operations:
        if p:
            cp[f"op.{op}"] = {k: _fmt(v) for k, v in p.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# --------------------------------------------------------------------------
# operations

@dataclass
class OpResult:
    op: str
    params: dict
    result: dict
    checks: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)   # name -> {"columns": [...], "rows": [[...]]}
    plot: dict | None = None                      # {"columns": [...], "rows": [[...]]}

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"op": self.op, "params": self.params, "result": self.result, "checks": self.checks,
                "tables": self.tables, "plot": self.plot}

    @classmethod
    def from_dict(cls, d: dict) -> "OpResult":
        return cls(d["op"], d["params"], d["result"], d["checks"], d["tables"], d["plot"])


def _table(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [[_plain(v) for v in r] for r in rows]}


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    return v


class Context:
    """Shared state for one scenario run; later operations reuse earlier work."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.window = TorusWindow(sc.n)
        self.domain = parse_domain(sc.domain) if sc.domain else None
        self._cache: dict = {}

    def operator(self, s: float | None = None, n: int | None = None) -> np.ndarray:
        s = self.sc.s if s is None else s
        w = self.window if n is None else TorusWindow(n)
        key = ("op", s, w.n)
        if key not in self._cache:
            if self.domain is None:
                self._cache[key] = build_model(_bulk_kind(self.sc.model), s).matrix(w)
            else:
                self._cache[key] = assemble_haldane_edge(s, self.domain, w).assembled
        return self._cache[key]

    def eigenvalues(self) -> np.ndarray:
        if "eig" not in self._cache:
            self._cache["eig"] = eig_hermitian(self.operator(), vectors=False).eigenvalues
        return self._cache["eig"]


def op_spectrum(ctx: Context, p: dict) -> OpResult:
    lam = ctx.eigenvalues()
    rows = [[i, float(v)] for i, v in enumerate(lam)]
    res = {"dim": len(lam), "min_abs": float(np.abs(lam).min()), "max_abs": float(np.abs(lam).max())}
    return OpResult("spectrum", p, res, {}, {"spectrum": _table(["index", "eigenvalue"], rows)},
                    _table(["index", "eigenvalue"], rows))


def _ball_radius(ctx: Context) -> float:
    if ctx.domain is None:
        return float(ctx.window.margin)
    return float(min(filling_radius(ctx.domain, ctx.window).radius,
                     filling_radius(ctx.domain.complement(), ctx.window).radius))


def op_density(ctx: Context, p: dict) -> OpResult:
    R = float(p.get("ball_radius", ctx.sc.n / 4))
    rep = delta_density(ctx.eigenvalues(), ctx.sc.G, R)
    res = {"gap_interval": list(rep.gap_interval), "density": rep.density, "n_in_gap": rep.n_in_gap,
           "ball_radius": R, "empirical_coefficient": rep.empirical_coefficient,
           "min_filling_radius": _ball_radius(ctx)}
    checks = {}
    if "max_density" in p:
        checks["density_below_max"] = rep.density <= float(p["max_density"])
    return OpResult("density", p, res, checks)


def op_conductance(ctx: Context, p: dict) -> OpResult:
    if ctx.domain is not None:
        # an interface operator generally has spectrum in the bulk gap, where
        # the trace formula is not defined
        raise ContractViolation("conductance needs a gapped bulk model; drop the domain")
    kind = _bulk_kind(ctx.sc.model)
    w = ctx.window
    sd = eig_hermitian(ctx.operator())
    P = spectral_projector(sd, float(p.get("energy", 0.0)))
    R_tr = int(p.get("R_tr", w.n // 4))
    corner = Site(*p.get("corner", (0, 0)))
    rep = sigma_realspace(P, SwitchPair(corner), R_tr, w)
    op = build_model(kind, ctx.sc.s)
    chern = chern_fhs(lambda xi: op.symbol(xi), int(p.get("grid_n", 64)))
    res = {"model": kind, "s": ctx.sc.s, "n": w.n, "corner": list(corner), "R_tr": R_tr,
           "sigma_raw": rep.sigma, "sigma_rounded": rep.sigma_rounded, "defect": rep.rounding_defect,
           "chern": chern, "gap": gap_at(sd, 0.0)}
    tol = float(p.get("tolerance", 0.05))
    return OpResult("conductance", p, res,
                    {"quantized": rep.rounding_defect <= tol, "matches_chern": rep.sigma_rounded == chern})


def op_constants(ctx: Context, p: dict) -> OpResult:
    mc = model_constants(int(p.get("grid_n", 512)))
    ref = REFERENCE_CONSTANTS
    checks = {
        "lambda0": abs(mc.lambda0 - ref["lambda0"][0]) <= ref["lambda0"][1],
        "mu0": abs(mc.mu0 - ref["mu0"][0]) <= ref["mu0"][1],
        "c0": ref["c0_range"][0] <= mc.c0 <= ref["c0_range"][1],
        "rho0": abs(mc.rho0 - ref["rho0"][0]) <= ref["rho0"][1] * ref["rho0"][0],
    }
    res = mc.to_dict()
    res["rho0_relative_deviation"] = mc.rho0 / ref["rho0"][0] - 1
    return OpResult("constants", p, res, checks)


def margin_row(s: float, d, w: TorusWindow) -> dict:
    m = invertibility_margin(s, d, w)
    lam = eig_hermitian(assemble_haldane_edge(s, d, w).assembled, vectors=False).eigenvalues
    he = float(np.abs(lam).min())
    return {"s": s, "norm": m.norm, "margin": m.margin, "certified_bound": m.min_singular_bound,
            "min_spec_he": he, "min_spec_hplus": m.gap_plus, "ratio": he / m.gap_plus}


def op_margin(ctx: Context, p: dict) -> OpResult:
    if ctx.domain is None:
        raise ContractViolation("margin needs a domain")
    row = margin_row(ctx.sc.s, ctx.domain, ctx.window)
    checks = {}
    if row["margin"] > 0:
        checks["certified_bound_holds"] = row["min_spec_he"] >= row["certified_bound"] - 1e-9
        checks["he_invertible"] = row["min_spec_he"] > 0
    return OpResult("margin", p, row, checks)


def op_s_scan(ctx: Context, p: dict) -> OpResult:
    if ctx.domain is None:
        raise ContractViolation("s_scan needs a domain")
    values = [float(v) for v in p.get("values", (1e-3, 1e-2, 3e-2, 5e-2, 0.1, 0.2, 0.3))]
    ratio_cut = float(p.get("closing_ratio", 0.5))
    rows = [margin_row(s, ctx.domain, ctx.window) for s in values]
    checks = {}
    for r in rows:
        if r["margin"] > 0:
            checks[f"certified_bound_s={r['s']!r}"] = r["min_spec_he"] >= r["certified_bound"] - 1e-9
    # first s at which the edge gap has shrunk below the cut relative to the bulk gap
    threshold = next((r["s"] for r in rows if r["ratio"] < ratio_cut), None)
    last_positive = max((r["s"] for r in rows if r["margin"] > 0), default=None)
    cols = ["s", "norm", "margin", "certified_bound", "min_spec_he", "min_spec_hplus", "ratio"]
    tab = _table(cols, [[r[c] for c in cols] for r in rows])
    res = {"rows": rows, "closing_threshold": threshold, "closing_ratio": ratio_cut,
           "largest_s_with_positive_margin": last_positive}
    return OpResult("s_scan", p, res, checks, {"s_scan": tab}, tab)


def fit_log_coefficient(ns, densities) -> tuple[float, list[float]]:
    """Least-squares ``c`` in ``density ~ c ln R / R`` with ``R = n / 4``,
    plus the pointwise coefficients."""
    R = np.asarray(ns, dtype=float) / 4
    f = np.log(R) / R
    d = np.asarray(densities, dtype=float)
    c = float((f * d).sum() / (f * f).sum())
    return c, list(map(float, d / f))


def half_torus_density(n: int, s: float, G=(-0.5, 0.5)) -> dict:
    """Edge operator on a strip of half-width ``n/4`` (half the torus)."""
    from .domains import make_domain

    w = TorusWindow(n)
    d = make_domain("strip", L=n // 4)
    lam = eig_hermitian(assemble_haldane_edge(s, d, w).assembled, vectors=False).eigenvalues
    rep = delta_density(lam, G, n / 4)
    return {"n": n, "R": n / 4, "density": rep.density, "n_in_gap": rep.n_in_gap,
            "coefficient": rep.empirical_coefficient}


def op_n_scan(ctx: Context, p: dict) -> OpResult:
    ns = [int(v) for v in p.get("values", (16, 24, 32, 48))]
    rows = [half_torus_density(n, ctx.sc.s, ctx.sc.G) for n in ns]
    c, pointwise = fit_log_coefficient(ns, [r["density"] for r in rows])
    dens = [r["density"] for r in rows]
    checks = {
        "density_decreasing": all(a > b for a, b in zip(dens, dens[1:])),
        "coefficient_within_factor_2_of_fit": all(c / 2 <= x <= 2 * c for x in pointwise),
    }
    cols = ["n", "R", "density", "n_in_gap", "coefficient"]
    tab = _table(cols, [[r[k] for k in cols] for r in rows])
    res = {"rows": rows, "fitted_c": c, "pointwise_coefficients": pointwise,
           "coefficient_spread": max(pointwise) / min(pointwise)}
    return OpResult("n_scan", p, res, checks, {"n_scan": tab}, tab)


def op_bounds(ctx: Context, p: dict) -> OpResult:
    checks = default_sweep(seed=ctx.sc.seed, nu=ctx.sc.nu, s=ctx.sc.s if ctx.sc.s > 0 else 0.5)
    cols = ["name", "params", "lhs", "rhs", "ratio", "pass"]
    rows = [[c.name, json.dumps(_plain(c.parameters), sort_keys=True), c.lhs, c.rhs, c.ratio, c.passed]
            for c in checks]
    res = {"count": len(checks), "failures": sum(not c.passed for c in checks),
           "max_ratio": max(c.ratio for c in checks)}
    return OpResult("bounds", p, res, {"all_bounds_hold": res["failures"] == 0},
                    {"bounds": _table(cols, rows)})


def op_decay(ctx: Context, p: dict) -> OpResult:
    kind = p.get("kind", "projector")
    fit = decay_probe(ctx.operator(), ctx.window, kind, float(p.get("energy", 0.0)), ctx.sc.nu)
    res = {"kind": fit.kind, "rate": fit.rate, "prefactor": fit.prefactor, "bound_rate": fit.bound_rate,
           "worst_ratio": fit.worst_ratio}
    cols = ["distance", "max_kernel", "bound"]
    tab = _table(cols, zip(fit.distances, fit.max_kernel, fit.bound))
    return OpResult("decay", p, res, {"bound_holds": fit.passed}, {"decay": tab}, tab)


def perturbed_outside_ball(H: np.ndarray, w: TorusWindow, radius: int, mass: float = 1.0) -> np.ndarray:
    """``H`` plus a staggered mass ``+m`` on A, ``-m`` on B at sites with
    ``|x - origin| > radius`` (torus distance)."""
    far = np.array([w.distance(x, w.origin) > radius for x in w.coords])
    v = np.repeat(far.astype(float), ORBITALS) * np.tile([mass, -mass], w.n_sites)
    return H + np.diag(v)


def op_locality(ctx: Context, p: dict) -> OpResult:
    w = ctx.window
    radius = int(p.get("radius", w.n // 2))
    mass = float(p.get("mass", 1.0))
    R_tr = int(p.get("R_tr", 8))
    H1 = build_model(_bulk_kind(ctx.sc.model), ctx.sc.s).matrix(w)
    H2 = perturbed_outside_ball(H1, w, radius, mass)
    out = {}
    for key, H in (("h1", H1), ("h2", H2)):
        sd = eig_hermitian(H)
        out[f"gap_{key}"] = gap_at(sd, 0.0)
        out[f"sigma_{key}"] = sigma_realspace(spectral_projector(sd, 0.0), SwitchPair(w.origin), R_tr, w).sigma
        del sd
    out.update(radius=radius, mass=mass, R_tr=R_tr, difference=abs(out["sigma_h1"] - out["sigma_h2"]))
    tol = float(p.get("tolerance", 0.05))
    checks = {"sigma_close": out["difference"] <= tol,
              "both_gapped": min(out["gap_h1"], out["gap_h2"]) > 1e-9}
    return OpResult("locality", p, out, checks)


def op_strip_inverse(ctx: Context, p: dict) -> OpResult:
    Ls = [int(v) for v in p.get("L_values", (1, 2, 4))]
    ss = [float(v) for v in p.get("s_values", (1e-3, 1e-2, 1e-1))]
    trials = int(p.get("trials", 32))
    rows = []
    for L in Ls:
        for s in ss:
            n = max(48, 4 * (2 * L + 1))
            r = strip_inverse_ratio(L, s, n, trials, ctx.sc.seed)
            rows.append([L, s, n, r.max_ratio, r.bound, r.max_ratio / r.bound])
    cols = ["L", "s", "n", "max_ratio", "bound", "ratio_to_bound"]
    tab = _table(cols, rows)
    return OpResult("strip_inverse", p, {"violations": sum(r[3] > r[4] for r in rows)},
                    {"bound_holds": all(r[3] <= r[4] for r in rows)}, {"strip_inverse": tab}, tab)


def op_torus_gap(ctx: Context, p: dict) -> OpResult:
    """Bulk gap at 0 from momentum blocks (no dense diagonalisation)."""
    op = build_model(_bulk_kind(ctx.sc.model), ctx.sc.s)
    gap = float(np.abs(torus_spectrum(op, ctx.window)).min())
    return OpResult("torus_gap", p, {"gap": gap, "n": ctx.sc.n, "s": ctx.sc.s})


OPERATIONS: dict[str, Callable[[Context, dict], OpResult]] = {
    "spectrum": op_spectrum,
    "density": op_density,
    "conductance": op_conductance,
    "constants": op_constants,
    "margin": op_margin,
    "s_scan": op_s_scan,
    "n_scan": op_n_scan,
    "bounds": op_bounds,
    "decay": op_decay,
    "locality": op_locality,
    "strip_inverse": op_strip_inverse,
    "torus_gap": op_torus_gap,
}


# --------------------------------------------------------------------------
# builtin scenarios

def builtin_scenarios() -> dict[str, Scenario]:
    return {
        "halftorus-density": Scenario("halftorus-density", s=0.5, n=32, domain="strip:L=8", G=(-0.5, 0.5),
                                   operations=[("density", {"max_density": 0.35})]),
        "density-scan": Scenario("density-scan", s=0.5, n=16, G=(-0.5, 0.5),
                              operations=[("n_scan", {"values": [16, 24, 32, 48]})]),
        "strip-margin": Scenario("strip-margin", s=0.01, n=32, domain="strip:L=2",
                               operations=[("margin", {})]),
        "strip-scan": Scenario("strip-scan", s=0.01, n=32, domain="strip:L=2",
                              operations=[("s_scan", {})]),
        "constants": Scenario("constants", operations=[("constants", {"grid_n": 512})]),
        "bulk-conductance": Scenario("bulk-conductance", s=0.5, n=24,
                                     operations=[("conductance", {"R_tr": 6})]),
        "locality": Scenario("locality", s=0.5, n=48,
                             operations=[("locality", {"radius": 24, "mass": 1.0, "R_tr": 8})]),
        "bounds": Scenario("bounds", s=0.5, n=24, operations=[("bounds", {})]),
        "strip-inverse": Scenario("strip-inverse", n=48, operations=[("strip_inverse", {})]),
    }


# --------------------------------------------------------------------------
# reports

@dataclass
class RunReport:
    scenario: dict
    config_hash: str
    version: str
    results: list[OpResult]
    error: str | None = None
    wall_time: float | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"config_hash": self.config_hash, "version": self.version, "scenario": self.scenario,
                "results": [r.to_dict() for r in self.results], "error": self.error,
                "passed": self.passed}

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["scenario"], d["config_hash"], d["version"],
                   [OpResult.from_dict(r) for r in d["results"]], d.get("error"))


def run_scenario(sc: Scenario) -> RunReport:
    """Validate, then run the operations in order; a contract violation
    stops the run and is recorded on the report."""
    sc.validate()
    t0 = time.perf_counter()
    ctx = Context(sc)
    results, error = [], None
    for op, params in sc.operations:
        try:
            r = OPERATIONS[op](ctx, dict(params))
        except BulkEdgeError as exc:
            error = f"{op}: {type(exc).__name__}: {exc}"
            break
        r.result = _plain(r.result)
        r.params = _plain(r.params)
        r.checks = {k: bool(v) for k, v in r.checks.items()}
        results.append(r)
    return RunReport(_plain(sc.to_dict()), sc.config_hash(), __version__, results, error,
                     time.perf_counter() - t0)


def _json_text(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=1, allow_nan=True) + "\n"


def _csv_text(report: RunReport, tab: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash={report.config_hash}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(tab["columns"])
    for row in tab["rows"]:
        wr.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _summary_table(report: RunReport) -> dict:
    rows = []
    for r in report.results:
        for k, v in sorted(r.result.items()):
            if isinstance(v, (int, float, str, bool)) or v is None:
                rows.append([r.op, k, v])
    return {"columns": ["operation", "key", "value"], "rows": rows}


def emit_report(report: RunReport, fmt: str, out_dir) -> list[Path]:
    """Write ``json`` (full report), ``csv`` (one table per operation) or
    ``plotdata`` (x, y columns) files into ``out_dir``."""
    if fmt not in ("json", "csv", "plotdata"):
        raise ParameterError(f"unknown format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = report.scenario["name"]
    written = []
    if fmt == "json":
        p = out / f"{stem}.json"
        p.write_text(_json_text(report))
        return [p]
    for i, r in enumerate(report.results):
        if fmt == "csv":
            tabs = r.tables or {r.op: _summary_table(RunReport({}, "", "", [r]))}
            for name, tab in tabs.items():
                p = out / f"{stem}_{i}_{name}.csv"
                p.write_text(_csv_text(report, tab))
                written.append(p)
        elif r.plot is not None:
            p = out / f"{stem}_{i}_{r.op}.plot.csv"
            p.write_text(_csv_text(report, r.plot))
            written.append(p)
    return written


def load_report(path) -> RunReport:
    return RunReport.from_dict(json.loads(Path(path).read_text()))


def resolve_scenario(ref: str) -> Scenario:
    """A builtin scenario name or the path of an INI config."""
    table = builtin_scenarios()
    if ref in table:
        return table[ref]
    if Path(ref).exists():
        return load_config(ref)
    raise ParameterError(f"no builtin scenario or config file named {ref!r}; builtins: {sorted(table)}")


def _run_ref(ref: str) -> RunReport:
    return run_scenario(resolve_scenario(ref))
