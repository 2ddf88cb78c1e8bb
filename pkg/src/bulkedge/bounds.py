"""Numerical checks of the closed-form lattice-sum, norm and kernel estimates.

Infinite sums are truncated at a cutoff and the exact (or a certified) tail
is added to the left-hand side before comparing, so every truncation error
goes in the conservative direction.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .conductance import trilinear_trace_bound
from .errors import HypothesisError, ParameterError, PreconditionError, PrecisionError
from .hamiltonians import DEFAULT_NU, StencilOperator, build_model, s_alpha, shortrange_certificate
from .lattice import ORBITALS, TorusWindow
from .spectral import kernel_s_alpha, site_kernel, torus_spectrum

PASS_SLACK = 1e-12
SWEEP_RATES = (0.1, 0.25, 0.5, 1.0)
SWEEP_RADII = (5, 10, 20)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    parameters: dict = field(compare=False)
    lhs: float
    rhs: float
    log_lhs: float | None = None
    log_rhs: float | None = None

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + PASS_SLACK

    @property
    def ratio(self) -> float:
        if self.log_lhs is not None and self.log_rhs is not None:
            return math.exp(self.log_lhs - self.log_rhs)
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = self.ratio
        d["pass"] = self.passed
        return d


def _log_check(name, params, log_lhs, log_rhs) -> BoundCheck:
    return BoundCheck(name, params, math.exp(log_lhs), math.exp(log_rhs), log_lhs, log_rhs)


def _min_cutoff(rate: float) -> int:
    return math.ceil(40 / rate)


def _check_rate(name: str, v: float):
    if not 0 < v <= 1:
        raise ParameterError(f"{name} must lie in (0, 1], got {v}")


# --------------------------------------------------------------------------
# one- and two-dimensional exponential sums

def _shell_tail(q: float, K: int) -> float:
    """``sum_{m > K} 4 m q^m``: the 2D l1 shells beyond radius K."""
    return 4 * q ** (K + 1) * ((K + 1) * (1 - q) + q) / (1 - q) ** 2


def verify_sum_bounds(a: float, R: float, cutoff: int | None = None) -> list[BoundCheck]:
    """``sum_Z e^{-2a|s|} <= 2/a``, ``sum_Z2 e^{-2a|x|} <= 4/a^2`` and
    ``sum_{|x| >= R} e^{-2a|x|} <= (8/a^2) e^{-aR}``."""
    _check_rate("a", a)
    if R <= 0:
        raise ParameterError("R must be positive")
    cutoff = _min_cutoff(a) if cutoff is None else int(cutoff)
    if cutoff < 40 / a:
        raise PrecisionError(f"cutoff {cutoff} is below 40/a = {40 / a:.1f}")
    q = math.exp(-2 * a)
    K = max(cutoff, math.ceil(R))
    m = np.arange(K + 1)
    w1 = q**m
    one = 1 + 2 * w1[1:].sum() + 2 * q ** (K + 1) / (1 - q)
    shells = np.where(m == 0, 1, 4 * m) * w1
    two = shells.sum() + _shell_tail(q, K)
    far = shells[m >= R].sum() + _shell_tail(q, K)
    p = {"a": a, "R": R, "cutoff": K}
    return [
        BoundCheck("sum_1d", p, float(one), 2 / a),
        BoundCheck("sum_2d", p, float(two), 4 / a**2),
        BoundCheck("sum_2d_tail", p, float(far), 8 / a**2 * math.exp(-a * R)),
    ]


# --------------------------------------------------------------------------
# operator norm and S_alpha

def verify_norm_bounds(op: StencilOperator, nu: float = DEFAULT_NU,
                       alphas: Sequence[float] = (), n: int = 24) -> list[BoundCheck]:
    """Schur-test norm bound and the slope chain ``S_a/a <= S_nu/nu <= 16/nu^4``.

    The norm is the largest eigenvalue modulus on an ``n x n`` torus.
    """
    cert = shortrange_certificate(op, nu)
    if not cert.passed:
        raise PreconditionError(f"operator is not short range at nu={nu} (ratio {cert.worst_ratio:.3f})")
    w = TorusWindow(n)
    norm = float(np.abs(torus_spectrum(op, w)).max()) if op.hops else 0.0
    out = [BoundCheck("schur_norm", {"nu": nu, "n": n, "op": op.label}, norm, 4 / nu**3)]
    s_nu = s_alpha(op, nu)
    out.append(BoundCheck("s_nu", {"nu": nu, "op": op.label}, s_nu / nu, 16 / nu**4))
    for a in alphas:
        if not 0 < a <= nu:
            raise ParameterError(f"alpha must lie in (0, nu], got {a}")
        out.append(BoundCheck("s_alpha_slope", {"nu": nu, "alpha": a, "op": op.label},
                              s_alpha(op, a) / a, s_nu / nu))
    return out


# --------------------------------------------------------------------------
# convolution of exponential kernels

def _g_exact(t: int, beta: float, K: int) -> float:
    """``sum_s e^{-2b|t - s| - 2b|s|}`` summed on ``|s| <= K`` plus the
    closed-form tail (requires ``K >= |t|``)."""
    s = np.arange(-K, K + 1)
    core = np.exp(-2 * beta * (np.abs(t - s) + np.abs(s))).sum()
    r = math.exp(-4 * beta)
    tail = (math.exp(2 * beta * t) + math.exp(-2 * beta * t)) * r ** (K + 1) / (1 - r)
    return float(core + tail)


def _f3(x2: int, beta: float, K: int) -> float:
    """``sum_{y, z} e^{-2b|x2 - y| - 2b|y - z| - 2b|z|}`` with a certified tail."""
    y = np.arange(-K, K + 1)
    s = np.arange(-2 * K, 2 * K + 1)
    e = np.exp(-2 * beta * np.abs(s))
    r = math.exp(-4 * beta)
    # g(y) for |y| <= K: convolution on |s| <= 2K plus the exact tail
    gy = np.convolve(e, e, mode="same")[K : 3 * K + 1]
    gy = gy + 2 * np.cosh(2 * beta * y) * r ** (2 * K + 1) / (1 - r)
    core = float((np.exp(-2 * beta * np.abs(x2 - y)) * gy).sum())
    # g(y) <= (|y| + c) e^{-2b|y|} and e^{-2b|x2 - y|} <= e^{2b|x2|} e^{-2b|y|}
    q2 = math.exp(-2 * beta) ** 2
    c = 1 + 2 * q2 / (1 - q2)
    p = math.exp(-4 * beta)
    tail_m = p ** (K + 1) * ((K + 1) * (1 - p) + p) / (1 - p) ** 2
    tail_1 = p ** (K + 1) / (1 - p)
    tail = 2 * math.exp(2 * beta * abs(x2)) * (tail_m + c * tail_1)
    return core + tail


def conv_lhs_log(beta: float, x, w, K: int) -> float:
    """Logarithm of the double sum over ``y, z`` of the seven-exponent kernel.

    The sum factorises into ``e^{-2b|w2|} g(x1) g(w1) F(x2)``.
    """
    return (-2 * beta * abs(w[1]) + math.log(_g_exact(int(x[0]), beta, K))
            + math.log(_g_exact(int(w[0]), beta, K)) + math.log(_f3(int(x[1]), beta, K)))


def conv_lhs_direct(beta: float, x, w, K: int) -> float:
    """Plain truncated double sum over ``|y|_inf, |z|_inf <= K`` (no tail);
    an independent check on the factorised route for small ``K``."""
    r = np.arange(-K, K + 1)
    y1, y2, z1, z2 = np.meshgrid(r, r, r, r, indexing="ij", sparse=True)
    e = (np.abs(x[0] - y1) + np.abs(x[1] - y2) + np.abs(y2 - z2) + np.abs(y1)
         + np.abs(z1) + np.abs(z1 - w[0]) + np.abs(z2) + abs(w[1]))
    return float(np.exp(-2 * beta * e).sum())


def verify_conv_bound(beta: float, samples: Iterable, cutoff: int | None = None) -> list[BoundCheck]:
    """Per sample ``(x, w)``: the convolution bound
    ``sum_{y,z} ... <= (4/b)^4 e^{-b|x| - b|w|}`` and the one-dimensional step
    ``sum_s e^{-2b|t - s| - 2b|s|} <= 4 e^{-b|t|}/b`` at ``t = x1``."""
    _check_rate("beta", beta)
    cutoff = _min_cutoff(beta) if cutoff is None else int(cutoff)
    if cutoff < 40 / beta:
        raise PrecisionError(f"cutoff {cutoff} is below 40/beta = {40 / beta:.1f}")
    out = []
    for x, w in samples:
        x, w = tuple(map(int, x)), tuple(map(int, w))
        K = cutoff + max(map(abs, x + w))
        p = {"beta": beta, "x": x, "w": w, "cutoff": K}
        lhs = conv_lhs_log(beta, x, w, K)
        rhs = 4 * math.log(4 / beta) - beta * (abs(x[0]) + abs(x[1]) + abs(w[0]) + abs(w[1]))
        out.append(_log_check("conv", p, lhs, rhs))
        t = x[0]
        out.append(_log_check("conv_1d_step", {"beta": beta, "t": t, "cutoff": K},
                              math.log(_g_exact(t, beta, K)),
                              math.log(4 / beta) - beta * abs(t)))
    return out


# --------------------------------------------------------------------------
# Combes-Thomas

def verify_ct_bound(H: np.ndarray, z: complex, alpha: float, nu: float,
                    w: TorusWindow) -> BoundCheck:
    """Entrywise ``|(H - z)^-1(x, y)| <= e^{-alpha|x - y|} / (D - S_alpha)``.

    ``lhs`` is ``max |R(x, y)| e^{alpha |x - y|}`` and ``rhs`` is
    ``1 / (D - S_alpha)``, with torus distances.
    """
    if not 0 < alpha < 2 * nu:
        raise ParameterError(f"alpha must lie in (0, 2 nu), got {alpha}")
    lam = np.linalg.eigvalsh((H + H.conj().T) / 2)
    Delta = float(np.min(np.abs(lam - z)))
    sa = kernel_s_alpha(H, w, alpha)
    if not Delta > sa:
        raise HypothesisError(f"dist(z, spec) = {Delta:.4g} does not exceed S_alpha = {sa:.4g}")
    I = np.eye(H.shape[0])
    R = np.linalg.solve(H - z * I, I)
    lhs = float((site_kernel(R, w) * np.exp(alpha * w.site_distance_matrix())).max())
    p = {"z": str(complex(z)), "alpha": alpha, "nu": nu, "n": w.n, "S_alpha": sa, "Delta": Delta}
    return BoundCheck("combes_thomas", p, lhs, 1 / (Delta - sa))


# --------------------------------------------------------------------------
# trilinear trace bound on synthetic envelopes

def square_patch(half: int) -> np.ndarray:
    r = np.arange(-half, half + 1)
    a, b = np.meshgrid(r, r, indexing="ij")
    return np.stack([a.ravel(), b.ravel()], axis=1).astype(np.int64)


def envelope_kernel(coords: np.ndarray, beta: float, C: float, rng) -> np.ndarray:
    """Random kernel with ``|A(x, y)| = C e^{-2b|x - y|} u``, ``u`` uniform in [0, 1]."""
    m = len(coords)
    D = np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=-1)
    env = np.repeat(np.repeat(C * np.exp(-2 * beta * D), ORBITALS, 0), ORBITALS, 1)
    shape = (ORBITALS * m, ORBITALS * m)
    phase = np.exp(2j * np.pi * rng.random(shape))
    return env * rng.random(shape) * phase


def verify_trilinear(beta: float, r: float, eps: float = 1e-4, C: float = 1.0, k: int = 0,
                     half: int = 6, seed: int = 0) -> BoundCheck:
    """Trilinear trace bound for three random kernels on the envelope, with
    factor ``k`` scaled by ``eps`` on ``B_2r(0)``."""
    rng = np.random.default_rng(seed)
    coords = square_patch(half)
    mats = [envelope_kernel(coords, beta, C, rng) for _ in range(3)]
    inner = np.repeat(np.abs(coords).sum(axis=1) <= 2 * r, ORBITALS)
    mats[k] = mats[k] * np.where(inner[:, None] & inner[None, :], eps, 1.0)
    res = trilinear_trace_bound(*mats, C=C, beta=beta, r=r, eps=eps, coords=coords, k=k)
    p = {"beta": beta, "r": r, "eps": eps, "C": C, "k": k, "half": half, "seed": seed}
    return BoundCheck("trilinear", p, abs(res.trace_value), res.bound)


# --------------------------------------------------------------------------
# default sweep

def random_samples(n: int, seed: int, span: int = 12) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    rng = np.random.default_rng(seed)
    pts = rng.integers(-span, span + 1, size=(n, 4))
    return [((int(a), int(b)), (int(c), int(d))) for a, b, c, d in pts]


def default_sweep(seed: int = 0, n_samples: int = 16, nu: float = DEFAULT_NU,
                  s: float = 0.5) -> list[BoundCheck]:
    checks: list[BoundCheck] = []
    for a in SWEEP_RATES:
        for R in SWEEP_RADII:
            checks += verify_sum_bounds(a, R)
    for kind in ("haldane_plus", "haldane_minus", "wallace", "imaginary_s"):
        checks += verify_norm_bounds(build_model(kind, s), nu, (nu / 8, nu / 4, nu / 2, nu))
    samples = random_samples(n_samples, seed) + [((0, 0), (0, 0)), ((4, 0), (0, 4))]
    for b in SWEEP_RATES:
        checks += verify_conv_bound(b, samples)
        for j, r in enumerate(SWEEP_RADII):
            checks.append(verify_trilinear(b, r, k=j % 3, seed=seed + j))
    w = TorusWindow(24)
    H = build_model("haldane_plus", s).matrix(w)
    gap = float(np.min(np.abs(np.linalg.eigvalsh(H))))
    alpha = 2**-5 * nu**4 * gap
    for z in (0.0, 0.9 * gap, 0.5j):
        checks.append(verify_ct_bound(H, z, alpha, nu, w))
    return checks
