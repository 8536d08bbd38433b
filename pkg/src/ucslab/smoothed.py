"""Smoothed Gaussian-indicator functionals over a halfspace system.

Each row's strict inequality is relaxed to ``Phi(((omega_i, x) - delta_i) / sigma)``.
The functionals Y, R, S and L exponentiate such terms scaled by ``1/sigma``,
so everything is carried in log space: ``(Phi(t) - 1)`` is evaluated as
``-exp(log_deficit(t))``, never by subtracting from one.

Conventions used throughout:

* a system with no rows has no d-row; Y and the pair factors then reduce to
  empty products;
* the ``-shift/S`` offset on the auxiliary row j contributes the constant
  ``exp(-shift * beta * p / sigma)`` to every pair term, so it is applied even
  when the system has fewer than two rows (the auxiliary row is then vacuous,
  with ``Phi == 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal

import numpy as np
from scipy.special import log_ndtr, ndtr

from .family import element_degrees
from .halfspace import HalfspaceSystem, strict_margin, vertex_matrix

Which = Literal["R", "S", "L"]
LOG_UNDERFLOW = -745.0
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def gaussian_cdf(t):
    return ndtr(t)


def log_deficit(t):
    """``log(1 - Phi(t))`` through the lower tail, stable for large ``t``.

    For negative ``t`` the deficit is close to 1, and ``log1p(-Phi(t))`` keeps
    the relative precision that ``log_ndtr`` of a large argument gives up.
    """
    t = np.asarray(t, dtype=float)
    return np.where(t < 0, np.log1p(-ndtr(np.minimum(t, 0.0))), log_ndtr(-t))


def _log_pdf(t):
    t = np.asarray(t, dtype=float)
    return -0.5 * t * t - _LOG_SQRT_2PI


@dataclass(frozen=True)
class SmoothingParams:
    sigma: float
    S_const: float = 10.0
    gamma: float = 1.0
    d: int = 0
    alpha: int = 1
    beta: int = 1
    p: int = 1
    D_1: int = 2
    D_2: int = 2
    M: int = 2
    j_aux: int | None = None
    l_shift: float = 5.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not (self.S_const > 0 and self.gamma > 0):
            raise ValueError("S_const and gamma must be positive")
        if not (1 <= self.alpha <= self.D_1 and 1 <= self.beta <= self.D_2 and 1 <= self.p <= self.M):
            raise ValueError("alpha, beta, p must lie in [D_1], [D_2], [M]")
        if self.j_aux is not None and self.j_aux == self.d:
            raise ValueError("j_aux must differ from d")

    def aux_row(self, n_rows: int) -> int | None:
        if self.j_aux is not None:
            return self.j_aux if self.j_aux < n_rows else None
        for i in range(n_rows):
            if i != self.d:
                return i
        return None

    @property
    def bp(self) -> float:
        return float(self.beta * self.p)

    @property
    def d_scale(self) -> float:
        return math.sqrt(self.alpha * self.p)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class SmoothEval:
    value: float
    log_terms: np.ndarray
    signs: np.ndarray
    sigma_used: float
    log_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "sigma_used": self.sigma_used,
            "log_terms": [None if not np.isfinite(v) else float(v) for v in self.log_terms],
            "signs": [int(s) for s in self.signs],
        }


@dataclass
class KKTResidual:
    lam: float
    residuals: dict[tuple[int, int, int, int, int], float] = field(default_factory=dict)
    max_abs: float = 0.0
    constraint: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    epsilon: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("the multiplier must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "max_abs": self.max_abs,
            "epsilon": self.epsilon,
            "residuals": [
                {"alpha": a, "beta": b, "p": p, "d": d, "j": j, "value": v}
                for (a, b, p, d, j), v in sorted(self.residuals.items())
            ],
            "constraint": [
                {"alpha": a, "beta": b, "p": p, "d": d, "excess": v}
                for (a, b, p, d), v in sorted(self.constraint.items())
            ],
        }


class _Arrays:
    """Float view of a system: ``omega`` (N, n) and ``delta`` (N,)."""

    def __init__(self, n: int, omega: np.ndarray, delta: np.ndarray):
        self.n = n
        self.omega = omega
        self.delta = delta
        self.verts = vertex_matrix(n).astype(float)

    @classmethod
    def of(cls, system: HalfspaceSystem) -> "_Arrays":
        return cls(system.n, system.omega_matrix(), system.delta_vector())

    @property
    def N(self) -> int:
        return self.omega.shape[0]

    def perturbed(self, row: int, coord: int, h: float) -> "_Arrays":
        omega = self.omega.copy()
        omega[row, coord] += h
        return _Arrays(self.n, omega, self.delta)


def _row_args(arr: _Arrays, params: SmoothingParams) -> tuple[np.ndarray, np.ndarray]:
    """Scaled arguments ``s_i t_i(x)`` (N, 2^n) and scales ``s_i`` (N,)."""
    t = (arr.omega @ arr.verts.T - arr.delta[:, None]) / params.sigma
    scale = np.ones(arr.N)
    if arr.N and params.d < arr.N:
        scale[params.d] = params.d_scale
    return t * scale[:, None], scale


def _y_weights(arr: _Arrays, params: SmoothingParams) -> np.ndarray:
    w = np.full(arr.N, params.S_const * params.bp)
    if arr.N and params.d < arr.N:
        w[params.d] = params.gamma * params.bp
    return w


def _check_d(arr: _Arrays, params: SmoothingParams) -> None:
    if arr.N and not 0 <= params.d < arr.N:
        raise ValueError(f"d={params.d} is not a row index of a {arr.N}-row system")


def _log_y(arr: _Arrays, params: SmoothingParams) -> np.ndarray:
    _check_d(arr, params)
    if arr.N == 0:
        return np.zeros(1 << arr.n)
    args, _ = _row_args(arr, params)
    deficits = np.exp(log_deficit(args))
    return -(_y_weights(arr, params)[:, None] * deficits).sum(axis=0) / params.sigma


def phi_indicator(system: HalfspaceSystem, x: int, sigma: float) -> float:
    """Product over rows of ``Phi(((omega_i, x) - delta_i) / sigma)``."""
    if not system.rows:
        return 1.0
    arr = _Arrays.of(system)
    t = (arr.omega @ arr.verts[x] - arr.delta) / sigma
    return float(np.exp(log_ndtr(t).sum()))


def count_approx(system: HalfspaceSystem, sigma: float) -> float:
    if not system.rows:
        return float(1 << system.n)
    arr = _Arrays.of(system)
    t = (arr.omega @ arr.verts.T - arr.delta[:, None]) / sigma
    return math.fsum(np.exp(log_ndtr(t).sum(axis=0)))


@dataclass
class YEval:
    log_value: np.ndarray
    underflow: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return np.where(self.underflow, 0.0, np.exp(self.log_value))


def y_eval(system: HalfspaceSystem, x: int | None, params: SmoothingParams) -> YEval:
    """log Y per vertex (or for one vertex ``x``); underflowed entries clamp to 0."""
    logy = _log_y(_Arrays.of(system), params)
    if x is not None:
        logy = logy[[x]]
    return YEval(logy, logy < LOG_UNDERFLOW)


def _r_coeffs(n: int) -> np.ndarray:
    x = np.arange(1 << n)
    return np.where(x & 1, -1.0, 1.0)


def _s_coeffs(n: int) -> np.ndarray:
    verts = vertex_matrix(n)
    return verts[:, 1:].sum(axis=1) - (n - 1) * verts[:, 0]


def _signed_eval(coeffs: np.ndarray, logy: np.ndarray, sigma: float) -> SmoothEval:
    with np.errstate(divide="ignore"):
        log_terms = np.log(np.abs(coeffs)) + logy
    signs = np.sign(coeffs).astype(int)
    value = math.fsum(np.where(signs != 0, signs * np.exp(log_terms), 0.0))
    return SmoothEval(value, log_terms, signs, sigma)


def r_eval(system: HalfspaceSystem, params: SmoothingParams) -> SmoothEval:
    """Sum of Y minus twice the part on sets containing element 1."""
    return _signed_eval(_r_coeffs(system.n), _log_y(_Arrays.of(system), params), params.sigma)


def s_eval(system: HalfspaceSystem, params: SmoothingParams) -> SmoothEval:
    return _signed_eval(_s_coeffs(system.n), _log_y(_Arrays.of(system), params), params.sigma)


def _pair_parts(arr: _Arrays, params: SmoothingParams):
    """Per-row pair weights, closure weights, scales and vertex deficits."""
    _check_d(arr, params)
    bp, sig = params.bp, params.sigma
    pair_w = np.full(arr.N, params.S_const * bp)
    close_w = np.full(arr.N, bp)
    if arr.N:
        pair_w[params.d] = params.S_const * params.gamma * bp
        close_w[params.d] = params.gamma * bp
    args, scale = _row_args(arr, params)
    deficits = np.exp(log_deficit(args)) if arr.N else np.zeros((0, 1 << arr.n))
    return pair_w / sig, close_w / sig, args, scale, deficits


def _log_pairs(arr: _Arrays, params: SmoothingParams) -> np.ndarray:
    pair_w, close_w, _, _, deficits = _pair_parts(arr, params)
    size = 1 << arr.n
    single = (pair_w[:, None] * deficits).sum(axis=0)
    closure = (close_w[:, None] * deficits).sum(axis=0)
    idx = np.arange(size)
    union = idx[:, None] | idx[None, :]
    shift = params.l_shift * params.bp / params.sigma
    return -shift - single[:, None] - single[None, :] - closure[union]


def l_eval(system: HalfspaceSystem, params: SmoothingParams) -> SmoothEval:
    """Sum over ordered vertex pairs of membership, offset and closure factors.

    All pair terms are positive, so ``log_value`` is a log-sum-exp and stays
    meaningful where ``value`` underflows to zero. ``log_terms[x]`` is the
    log of the partial sum over ``y`` for fixed ``x``.
    """
    lp = _log_pairs(_Arrays.of(system), params)
    top = lp.max()
    per_x = top + np.log(np.exp(lp - top).sum(axis=1))
    ptop = per_x.max()
    log_value = float(ptop + math.log(math.fsum(np.exp(per_x - ptop))))
    value = math.exp(log_value) if log_value > LOG_UNDERFLOW else 0.0
    return SmoothEval(value, per_x, np.ones(len(per_x), dtype=int), params.sigma, log_value)


def _functional(arr: _Arrays, params: SmoothingParams, which: Which) -> float:
    if which == "L":
        lp = _log_pairs(arr, params)
        return math.fsum(np.exp(lp).ravel())
    coeffs = _r_coeffs(arr.n) if which == "R" else _s_coeffs(arr.n)
    return math.fsum(coeffs * np.exp(_log_y(arr, params)))


def _grad(arr: _Arrays, params: SmoothingParams, which: Which, d_row: int, j_coord: int) -> float:
    if arr.N == 0:
        return 0.0
    if not 0 <= d_row < arr.N or not 0 <= j_coord < arr.n:
        raise ValueError("row or coordinate out of range")
    sig = params.sigma
    xj = arr.verts[:, j_coord]
    if which == "L":
        pair_w, close_w, args, scale, _ = _pair_parts(arr, params)
        dens = np.exp(_log_pdf(args[d_row])) * scale[d_row] / sig
        single = pair_w[d_row] * dens * xj
        closure = close_w[d_row] * dens * xj
        idx = np.arange(1 << arr.n)
        union = idx[:, None] | idx[None, :]
        dexp = single[:, None] + single[None, :] + closure[union]
        return math.fsum((np.exp(_log_pairs(arr, params)) * dexp).ravel())
    args, scale = _row_args(arr, params)
    w = _y_weights(arr, params)[d_row]
    dlogy = w * np.exp(_log_pdf(args[d_row])) * scale[d_row] * xj / sig**2
    coeffs = _r_coeffs(arr.n) if which == "R" else _s_coeffs(arr.n)
    return math.fsum(coeffs * np.exp(_log_y(arr, params)) * dlogy)


def grad_smoothed(system: HalfspaceSystem, params: SmoothingParams, which: Which,
                  d_row: int, j_coord: int) -> float:
    """Analytic partial derivative in ``omega[d_row][j_coord]`` (0-based).

    Each Phi factor differentiates to the normal density at its scaled
    argument, times the scale and the vertex coordinate, over sigma.
    """
    return _grad(_Arrays.of(system), params, which, d_row, j_coord)


def fd_gradient(system: HalfspaceSystem, params: SmoothingParams, which: Which,
                d_row: int, j_coord: int, h: float | None = None) -> float:
    """Central difference of the same functional; oracle for ``grad_smoothed``."""
    arr = _Arrays.of(system)
    return central_difference(lambda a: _functional(a, params, which), arr, d_row, j_coord, h)


def central_difference(f, arr: _Arrays, row: int, coord: int, h: float | None = None) -> float:
    if h is None:
        h = 1e-5 * max(1.0, abs(arr.omega[row, coord]))
    if not h > 0:
        raise ValueError("step must be positive")
    return (f(arr.perturbed(row, coord, h)) - f(arr.perturbed(row, coord, -h))) / (2 * h)


def epsilon_schedule(sigma: float, power: float = 0.5) -> float:
    return sigma**power


def kkt_residual(system: HalfspaceSystem, params: SmoothingParams, lam: float,
                 rows: Iterable[int] | None = None, coords: Iterable[int] | None = None,
                 projected: bool = False, eps_power: float = 0.5) -> KKTResidual:
    """Stationarity residual ``R' - lam (S' + L')`` over the (alpha, beta, p, d, j) grid.

    With ``projected=True`` each partial is replaced by its component along
    ``e_j - e_n``, the direction that keeps the row sum fixed. Coordinates in
    the returned keys are 1-based; rows are 0-based.
    """
    out = KKTResidual(lam)
    if system.N == 0:
        return out
    arr = _Arrays.of(system)
    rows = list(range(system.N)) if rows is None else list(rows)
    coords = list(range(system.n)) if coords is None else [j - 1 for j in coords]
    out.epsilon = epsilon_schedule(params.sigma, eps_power)
    worst = 0.0
    for alpha in range(1, params.D_1 + 1):
        for beta in range(1, params.D_2 + 1):
            for p in range(1, params.M + 1):
                for d in rows:
                    aux = None if params.j_aux == d else params.j_aux
                    prm = replace(params, alpha=alpha, beta=beta, p=p, d=d, j_aux=aux)
                    g = {}
                    for which in ("R", "S", "L"):
                        g[which] = [_grad(arr, prm, which, d, j) for j in range(system.n)]
                    for j in coords:
                        if projected:
                            comp = {w: g[w][j] - g[w][system.n - 1] for w in g}
                        else:
                            comp = {w: g[w][j] for w in g}
                        r = comp["R"] - lam * (comp["S"] + comp["L"])
                        out.residuals[(alpha, beta, p, d, j + 1)] = r
                        worst = max(worst, abs(r))
                    s_val = _functional(arr, prm, "S")
                    l_val = _functional(arr, prm, "L")
                    out.constraint[(alpha, beta, p, d)] = max(0.0, s_val + l_val - out.epsilon)
    out.max_abs = worst
    return out


def sigma_for(system: HalfspaceSystem, divisor: float = 25.0) -> float:
    """``margin / divisor``; a vacuous system counts as unit margin."""
    m = strict_margin(system)
    m = 1.0 if m == float("inf") else float(m)
    return m / divisor


@dataclass
class Reference:
    size: int
    r_limit: int
    s_limit: int


def limit_references(system: HalfspaceSystem) -> Reference:
    """Exact sigma -> 0 targets from the encoded family's degrees."""
    fam = system.family()
    deg = element_degrees(fam)
    return Reference(len(fam), len(fam) - 2 * deg[0], sum(deg[1:]) - (fam.n - 1) * deg[0])
