r"""Entanglement of two-mode Gaussian states.

Three quantities are provided:

``char_ent_pure``
    ``q^2`` of a pure state, read off ``det A = ((1+q^2)/(1-q^2))^2 / 4``.
``log_negativity``
    ``max(0, -ln 2 nu)`` with ``nu`` the smallest symplectic eigenvalue of the
    partially transposed covariance.
``geof``
    Gaussian entanglement of formation in characteristic units: the smallest
    ``q0^2`` of a pure covariance ``(L1 + L2) TMSS(q0) (L1 + L2)^T`` lying below the
    state's covariance.

The ``geof`` search first brings the state to standard form
``A = a I, B = b I, C = diag(c1, c2)`` with local symplectics (which leave all
three measures unchanged). There the optimum can be taken without x-p
correlations, so the pure state is ``P (+) P^{-1}/4`` and domination reduces to
a two-sided matrix bound ``lower <= P <= upper`` on a 2x2 block. The search
runs over ``P = lower + D^{1/2} Y D^{1/2}`` with ``0 <= Y <= I``, which is
feasible for every parameter value, and minimises the squared correlation of
``P``. At the optimum both bounds are active, so an angle scan over rank-one
``Y`` locates it and the full three-parameter search polishes it. Pure and
partly pure states, where the feasible set collapses, need no special handling.
``method="euler"`` searches the general seven-parameter family directly and is
kept as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import sqrtm
from scipy.optimize import minimize, minimize_scalar

from .channels import channel_output
from .core import (
    PAULI_Z,
    GaussianState,
    euler_compose,
    euler_decompose,
    rotation_matrix,
    symplectic_eigenvalues,
    tmss_cov,
)
from .errors import ConvergenceError, DegenerateChannelError, DomainError, PurityError

PURITY_TOL = 1e-6
FEASIBILITY_TOL = 1e-9
EPS_Q = 1e-6

_PT = np.diag([1.0, 1.0, 1.0, -1.0])
_I4 = np.eye(4)
_Q = np.block([[np.zeros((2, 2)), PAULI_Z], [PAULI_Z, np.zeros((2, 2))]])


def _two_mode(state: GaussianState) -> None:
    if state.n_modes != 2:
        raise DomainError(f"expected a two-mode state, got {state.n_modes} modes")


def char_from_detA(detA: float) -> float:
    """Invert ``det A = ((1+q^2)/(1-q^2))^2 / 4`` for ``q^2``."""
    s = 2.0 * math.sqrt(max(detA, 0.25))
    return (s - 1.0) / (s + 1.0)


def char_ent_pure(state: GaussianState) -> float:
    """Characteristic entanglement ``q^2`` of a pure two-mode state."""
    _two_mode(state)
    nu = state.symplectic_eigenvalues()
    if np.max(np.abs(nu - 0.5)) > PURITY_TOL:
        raise PurityError(f"state is mixed (symplectic eigenvalues {nu})")
    return char_from_detA(state.det_A())


def log_negativity(state: GaussianState) -> float:
    """Logarithmic negativity (natural log) of a two-mode Gaussian state."""
    _two_mode(state)
    nu = symplectic_eigenvalues(_PT @ state.cov @ _PT)[0]
    return max(0.0, -math.log(2.0 * nu))


# -- standard form ---------------------------------------------------------


def standard_form(state: GaussianState):
    """Local symplectic reduction to ``A = a I, B = b I, C = diag(c1, c2)``.

    Returns ``(a, b, c1, c2, L)`` with ``L`` the block-diagonal symplectic that
    achieves it (``L cov L^T`` is the standard form). The labelling is fixed so
    that ``c1 >= |c2|``.
    """
    _two_mode(state)
    A, B, C = state.A, state.B, state.C
    a = math.sqrt(np.linalg.det(A))
    b = math.sqrt(np.linalg.det(B))
    L1 = np.real(sqrtm(np.linalg.inv(A / a)))
    L2 = np.real(sqrtm(np.linalg.inv(B / b)))
    U, s, Wt = np.linalg.svd(L1 @ C @ L2.T)
    s = s.copy()
    W = Wt.T
    if np.linalg.det(U) < 0:
        U[:, 1] *= -1
        s[1] *= -1
    if np.linalg.det(W) < 0:
        W[:, 1] *= -1
        s[1] *= -1
    R1, R2 = U.T, W.T
    c1, c2 = s
    if abs(c2) > abs(c1):
        # quarter turn on both modes swaps the x and p correlations
        R1 = rotation_matrix(np.pi / 2) @ R1
        R2 = rotation_matrix(np.pi / 2) @ R2
        c1, c2 = c2, c1
    if c1 < 0:
        R2 = -R2
        c1, c2 = -c1, -c2
    L = np.zeros((4, 4))
    L[:2, :2] = R1 @ L1
    L[2:, 2:] = R2 @ L2
    return a, b, float(c1), float(c2), L


# -- standard-form search ------------------------------------------------------


def _decoupled_bounds(a: float, b: float, c1: float, c2: float):
    """``lower`` and ``sqrt(upper - lower)`` for the position block of a pure state.

    A pure covariance without x-p correlations is ``P (+) P^{-1}/4``. It lies
    below the standard form iff ``lower <= P <= upper`` with
    ``upper = [[a, c1], [c1, b]]`` and ``lower = [[a, c2], [c2, b]]^{-1} / 4``.
    """
    upper = np.array([[a, c1], [c1, b]])
    mp = np.array([[a, c2], [c2, b]])
    lower = 0.25 * np.linalg.inv(mp)
    w, v = np.linalg.eigh(upper - lower)
    # rounding in the inverse leaves eigenvalues of order eps * cond; their
    # square roots would open a spurious direction of size sqrt(eps * cond)
    eps = np.finfo(float).eps
    floor = 64 * eps * (np.linalg.cond(mp) * np.max(np.abs(lower)) + np.max(np.abs(upper)))
    w = np.where(w > floor, w, 0.0)
    return lower, (v * np.sqrt(w)) @ v.T


def _position_block(z, lower, root):
    """``P = lower + root Y root`` with ``Y`` the symmetric ``z`` clipped to ``0 <= Y <= I``.

    Returns ``(p11, p12, p22, moved)`` where ``moved`` is the squared distance
    the eigenvalues were clipped by.
    """
    m = 0.5 * (z[0] + z[2])
    r = math.hypot(0.5 * (z[0] - z[2]), z[1])
    phi = 0.5 * math.atan2(2.0 * z[1], z[0] - z[2])
    w1, w2 = m + r, m - r
    y1, y2 = min(max(w1, 0.0), 1.0), min(max(w2, 0.0), 1.0)
    c, s = math.cos(phi), math.sin(phi)
    k11, k12, k22 = root[0, 0], root[0, 1], root[1, 1]
    g1x, g1y = k11 * c + k12 * s, k12 * c + k22 * s
    g2x, g2y = k12 * c - k11 * s, k22 * c - k12 * s
    p11 = lower[0, 0] + y1 * g1x * g1x + y2 * g2x * g2x
    p12 = lower[0, 1] + y1 * g1x * g1y + y2 * g2x * g2y
    p22 = lower[1, 1] + y1 * g1y * g1y + y2 * g2y * g2y
    return p11, p12, p22, (w1 - y1) ** 2 + (w2 - y2) ** 2


def _decoupled_objective(z, lower, root):
    p11, p12, p22, moved = _position_block(z, lower, root)
    # the clipping distance keeps the objective from going flat outside the box
    return p12 * p12 / (p11 * p22) + moved


def _char_from_rho2(rho2: float) -> float:
    """``q^2`` of a pure state whose position block has squared correlation ``rho2``."""
    s = math.sqrt(max(0.0, 1.0 - rho2))
    return max(rho2, 0.0) / (1.0 + s) ** 2


def _decoupled_pure_cov(p11, p12, p22) -> np.ndarray:
    det = p11 * p22 - p12 * p12
    g = np.zeros((4, 4))
    g[0, 0], g[2, 2] = p11, p22
    g[0, 2] = g[2, 0] = p12
    g[1, 1], g[3, 3] = 0.25 * p22 / det, 0.25 * p11 / det
    g[1, 3] = g[3, 1] = -0.25 * p12 / det
    return g


def _projector_objective(phi, lower, root):
    c, s = math.cos(phi), math.sin(phi)
    return _decoupled_objective((c * c, c * s, s * s), lower, root)


def _best_projector(lower, root, n: int = 48) -> np.ndarray:
    """Best rank-one ``Y``, found by an angle scan with bounded refinement.

    At the optimum both bounds are active, so ``Y`` is a projector. Along the
    projector angle the objective can have two local minima, hence the scan.
    """
    h = math.pi / n
    f = [_projector_objective(k * h, lower, root) for k in range(n)]
    best_f, best_phi = math.inf, 0.0
    for k in range(n):
        if f[k] <= f[k - 1] and f[k] <= f[(k + 1) % n]:
            res = minimize_scalar(_projector_objective, bounds=((k - 1) * h, (k + 1) * h), args=(lower, root),
                                  method="bounded", options={"xatol": 1e-10})
            if res.fun < best_f:
                best_f, best_phi = res.fun, res.x
    c, s = math.cos(best_phi), math.sin(best_phi)
    return np.array([c * c, c * s, s * s])


_NM = {"xatol": 1e-12, "fatol": 1e-17, "maxfev": 4000}
START_SPREAD = 0.1


def _decoupled_search(lower, root, z0):
    simplex = z0 + 0.3 * np.vstack([np.zeros(3), np.eye(3)])
    res = minimize(_decoupled_objective, z0, args=(lower, root), method="Nelder-Mead",
                   options={**_NM, "initial_simplex": simplex})
    # a fresh simplex unsticks a collapsed one
    res = minimize(_decoupled_objective, res.x, args=(lower, root), method="Nelder-Mead", options=_NM)
    return _position_block(res.x, lower, root)[:3]


@dataclass
class GeofResult:
    """Optimum of a Gaussian EoF search with per-start diagnostics."""

    value: float
    pure_cov: np.ndarray
    feasibility: float
    start_values: list = field(default_factory=list)
    method: str = "standard"


def geof_result(state: GaussianState, starts: int = 4, tol: float = 1e-8,
                seed: int = 0, method: str = "standard") -> GeofResult:
    """Gaussian EoF with full diagnostics; see :func:`geof`."""
    _two_mode(state)
    if method == "euler":
        return _geof_euler(state, starts, tol, seed)
    if method != "standard":
        raise DomainError(f"unknown geof method {method!r}")
    a, b, c1, c2, L = standard_form(state)
    lower, root = _decoupled_bounds(a, b, c1, c2)
    # the full search is quasi-convex, so starts near the best projector must
    # all settle on the same optimum
    z = _best_projector(lower, root)
    rng = np.random.default_rng(seed)
    inits = [z] + [z + rng.normal(0.0, START_SPREAD, 3) for _ in range(max(starts, 1) - 1)]
    found = []
    for z0 in inits:
        p = _decoupled_search(lower, root, z0)
        found.append((_char_from_rho2(p[1] * p[1] / (p[0] * p[2])), p))
    values = [f[0] for f in found]
    spread = max(values) - min(values)
    if spread > 10 * tol:
        raise ConvergenceError(
            f"multistart optima disagree by {spread:.3e} (> 10 x tol = {10 * tol:.1e})", values)
    best = min(found, key=lambda f: f[0])
    # a squared correlation below eps^2 is rounding noise on a separable state
    value = 0.0 if best[0] < np.finfo(float).eps ** 2 else best[0]
    Linv = np.linalg.inv(L)
    gp = Linv @ _decoupled_pure_cov(*best[1]) @ Linv.T
    gp = 0.5 * (gp + gp.T)
    return GeofResult(value, gp, float(np.linalg.eigvalsh(state.cov - gp)[0]), values, "standard")


def geof(state: GaussianState, starts: int = 4, tol: float = 1e-8, seed: int = 0,
         method: str = "standard") -> float:
    """Gaussian entanglement of formation as a characteristic value ``q0^2``.

    Parameters
    ----------
    state : GaussianState
        Two-mode state.
    starts : int
        Number of Nelder-Mead polishes: one from the best rank-one ``Y``,
        the rest from seeded perturbations of it.
    tol : float
        All starts must agree within ``10 * tol``.
    seed : int
        Seed for the random starting points.
    method : {"standard", "euler"}
        Standard-form search (default) or the direct seven-parameter search.

    Raises
    ------
    ConvergenceError
        When the multistart optima disagree.
    """
    return geof_result(state, starts, tol, seed, method).value


# -- direct seven-parameter search -----------------------------------------


def euler_pure_cov(params) -> np.ndarray:
    """Pure covariance ``(L1 + L2) TMSS(q0) (L1 + L2)^T``.

    ``params = (q0, t1_out, r1, t1_in, t2_out, r2, t2_in)`` with each
    ``L_k = R(t_out) squeeze_r(r) R(t_in)``.
    """
    q0, a1, r1, b1, a2, r2, b2 = params
    L = np.zeros((4, 4))
    L[:2, :2] = euler_compose(a1, r1, b1)
    L[2:, 2:] = euler_compose(a2, r2, b2)
    return L @ tmss_cov(q0) @ L.T


def _inner_tau(Gp, weight):
    """Smallest ``tau = tanh 2s`` with ``TMSS(s) <= Gp``, or a continuous penalty.

    ``g(tau) = lambda_min(sqrt(1 - tau^2) Gp - (I + tau Q)/2)`` is concave, so a
    Newton iteration from ``tau = 0`` approaches the first root from the left.
    """

    def g_dg(t):
        c = math.sqrt(1 - t * t)
        w, v = np.linalg.eigh(c * Gp - 0.5 * (_I4 + t * _Q))
        vv = v[:, 0]
        return w[0], vv @ ((-t / c) * Gp - 0.5 * _Q) @ vv

    t = 0.0
    g, dg = g_dg(t)
    if g >= 0:
        return 0.0
    lo = hi = None
    for _ in range(100):
        if dg <= 0:
            lo, hi = 0.0, t
            break
        tn = t - g / dg
        if tn >= 1:
            lo, hi = t, 1 - 1e-13
            break
        gn, dgn = g_dg(tn)
        if gn >= -1e-15 or tn - t < 1e-15:
            return tn
        t, g, dg = tn, gn, dgn
    else:
        return t
    for _ in range(60):
        m = 0.5 * (lo + hi)
        if g_dg(m)[1] > 0:
            lo = m
        else:
            hi = m
        if hi - lo < 1e-14:
            break
    m = 0.5 * (lo + hi)
    return m + weight * max(0.0, -g_dg(m)[0])


def _euler_objective(p, cov, weight):
    # p = (t1_out, r1, t1_in, t2_out, r2); t2_in is redundant on a TMSS
    L = np.zeros((4, 4))
    L[:2, :2] = euler_compose(p[0], p[1], p[2])
    L[2:, 2:] = euler_compose(p[3], p[4], 0.0)
    Li = np.linalg.inv(L)
    return _inner_tau(Li @ cov @ Li.T, weight)


def _char_from_tau(t: float) -> float:
    if t <= 0:
        return 0.0
    q = (1 - math.sqrt(1 - t * t)) / t
    return q * q


def _geof_euler(state, starts, tol, seed, x0s=None):
    rng = np.random.default_rng(seed)
    cov = state.cov
    found = []
    inits = list(x0s or [])
    inits += [np.zeros(5)] + [rng.uniform(-1, 1, 5) for _ in range(max(starts, 2) - 1)]
    for x0 in inits:
        res = None
        for weight in (10.0, 100.0):
            res = minimize(_euler_objective, x0 if res is None else res.x, args=(cov, weight),
                           method="Nelder-Mead",
                           options={"xatol": 1e-11, "fatol": 1e-15, "maxfev": 6000, "adaptive": True})
        t = min(res.fun, 1 - 1e-15)
        q0 = (1 - math.sqrt(1 - t * t)) / t if t > 0 else 0.0
        p = res.x
        gp = euler_pure_cov((q0, p[0], p[1], p[2], p[3], p[4], 0.0))
        margin = float(np.linalg.eigvalsh(cov - gp)[0])
        found.append((_char_from_tau(t), margin, gp))
    values = sorted(f[0] for f in found)
    feasible = sorted((f for f in found if f[1] >= -FEASIBILITY_TOL * 100), key=lambda f: f[0])
    if not feasible:
        raise ConvergenceError("no start of the seven-parameter search reached feasibility", values)
    best = feasible[0]
    return GeofResult(best[0], best[2], best[1], values, "euler")


def geof_euler_from(state: GaussianState, pure_cov: np.ndarray | None = None,
                    starts: int = 4, seed: int = 0) -> GeofResult:
    """Seven-parameter search, optionally warm-started at the local frame of ``pure_cov``."""
    x0s = []
    if pure_cov is not None:
        a, b, c1, c2, L = standard_form(GaussianState(pure_cov))
        Li = np.linalg.inv(L)
        # read Euler angles off the inverse local frame of the pure state
        t1o, r1, t1i = euler_decompose(Li[:2, :2])
        t2o, r2, t2i = euler_decompose(Li[2:, 2:])
        # move the inner mode-2 rotation onto mode 1 (R(-t) + R(t) fixes a TMSS)
        x0s.append(np.array([t1o, r1, t1i + t2i, t2o, r2]))
    return _geof_euler(state, starts, 1e-8, seed, x0s)


# -- reports ---------------------------------------------------------------


@dataclass
class EntanglementReport:
    char_value: float | None
    log_neg: float
    geof_value: float | None
    method: str

    def __post_init__(self):
        if self.char_value is not None and not 0 <= self.char_value <= 1:
            raise DomainError("char_value outside [0, 1]")


def entanglement_report(state: GaussianState, with_geof: bool = True, **geof_opts) -> EntanglementReport:
    _two_mode(state)
    char = char_ent_pure(state) if state.is_pure(PURITY_TOL) else None
    g = None
    if with_geof:
        try:
            g = geof(state, **geof_opts)
        except ConvergenceError:
            g = None
    return EntanglementReport(char, log_negativity(state), g, "geof" if with_geof else "logneg")


def measure_value(state: GaussianState, measure: str = "geof", **geof_opts) -> float:
    """Evaluate one of ``"geof"``, ``"logneg"`` or ``"char"`` (pure states only)."""
    if measure == "geof":
        return geof(state, **geof_opts)
    if measure == "logneg":
        return log_negativity(state)
    if measure == "char":
        return char_ent_pure(state)
    raise DomainError(f"unknown entanglement measure {measure!r}")


def theorem2_ratio(channel, V, q: float, qb: float, measure: str = "geof",
                   tol: float = 1e-6, **geof_opts):
    """Output/input entanglement ratios for two TMSS probes.

    Returns ``(lhs, rhs, holds)`` with ``lhs = E[out(q)] / E[out(qb)]``,
    ``rhs = q^2 / qb^2`` and ``holds = lhs <= rhs + tol``.
    """
    if not 0 < abs(q) <= abs(qb) <= 1 - EPS_Q:
        raise DomainError(f"need 0 < |q| <= |qb| <= 1 - {EPS_Q}, got q={q}, qb={qb}")
    if measure not in ("geof", "char"):
        raise DomainError("theorem2_ratio uses the geof or char measure")
    e_q = measure_value(channel_output(channel, V, q), measure, **geof_opts)
    e_b = measure_value(channel_output(channel, V, qb), measure, **geof_opts)
    if e_b <= 0:
        raise DegenerateChannelError(f"output entanglement at qb={qb} is zero")
    lhs = e_q / e_b
    rhs = (q * q) / (qb * qb)
    return lhs, rhs, bool(lhs <= rhs + tol)
