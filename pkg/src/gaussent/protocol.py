"""Channel probing and optimisation of local pre-processing.

A one-side channel is probed with two two-mode squeezed inputs ``TMSS(q)`` and
``TMSS(qb)``. The ratio of output entanglements can never exceed ``q^2 / qb^2``.
When it reaches that bound the chosen pre-processing ``V`` is optimal for every
input with ``|q'| >= |q|``. The same question can be answered directly by
scanning ``V = squeeze_u(u)`` over a grid, which is what
:func:`optimize_preprocessing` does.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channels import FilterOp, GaussianChannel, apply_oneside_channel, channel_output
from .core import GaussianState, SymplecticOp, embed, euler_compose, euler_decompose, rotation_matrix, squeeze_matrix, tmss_state
from .entanglement import EPS_Q, log_negativity, measure_value
from .errors import ConvergenceError, DegenerateChannelError, DomainError

MEASURES = ("logneg", "geof")
TIE_TOL = 1e-9
# changes below the geof solver precision are not a trend
TREND_NOISE = 1e-9


@dataclass(frozen=True)
class ProbeReport:
    q: float
    qb: float
    lhs_ratio: float
    rhs_ratio: float
    gap: float
    verdict: str
    tolerance: float
    measure: str
    log_neg: tuple = ()

    def __post_init__(self):
        if self.verdict == "violation" and not self.gap < -self.tolerance:
            raise DomainError("a violation verdict requires gap < -tolerance")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("q", "qb", "lhs_ratio", "rhs_ratio", "gap", "verdict", "tolerance", "measure")}
        d["log_neg"] = list(self.log_neg)
        return d


@dataclass
class SweepResult:
    """Entanglement against pre-squeezing ``u2``; missing values are ``None``."""

    rows: list
    argmax_u2: dict
    params: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def column(self, measure: str) -> np.ndarray:
        k = {"logneg": 1, "geof": 2}[measure]
        return np.array([np.nan if r[k] is None else r[k] for r in self.rows])

    @property
    def u2(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows])


def _check_channel(ch):
    if not isinstance(ch, (GaussianChannel, FilterOp)):
        raise DomainError("channel must be a GaussianChannel or FilterOp")


def probe_channel(ch, V: SymplecticOp, q: float, qb: float, tol: float = 1e-4,
                  measure: str = "geof", **geof_opts) -> ProbeReport:
    """Two-state test of the output/input entanglement ratio.

    Verdict is ``"equality"`` when ``|gap| <= tol``, ``"strict-inequality"``
    when ``gap > tol`` and ``"violation"`` otherwise, with
    ``gap = q^2/qb^2 - E(q)/E(qb)``.
    """
    _check_channel(ch)
    if not 0 < q < qb <= 1 - EPS_Q:
        raise DomainError(f"need 0 < q < qb <= 1 - {EPS_Q}, got q={q}, qb={qb}")
    out_q = channel_output(ch, V, q)
    out_b = channel_output(ch, V, qb)
    e_b = measure_value(out_b, measure, **geof_opts)
    if e_b <= 0:
        raise DegenerateChannelError(f"no output entanglement at qb={qb}")
    e_q = measure_value(out_q, measure, **geof_opts)
    lhs = e_q / e_b
    rhs = q * q / (qb * qb)
    gap = rhs - lhs
    if abs(gap) <= tol:
        verdict = "equality"
    elif gap > tol:
        verdict = "strict-inequality"
    else:
        verdict = "violation"
    return ProbeReport(q, qb, lhs, rhs, gap, verdict, tol, measure,
                       (log_negativity(out_q), log_negativity(out_b)))


def u_grid(u_min: float = 1.0, u_max: float = 9.0, step: float = 0.05) -> np.ndarray:
    """Inclusive grid, rounded so that nominal points such as 3.00 are exact."""
    if step <= 0 or u_min <= 0 or u_max < u_min:
        raise DomainError(f"invalid grid [{u_min}, {u_max}] step {step}")
    n = int(math.floor((u_max - u_min) / step + 1e-9)) + 1
    return np.round(u_min + step * np.arange(n), 12)


def _evaluate(ch, V, q_prime, measure, geof_opts):
    return measure_value(channel_output(ch, V, q_prime), measure, **geof_opts)


def sweep_entanglement(ch, q_prime: float, grid=None, measures=MEASURES, **geof_opts) -> SweepResult:
    """Evaluate the output entanglement for ``V = squeeze_u(u2)`` at each grid point.

    A geof convergence failure leaves ``None`` in that cell and is listed in
    ``failures``; other points are unaffected.
    """
    _check_channel(ch)
    if not 0 < abs(q_prime) < 1 - EPS_Q:
        raise DomainError(f"q' must lie in (0, 1 - {EPS_Q})")
    grid = u_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("empty grid")
    for m in measures:
        if m not in MEASURES:
            raise DomainError(f"unknown measure {m!r}")
    rows, failures = [], []
    for u in np.sort(grid):
        V = SymplecticOp(squeeze_matrix(u), "squeeze_u", {"u": float(u)})
        state = channel_output(ch, V, q_prime)
        ln = log_negativity(state) if "logneg" in measures else None
        g = None
        if "geof" in measures:
            try:
                g = measure_value(state, "geof", **geof_opts)
            except ConvergenceError as exc:
                failures.append((float(u), str(exc)))
                warnings.warn(f"geof did not converge at u2={u}: {exc}", RuntimeWarning)
        rows.append((float(u), ln, g))
    argmax = {}
    for k, m in ((1, "logneg"), (2, "geof")):
        if m in measures:
            argmax[m] = _argmax_u([(r[0], r[k]) for r in rows])
    params = {"q_prime": q_prime}
    return SweepResult(rows, argmax, params, failures)


def _argmax_u(pairs):
    """Largest value; ties within ``TIE_TOL`` go to the least squeezing ``|ln u|``."""
    pairs = [(u, v) for u, v in pairs if v is not None]
    if not pairs:
        return None
    best = max(v for _, v in pairs)
    ties = [u for u, v in pairs if v >= best - TIE_TOL]
    return min(ties, key=lambda u: (abs(math.log(u)), u))


def optimize_preprocessing(ch, q_prime: float, u_min: float = 1.0, u_max: float = 9.0,
                           step: float = 0.05, measure: str = "geof", search: str = "grid",
                           **geof_opts):
    """Best pre-processing unitary on mode 2 before the channel.

    Parameters
    ----------
    search : {"grid", "euler"}
        ``"grid"`` scans ``squeeze_u(u)`` only; ``"euler"`` then refines over
        the full ``R(t_out) squeeze_r(r) R(t_in)`` family from the grid optimum.

    Returns
    -------
    V_best : SymplecticOp
    E_best : float
    trace : SweepResult
    """
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}")
    trace = sweep_entanglement(ch, q_prime, u_grid(u_min, u_max, step), (measure,), **geof_opts)
    col = trace.column(measure)
    if np.all(np.isnan(col)):
        raise ConvergenceError("entanglement could not be evaluated at any grid point")
    if np.nanmax(col) <= 0:
        raise DegenerateChannelError("output entanglement is zero across the whole grid")
    u_best = trace.argmax_u2[measure]
    E_best = float(col[np.where(trace.u2 == u_best)[0][0]])
    V_best = SymplecticOp(squeeze_matrix(u_best), "squeeze_u", {"u": u_best})
    if search == "euler":
        V_best, E_best = _refine_euler(ch, q_prime, u_best, E_best, measure, geof_opts)
    elif search != "grid":
        raise DomainError(f"unknown search {search!r}")
    return V_best, E_best, trace


def _refine_euler(ch, q_prime, u0, E0, measure, geof_opts):
    def neg(p):
        try:
            return -_evaluate(ch, SymplecticOp(euler_compose(*p)), q_prime, measure, geof_opts)
        except ConvergenceError:
            return 0.0

    x0 = np.array([0.0, 0.5 * math.log(u0), 0.0])
    res = minimize(neg, x0, method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-10, "initial_simplex": x0 + 0.05 * np.vstack(
                       [np.zeros(3), np.eye(3)])})
    if -res.fun > E0 + TIE_TOL:
        t_out, r, t_in = res.x
        return SymplecticOp(euler_compose(t_out, r, t_in), "composite",
                            {"theta_out": t_out, "r": r, "theta_in": t_in}), float(-res.fun)
    return SymplecticOp(squeeze_matrix(u0), "squeeze_u", {"u": u0}), E0


# -- limits of strongly entangled inputs ---------------------------------


def fact1_equivalent_V(U: SymplecticOp, V: SymplecticOp) -> SymplecticOp:
    """Mode-1 operator reproducing ``U (x) V`` on a maximally entangled input.

    With ``V = R(a) squeeze_r(r) R(b)`` the result is ``U R(b) squeeze_r(-r) R(a)``.
    """
    for op in (U, V):
        if op.n_modes != 1:
            raise DomainError("expected single-mode operators")
    a, r, b = euler_decompose(V)
    M = U.matrix @ rotation_matrix(b) @ squeeze_matrix(math.exp(-2 * r)) @ rotation_matrix(a)
    return SymplecticOp(M, "composite")


def _local_output(ch, U: SymplecticOp, V: SymplecticOp, q: float):
    if isinstance(ch, FilterOp):
        raise DomainError("finite-q limit checks use Gaussian channels")
    S = embed(U.matrix, (0,), 2) @ embed(V.matrix, (1,), 2)
    st = tmss_state(q)
    return apply_oneside_channel(GaussianState(S @ st.cov @ S.T), ch, 1)


@dataclass
class TrendReport:
    qs: list
    differences: list
    passed: bool
    final_bound: float


def _trend(qs, diffs, final_bound):
    nonincreasing = all(d2 <= d1 + TREND_NOISE for d1, d2 in zip(diffs, diffs[1:]))
    return TrendReport(list(qs), diffs, bool(nonincreasing and diffs[-1] < final_bound), final_bound)


def _check_qs(qs):
    qs = [float(q) for q in qs]
    if not qs or any(not 0 < q <= 1 - EPS_Q for q in qs) or any(b <= a for a, b in zip(qs, qs[1:])):
        raise DomainError("q sequence must be increasing inside (0, 1 - eps]")
    return qs


def lemma2_invariance_check(ch: GaussianChannel, qs, U: SymplecticOp, V: SymplecticOp,
                            measure: str = "geof", final_bound: float = 1e-2,
                            **geof_opts) -> TrendReport:
    """``|E[ch((U (x) V) TMSS(q))] - E[ch(TMSS(q))]|`` along ``q -> 1``."""
    qs = _check_qs(qs)
    I1 = SymplecticOp(np.eye(2))
    diffs = []
    for q in qs:
        e_uv = measure_value(_local_output(ch, U, V, q), measure, **geof_opts)
        e0 = measure_value(_local_output(ch, I1, I1, q), measure, **geof_opts)
        diffs.append(abs(e_uv - e0))
    return _trend(qs, diffs, final_bound)


def mode_swap_check(ch: GaussianChannel, qs, U: SymplecticOp, V: SymplecticOp,
                measure: str = "geof", final_bound: float = 2e-3, **geof_opts) -> TrendReport:
    """Compare ``U (x) V`` with ``fact1_equivalent_V(U, V) (x) I`` along ``q -> 1``."""
    qs = _check_qs(qs)
    W = fact1_equivalent_V(U, V)
    I1 = SymplecticOp(np.eye(2))
    diffs = []
    for q in qs:
        e_uv = measure_value(_local_output(ch, U, V, q), measure, **geof_opts)
        e_w = measure_value(_local_output(ch, W, I1, q), measure, **geof_opts)
        diffs.append(abs(e_uv - e_w))
    return _trend(qs, diffs, final_bound)
