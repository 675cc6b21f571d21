r"""Filter operator, squeezed-then-filtered pure states, one-side channels.

The pure state :math:`e^{f_1 a_1^{\dagger 2} + f_2 a_2^{\dagger 2} + f_3 a_1^\dagger a_2^\dagger}|00\rangle`
arises from filtering :math:`I\otimes T(q_1)` (``T(q) = q^{a^\dagger a}``) a two-mode
squeezed state whose second mode went through ``squeeze_r(r)``.

Its covariance entries ``b1, b2, c1, c2, d1, d2`` are first produced in the
characteristic-function frame (variables ``(x, y)`` of ``alpha = (x + i y)/sqrt2``),
where the ``x`` slot carries the momentum and the ``y`` slot the position
quadrature. :func:`cm_from_quadexp` maps them into the package's ``(x, p)``
frame; determinants and symplectic invariants are the same in both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    OMEGA1,
    GaussianState,
    SymplecticOp,
    embed,
    euler_decompose,
    rotation_matrix,
    tmss_state,
)
from .errors import DomainError

CP_TOL = 1e-10


@dataclass(frozen=True)
class QuadExpState:
    """Coefficients of the unnormalised ``exp(f1 a1+^2 + f2 a2+^2 + f3 a1+ a2+)|00>``."""

    f1: float
    f2: float
    f3: float

    def __post_init__(self):
        dp, dm = self.denominators()
        if not (dp > 0 and dm > 0):
            raise DomainError(
                f"coefficients ({self.f1}, {self.f2}, {self.f3}) give a non-normalisable state"
            )

    def denominators(self) -> tuple[float, float]:
        f1, f2, f3 = self.f1, self.f2, self.f3
        plus = 1 + 2 * f1 + 2 * f2 + 4 * f1 * f2 - f3 * f3
        minus = 1 - 2 * f1 - 2 * f2 + 4 * f1 * f2 - f3 * f3
        return plus, minus


@dataclass(frozen=True)
class FilterOp:
    """The non-unitary filter ``T(q) = q^{a+ a}`` with ``0 < q <= 1``."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise DomainError(f"filter strength must lie in (0, 1], got {self.q}")


@dataclass(frozen=True)
class GaussianChannel:
    """Single-mode deterministic Gaussian map ``cov -> X cov X.T + Y``."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        if X.shape != (2, 2) or Y.shape != (2, 2):
            raise DomainError("X and Y must be 2x2")
        if np.max(np.abs(Y - Y.T)) > 1e-12:
            raise DomainError("noise matrix Y must be symmetric")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if cp_margin(X, Y) < -CP_TOL:
            raise DomainError("(X, Y) is not completely positive")


def cp_margin(X, Y) -> float:
    """Smallest eigenvalue of ``Y + (i/2)(Omega - X Omega X.T)``; CP iff >= 0."""
    X = np.asarray(X, dtype=float)
    M = np.asarray(Y, dtype=float) + 0.5j * (OMEGA1 - X @ OMEGA1 @ X.T)
    return float(np.linalg.eigvalsh(M)[0])


def identity_channel() -> GaussianChannel:
    return GaussianChannel(np.eye(2), np.zeros((2, 2)))


def filtered_coeffs(q0: float, r: float, q1: float) -> QuadExpState:
    """Coefficients of ``I (x) T(q1) . I (x) squeeze_r(r) |chi(q0)>`` (unnormalised)."""
    if not abs(q0) < 1:
        raise DomainError(f"|q0| must be < 1, got {q0}")
    FilterOp(q1)
    t = np.tanh(2 * r)
    return QuadExpState(
        f1=-0.5 * q0 * q0 * t,
        f2=0.5 * q1 * q1 * t,
        f3=q0 * q1 / np.cosh(2 * r),
    )


def quadexp_entries(s: QuadExpState) -> dict:
    """The six covariance entries in the characteristic-function frame."""
    f1, f2, f3 = s.f1, s.f2, s.f3
    dp, dm = s.denominators()
    return {
        "b1": -0.5 + (1 + 2 * f2) / dp,
        "b2": -0.5 + (1 - 2 * f2) / dm,
        "d1": -0.5 + (1 + 2 * f1) / dp,
        "d2": -0.5 + (1 - 2 * f1) / dm,
        "c1": -f3 / dp,
        "c2": f3 / dm,
    }


def cm_from_quadexp(s: QuadExpState) -> GaussianState:
    """Covariance of the normalised quad-exp state in ``(x1, p1, x2, p2)`` order.

    In the characteristic-function frame ``A = diag(b1, b2)``, ``B = diag(d1, d2)``,
    ``C = diag(c1, c2)`` with the first slot being momentum, so the position
    entries are ``b2, d2, c2``.
    """
    e = quadexp_entries(s)
    cov = np.zeros((4, 4))
    cov[0, 0], cov[1, 1] = e["b2"], e["b1"]
    cov[2, 2], cov[3, 3] = e["d2"], e["d1"]
    cov[0, 2] = cov[2, 0] = e["c2"]
    cov[1, 3] = cov[3, 1] = e["c1"]
    return GaussianState(cov)


def detA_closed_form(q0: float, q1: float, r: float) -> float:
    """Determinant of the mode-1 block of the squeezed-then-filtered state."""
    if not abs(q0) < 1:
        raise DomainError(f"|q0| must be < 1, got {q0}")
    FilterOp(q1)
    a, b = q0 * q0, q1 * q1
    den = 1 - 4 * a * b + b * b + a * a * (1 + b * b) + (1 - a * a) * (1 - b * b) * np.cosh(4 * r)
    return 0.25 + 2 * a * b / den


def apply_filter_tmss(q0: float, qa: float) -> GaussianState:
    """``T(qa)`` on either mode of ``TMSS(q0)``: again a TMSS, of amplitude ``q0 qa``."""
    FilterOp(qa)
    return tmss_state(q0 * qa)


def beamsplitter_channel(theta: float, u3: float, b3: float) -> GaussianChannel:
    """Mode mixed on a beamsplitter with a squeezed thermal ancilla, ancilla discarded.

    The ancilla is ``squeeze_u(u3)`` applied to a thermal state ``diag(b3, b3)``.
    """
    if u3 <= 0:
        raise DomainError(f"ancilla squeezing u3 must be positive, got {u3}")
    if b3 < 0.5:
        raise DomainError(f"ancilla thermal covariance b3={b3} is unphysical (< 1/2)")
    c, s = np.cos(theta), np.sin(theta)
    X = c * np.eye(2)
    Y = s * s * np.diag([u3 * u3 * b3, b3 / (u3 * u3)])
    return GaussianChannel(X, Y)


def apply_oneside_channel(state: GaussianState, ch: GaussianChannel, mode: int = 1) -> GaussianState:
    if state.n_modes != 2:
        raise DomainError("one-side channels act on two-mode states")
    M = embed(ch.X, (mode,), 2)
    N = np.zeros((4, 4))
    N[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = ch.Y
    return GaussianState(M @ state.cov @ M.T + N, M @ state.mean)


def pre_process(state: GaussianState, V: SymplecticOp, mode: int = 1) -> GaussianState:
    """Apply a single-mode Gaussian unitary ``V`` to ``mode`` before transmission."""
    if V.n_modes != 1:
        raise DomainError("pre-processing expects a single-mode operator")
    S = embed(V.matrix, (mode,), state.n_modes)
    return GaussianState(S @ state.cov @ S.T, S @ state.mean)


def filter_output(q: float, V: SymplecticOp, filt: FilterOp) -> GaussianState:
    """``I (x) T(q1) . I (x) V`` on ``TMSS(q)``, as a normalised covariance.

    With ``V = R(t_out) squeeze_r(r) R(t_in)`` the filter commutes with the
    outer rotation, and the inner rotation on mode 2 of a TMSS equals the same
    rotation on mode 1; the core is the closed-form squeezed-then-filtered state.
    """
    t_out, r, t_in = euler_decompose(V)
    core = cm_from_quadexp(filtered_coeffs(q, r, filt.q))
    L = np.zeros((4, 4))
    L[:2, :2] = rotation_matrix(t_in)
    L[2:, 2:] = rotation_matrix(t_out)
    return GaussianState(L @ core.cov @ L.T)


def channel_output(ch, V: SymplecticOp, q: float) -> GaussianState:
    """Output of ``TMSS(q)`` after ``V`` and then ``ch`` on mode 2.

    ``ch`` is a :class:`GaussianChannel` or a :class:`FilterOp`.
    """
    if isinstance(ch, FilterOp):
        return filter_output(q, V, ch)
    return apply_oneside_channel(pre_process(tmss_state(q), V, 1), ch, 1)
