r"""Truncated Fock-space simulator, used as an independent oracle.

States are complex arrays indexed by occupation numbers ``(n1, n2, ...)`` with
``0 <= n_k <= N``. Gaussian unitaries are applied as matrix exponentials of
their quadratic generators on a padded space (``N + pad`` levels), after which
the mass that landed above ``N`` is reported as the truncation tail and the
state is cut back and renormalised:

==============  =============================================  ====================
kind            unitary                                         phase-space matrix
==============  =============================================  ====================
``squeeze_r``   :math:`e^{r(a^{\dagger 2} - a^2)}`              ``diag(e^{2r}, e^{-2r})``
``rotation``    :math:`e^{-i\theta a^\dagger a}`                ``[[c, s], [-s, c]]``
``beamsplitter``:math:`e^{\theta(a_j a_k^\dagger - a_j^\dagger a_k)}`  ``[[c, -s], [s, c]]`` on x and p pairs
``displacement``:math:`e^{\beta a^\dagger - \beta^* a}`          mean ``sqrt2 (Re b, Im b)``
==============  =============================================  ====================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .channels import FilterOp, filtered_coeffs
from .core import GaussianState
from .errors import DomainError, NumericalConsistencyError, TruncationError

DEFAULT_CUTOFF = 40
DEFAULT_BOUND = 1e-8
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class FockVector:
    """Amplitudes on ``(N+1)^n_modes`` levels plus the mass lost to truncation so far."""

    amplitudes: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim == 0 or len(set(amp.shape)) != 1:
            raise DomainError(f"amplitudes need the same cutoff on every mode, got {amp.shape}")
        if self.tail < 0:
            raise DomainError("tail mass cannot be negative")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def n_modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "FockVector":
        return FockVector(self.amplitudes / self.norm, self.tail)

    def report(self, bound: float = DEFAULT_BOUND) -> "TruncationReport":
        return TruncationReport(self.cutoff, self.tail, self.tail < bound)


@dataclass(frozen=True)
class TruncationReport:
    cutoff: int
    tail_mass: float
    converged: bool

    def __post_init__(self):
        if self.tail_mass < 0:
            raise DomainError("tail mass cannot be negative")


def basis_state(levels, N: int) -> FockVector:
    amp = np.zeros((N + 1,) * len(levels), dtype=complex)
    amp[tuple(levels)] = 1.0
    return FockVector(amp)


def vacuum_fock(n_modes: int, N: int) -> FockVector:
    return basis_state((0,) * n_modes, N)


def tmss_fock(q: float, N: int = DEFAULT_CUTOFF) -> FockVector:
    """``sqrt(1-q^2) q^n`` on ``|n, n>``, left unnormalised so the cut is visible in ``norm``."""
    if not abs(q) < 1:
        raise DomainError(f"|q| must be < 1, got {q}")
    n = np.arange(N + 1)
    amp = np.zeros((N + 1, N + 1), dtype=complex)
    amp[n, n] = math.sqrt(1 - q * q) * q ** n
    return FockVector(amp, float(q * q) ** (N + 1))


# -- ladder operators --------------------------------------------------------


def _lower(M: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, M + 1)), 1).astype(complex)


def _apply_mode(op: np.ndarray, amp: np.ndarray, mode: int) -> np.ndarray:
    out = np.tensordot(op, amp, axes=([1], [mode]))
    return np.moveaxis(out, 0, mode)


def _pad(amp: np.ndarray, pad: int) -> np.ndarray:
    return np.pad(amp, [(0, pad)] * amp.ndim)


def _single_mode_generator(kind: str, params, M: int) -> np.ndarray:
    a = _lower(M)
    ad = a.conj().T
    if kind == "squeeze_r":
        return params["r"] * (ad @ ad - a @ a)
    if kind == "rotation":
        return -1j * params["theta"] * (ad @ a)
    if kind == "displacement":
        beta = complex(params["beta"])
        return beta * ad - np.conj(beta) * a
    raise DomainError(f"unknown single-mode generator {kind!r}")


def _beamsplitter_generator(theta: float, M: int):
    a = sparse.csr_matrix(_lower(M))
    ad = a.conj().T
    eye = sparse.identity(M + 1, format="csr")
    aj, ak = sparse.kron(a, eye), sparse.kron(eye, a)
    ajd, akd = sparse.kron(ad, eye), sparse.kron(eye, ad)
    return (theta * (aj @ akd - ajd @ ak)).tocsr()


def apply_generator_exp(state: FockVector, kind: str, params: dict, modes, pad: int | None = None,
                        bound: float = DEFAULT_BOUND) -> FockVector:
    """Apply ``exp(G)`` for a quadratic (or linear) generator on the given modes.

    Parameters
    ----------
    kind : {"squeeze_r", "rotation", "beamsplitter", "displacement"}
    params : dict
        ``{"r": ...}``, ``{"theta": ...}`` or ``{"beta": ...}``.
    modes : tuple of int
        One mode, or two for the beamsplitter.
    pad : int, optional
        Extra levels used during the exponential (default ``N``).
    bound : float
        Largest acceptable mass above the cutoff.

    Raises
    ------
    TruncationError
        If more than ``bound`` of the probability ends up above level ``N``.
    """
    modes = tuple(int(m) for m in np.atleast_1d(modes))
    N, n = state.cutoff, state.n_modes
    for m in modes:
        if not 0 <= m < n:
            raise IndexError(f"mode {m} out of range for {n} modes")
    if len(set(modes)) != len(modes):
        raise DomainError("modes must be distinct")
    pad = N if pad is None else int(pad)
    M = N + pad
    amp = _pad(state.amplitudes, pad)
    before = float(np.sum(np.abs(amp) ** 2))
    if kind == "beamsplitter":
        if len(modes) != 2:
            raise DomainError("beamsplitter needs two modes")
        G = _beamsplitter_generator(params["theta"], M)
        moved = np.moveaxis(amp, modes, (0, 1))
        shape = moved.shape
        flat = moved.reshape((M + 1) ** 2, -1)
        out = expm_multiply(G, flat).reshape(shape)
        amp = np.moveaxis(out, (0, 1), modes)
    else:
        if len(modes) != 1:
            raise DomainError(f"{kind} acts on a single mode")
        amp = _apply_mode(expm(_single_mode_generator(kind, params, M)), amp, modes[0])
    kept = amp[(slice(0, N + 1),) * n]
    inside = float(np.sum(np.abs(kept) ** 2))
    tail = max(0.0, (before - inside) / before)
    if tail > bound:
        raise TruncationError(f"{tail:.2e} of the probability left the cutoff N={N}; increase N")
    return FockVector(kept / math.sqrt(inside), state.tail + tail)


def filter_fock(state: FockVector, q: float, mode: int) -> FockVector:
    """Multiply amplitudes by ``q^n`` on the target mode and renormalise."""
    FilterOp(q)
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range")
    w = q ** np.arange(state.cutoff + 1)
    shape = [1] * state.n_modes
    shape[mode] = -1
    amp = state.amplitudes * w.reshape(shape)
    return FockVector(amp / np.linalg.norm(amp), state.tail)


# -- moments -----------------------------------------------------------------


def cm_from_fock(state: FockVector, imag_tol: float = IMAG_TOL) -> GaussianState:
    """Mean and symmetrised quadrature covariance of a pure truncated state.

    Raises
    ------
    NumericalConsistencyError
        If first moments or symmetrised second moments have imaginary parts
        above ``imag_tol``.
    """
    psi = state.normalize().amplitudes
    n = psi.ndim
    # one extra level so that a^dagger acts exactly on the top level
    psi = _pad(psi, 1)
    a = _lower(psi.shape[0] - 1)
    ad = a.conj().T
    R = []
    for k in range(n):
        apsi = _apply_mode(a, psi, k)
        adpsi = _apply_mode(ad, psi, k)
        R.append((apsi + adpsi) / math.sqrt(2))
        R.append((apsi - adpsi) / (1j * math.sqrt(2)))
    flat = psi.ravel()
    Rf = np.array([r.ravel() for r in R])
    mean_c = Rf @ flat.conj()
    mean_c = np.conj(mean_c)
    second = Rf.conj() @ Rf.T
    sym = 0.5 * (second + second.T)
    resid = max(np.max(np.abs(mean_c.imag)), np.max(np.abs(sym.imag)))
    if resid > imag_tol:
        raise NumericalConsistencyError(f"imaginary residue {resid:.2e} in Fock moments")
    mean = mean_c.real
    cov = sym.real - np.outer(mean, mean)
    return GaussianState(0.5 * (cov + cov.T), mean)


def cm_from_mixture(states, weights) -> GaussianState:
    """Covariance of a probabilistic mixture of pure truncated states."""
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    cms = [cm_from_fock(s) for s in states]
    mean = sum(w * c.mean for w, c in zip(weights, cms))
    second = sum(w * (c.cov + np.outer(c.mean, c.mean)) for w, c in zip(weights, cms))
    cov = second - np.outer(mean, mean)
    return GaussianState(0.5 * (cov + cov.T), mean)


# -- normal-ordered forms ----------------------------------------------------


def quadexp_fock(f1: complex, f2: complex, f3: complex, N: int = DEFAULT_CUTOFF) -> FockVector:
    """``exp(f1 a1+^2 + f2 a2+^2 + f3 a1+ a2+)|00>`` summed as a power series.

    Every term raises the photon number, so amplitudes with both occupations
    at most ``N`` are exact; the series stops once the total exceeds ``2N``.
    """
    ad = _lower(N).conj().T
    ad2 = ad @ ad
    term = np.zeros((N + 1, N + 1), dtype=complex)
    term[0, 0] = 1.0
    total = term.copy()
    for k in range(1, N + 1):
        nxt = (f1 * _apply_mode(ad2, term, 0) + f2 * _apply_mode(ad2, term, 1)
               + f3 * _apply_mode(ad, _apply_mode(ad, term, 0), 1))
        term = nxt / k
        total += term
    return FockVector(total)


def squeezed_vacuum_normal_ordered(r: float, N: int = DEFAULT_CUTOFF) -> FockVector:
    """``(cosh 2r)^{-1/2} exp(tanh(2r) a+^2 / 2)|0>``; unit norm up to truncation."""
    t = math.tanh(2 * r)
    n = np.arange(0, N + 1, 2)
    amp = np.zeros(N + 1, dtype=complex)
    # (t/2)^k sqrt((2k)!) / k!
    k = n // 2
    logs = k * math.log(abs(t) / 2) + 0.5 * np.array([math.lgamma(2 * j + 1) for j in k]) \
        - np.array([math.lgamma(j + 1) for j in k]) if t != 0 else None
    if t == 0:
        amp[0] = 1.0
    else:
        amp[n] = np.exp(logs) * np.sign(t) ** k
    return FockVector(amp / math.sqrt(math.cosh(2 * r)))


def _fidelity(u: FockVector, v: FockVector) -> float:
    a, b = u.normalize().amplitudes, v.normalize().amplitudes
    return float(abs(np.vdot(a, b)) ** 2)


def squeezed_filtered_fock(q0: float, r: float, q1: float, N: int = DEFAULT_CUTOFF,
                           bound: float = DEFAULT_BOUND) -> FockVector:
    """``I (x) T(q1) . I (x) S(r) |chi(q0)>`` built by brute force.

    Mass squeezed above level ``N`` would have been damped by at least
    ``q1^(2(N+1))``; that bound on the post-filter tail is what is checked.
    """
    FilterOp(q1)
    st = apply_generator_exp(tmss_fock(q0, N).normalize(), "squeeze_r", {"r": r}, (1,), bound=1.0)
    w = q1 ** np.arange(N + 1)
    kept = float(np.sum(np.abs(st.amplitudes * w) ** 2)) * (1 - st.tail)
    tail = st.tail * q1 ** (2 * (N + 1)) / (kept + st.tail * q1 ** (2 * (N + 1)))
    if tail > bound:
        raise TruncationError(f"{tail:.2e} of the filtered state lies above N={N}; increase N")
    out = filter_fock(st, q1, 1)
    return FockVector(out.amplitudes, tail)


def check_tt0(q0: float, r: float, N: int = 30, bound: float = 1e-2) -> float:
    """Overlap between ``I (x) S(r)|chi(q0)>`` and its normal-ordered closed form."""
    if not abs(q0) < 1:
        raise DomainError(f"|q0| must be < 1, got {q0}")
    brute = apply_generator_exp(tmss_fock(q0, N).normalize(), "squeeze_r", {"r": r}, (1,), bound=bound)
    c = filtered_coeffs(q0, r, 1.0)
    return _fidelity(brute, quadexp_fock(c.f1, c.f2, c.f3, N))


def check_normal_ordered_squeeze(r: float, N: int = 30, bound: float = 1e-2) -> float:
    """Overlap between ``S(r)|0>`` and ``(cosh 2r)^{-1/2} exp(tanh(2r) a+^2/2)|0>``."""
    brute = apply_generator_exp(vacuum_fock(1, N), "squeeze_r", {"r": r}, (0,), bound=bound)
    return _fidelity(brute, squeezed_vacuum_normal_ordered(r, N))


# -- beamsplitter channel with a squeezed thermal ancilla --------------------


def beamsplitter_channel_fock(q: float, theta: float, u3: float, b3: float, N: int = 25,
                              u2: float = 1.0, weight_tail: float = 1e-6,
                              bound: float = 1e-5) -> GaussianState:
    """Two-mode output of the beamsplitter channel, built in a three-mode Fock space.

    The thermal ancilla is the mixture ``sum_k p_k |k><k|`` with
    ``p_k = nbar^k / (nbar + 1)^(k+1)`` and ``nbar = b3 - 1/2``, cut once the
    remaining weight is below ``weight_tail``. Each ``|k>`` is squeezed, mixed
    with the signal mode, and the resulting covariances are averaged.
    """
    if N > 25:
        raise DomainError("three-mode oracle is limited to N <= 25 per mode")
    if b3 < 0.5 or u3 <= 0 or u2 <= 0:
        raise DomainError("need b3 >= 1/2, u3 > 0, u2 > 0")
    nbar = b3 - 0.5
    ratio = nbar / (nbar + 1)
    kmax = 0 if nbar == 0 else int(math.ceil(math.log(weight_tail) / math.log(ratio)))
    if kmax > N:
        raise TruncationError(f"thermal ancilla needs {kmax} levels; raise N")
    ks = np.arange(kmax + 1)
    weights = (1 - ratio) * ratio ** ks
    base = tmss_fock(q, N).normalize()
    if u2 != 1.0:
        base = apply_generator_exp(base, "squeeze_r", {"r": 0.5 * math.log(u2)}, (1,), bound=bound)
    states, lost = [], 0.0
    for k, w in zip(ks, weights):
        anc = basis_state((int(k),), N)
        if u3 != 1.0:
            anc = apply_generator_exp(anc, "squeeze_r", {"r": 0.5 * math.log(u3)}, (0,), bound=1.0)
        joint = FockVector(np.multiply.outer(base.amplitudes, anc.amplitudes), anc.tail)
        joint = apply_generator_exp(joint, "beamsplitter", {"theta": theta}, (1, 2), bound=1.0)
        lost += w * joint.tail
        states.append(joint)
    # rarely populated ancilla levels may spill more; only the weighted loss matters
    if lost > bound:
        raise TruncationError(f"weighted truncation loss {lost:.2e} exceeds {bound:.0e}; increase N")
    full = cm_from_mixture(states, weights)
    keep = np.arange(4)
    return GaussianState(full.cov[np.ix_(keep, keep)], full.mean[keep])
