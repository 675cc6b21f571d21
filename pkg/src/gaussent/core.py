r"""Covariance-matrix representation of Gaussian states.

Conventions used throughout the package:

* :math:`\hbar = 1`, quadratures :math:`x = (a + a^\dagger)/\sqrt{2}`,
  :math:`p = (a - a^\dagger)/(i\sqrt{2})`, so the vacuum covariance is
  :math:`\tfrac12 I`.
* Interleaved ordering ``(x1, p1, x2, p2, ...)``.
* A symplectic matrix ``S`` acts as ``cov -> S cov S.T`` and ``mean -> S mean``.
* ``squeeze_r(r)`` is the unitary :math:`e^{r(a^{\dagger 2} - a^2)}`, whose
  phase-space matrix is ``diag(e^{2r}, e^{-2r})``; ``squeeze_u(u)`` is
  ``diag(u, 1/u)``, hence ``squeeze_r(r) == squeeze_u(exp(2 r))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, NotSymplecticError

SYM_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10

OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
PAULI_Z = np.diag([1.0, -1.0])


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form, the direct sum of ``[[0, 1], [-1, 0]]`` over modes."""
    return np.kron(np.eye(n_modes), OMEGA1)


def uncertainty_tol(cov) -> float:
    """Slack for the ``nu >= 1/2`` check; grows with conditioning for strongly squeezed states."""
    return max(UNCERTAINTY_TOL, 1e-15 * np.linalg.cond(cov))


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted ascending.

    Computed as the positive eigenvalues of the Hermitian matrix
    ``i sqrt(cov) Omega sqrt(cov)``, which has spectrum ``+-nu_k``.

    Raises
    ------
    DomainError
        If ``cov`` is not symmetric positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    n2 = cov.shape[0]
    if cov.shape != (n2, n2) or n2 % 2:
        raise DomainError(f"covariance must be 2n x 2n, got {cov.shape}")
    sym = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(sym)
    if w[0] <= 0:
        raise DomainError("covariance matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.T
    herm = 1j * root @ omega(n2 // 2) @ root
    nu = np.linalg.eigvalsh(herm)
    return np.sort(nu[n2 // 2:])


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an ``n_modes`` Gaussian state.

    Construction validates symmetry, positive definiteness and the
    uncertainty relation (all symplectic eigenvalues >= 1/2).
    """

    cov: np.ndarray
    mean: np.ndarray = None
    n_modes: int = field(init=False)

    def __post_init__(self):
        cov = _frozen(self.cov)
        n2 = cov.shape[0]
        if cov.ndim != 2 or cov.shape != (n2, n2) or n2 == 0 or n2 % 2:
            raise DomainError(f"covariance must be 2n x 2n, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > SYM_TOL * max(1.0, np.max(np.abs(cov))):
            raise DomainError("covariance matrix is not symmetric")
        mean = np.zeros(n2) if self.mean is None else self.mean
        mean = _frozen(mean)
        if mean.shape != (n2,):
            raise DomainError(f"mean must have length {n2}, got {mean.shape}")
        nu = symplectic_eigenvalues(cov)
        if nu[0] < 0.5 - uncertainty_tol(cov):
            raise DomainError(
                f"uncertainty relation violated: min symplectic eigenvalue {nu[0]:.3e} < 1/2"
            )
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "n_modes", n2 // 2)

    @property
    def A(self) -> np.ndarray:
        """Mode-1 block of a two-mode state."""
        return self.cov[:2, :2]

    @property
    def B(self) -> np.ndarray:
        """Mode-2 block of a two-mode state."""
        return self.cov[2:4, 2:4]

    @property
    def C(self) -> np.ndarray:
        """Inter-mode correlation block of a two-mode state."""
        return self.cov[:2, 2:4]

    def det_A(self) -> float:
        return float(np.linalg.det(self.A))

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_pure(self, tol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues() - 0.5) < tol))


@dataclass(frozen=True)
class SymplecticOp:
    """Linear phase-space map with a record of how it was generated."""

    matrix: np.ndarray
    kind: str = "composite"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        m = _frozen(self.matrix)
        n2 = m.shape[0]
        if m.ndim != 2 or m.shape != (n2, n2) or n2 % 2:
            raise DomainError(f"symplectic matrix must be 2n x 2n, got {m.shape}")
        if not is_symplectic(m):
            raise NotSymplecticError(f"{self.kind} matrix violates S Omega S^T = Omega")
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticOp") -> "SymplecticOp":
        return SymplecticOp(self.matrix @ other.matrix, "composite")

    def inverse(self) -> "SymplecticOp":
        om = omega(self.n_modes)
        return SymplecticOp(-om @ self.matrix.T @ om, "composite")


@dataclass(frozen=True)
class CharacteristicEntanglement:
    """The squared two-mode squeezing amplitude ``|q|^2`` of a pure state."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"characteristic entanglement must lie in [0, 1], got {self.value}")


def is_symplectic(matrix, tol: float = SYMPLECTIC_TOL) -> bool:
    m = np.asarray(matrix, dtype=float)
    om = omega(m.shape[0] // 2)
    return bool(np.max(np.abs(m @ om @ m.T - om)) <= tol * max(1.0, np.max(np.abs(m)) ** 2))


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeeze_matrix(u: float) -> np.ndarray:
    return np.diag([u, 1.0 / u])


def _check_mode(mode: int, n_modes: int) -> None:
    if not 0 <= mode < n_modes:
        raise IndexError(f"mode {mode} out of range for {n_modes} modes")


def embed(block, modes: Sequence[int], n_modes: int) -> np.ndarray:
    """Place a ``2k x 2k`` block acting on ``modes`` into a ``2n`` identity."""
    block = np.asarray(block, dtype=float)
    idx = []
    for m in modes:
        _check_mode(m, n_modes)
        idx += [2 * m, 2 * m + 1]
    if len(set(modes)) != len(modes):
        raise IndexError(f"modes must be distinct, got {modes}")
    out = np.eye(2 * n_modes)
    out[np.ix_(idx, idx)] = block
    return out


def symplectic_generator(kind: str, params, modes=(0,), n_modes: int = 1) -> SymplecticOp:
    """Build one of the elementary symplectic maps.

    Parameters
    ----------
    kind : {"rotation", "squeeze_r", "squeeze_u", "beamsplitter"}
    params : float or dict
        ``theta`` for rotation/beamsplitter, ``r`` or ``u`` for the squeezers.
        A bare number is taken as the single parameter.
    modes : sequence of int
        Target mode (one entry) or mode pair for the beamsplitter.
    n_modes : int
        Total number of modes of the returned operator.
    """
    if isinstance(modes, (int, np.integer)):
        modes = (int(modes),)
    modes = tuple(modes)
    key = {"rotation": "theta", "beamsplitter": "theta", "squeeze_r": "r", "squeeze_u": "u"}
    if kind not in key:
        raise DomainError(f"unknown generator kind {kind!r}")
    val = float(params[key[kind]] if isinstance(params, dict) else params)

    if kind == "beamsplitter":
        if len(modes) != 2:
            raise IndexError("beamsplitter needs exactly two modes")
        c, s = np.cos(val), np.sin(val)
        block = np.zeros((4, 4))
        # x-pair and p-pair each rotated by [[c, -s], [s, c]]
        block[np.ix_([0, 2], [0, 2])] = [[c, -s], [s, c]]
        block[np.ix_([1, 3], [1, 3])] = [[c, -s], [s, c]]
    else:
        if len(modes) != 1:
            raise IndexError(f"{kind} acts on a single mode")
        if kind == "rotation":
            block = rotation_matrix(val)
        elif kind == "squeeze_r":
            block = squeeze_matrix(np.exp(2.0 * val))
        else:
            if val <= 0:
                raise DomainError(f"squeeze_u needs u > 0, got {val}")
            block = squeeze_matrix(val)
    return SymplecticOp(embed(block, modes, n_modes), kind, {key[kind]: val})


def rotation(theta: float, mode: int = 0, n_modes: int = 1) -> SymplecticOp:
    return symplectic_generator("rotation", theta, (mode,), n_modes)


def squeeze_r(r: float, mode: int = 0, n_modes: int = 1) -> SymplecticOp:
    return symplectic_generator("squeeze_r", r, (mode,), n_modes)


def squeeze_u(u: float, mode: int = 0, n_modes: int = 1) -> SymplecticOp:
    return symplectic_generator("squeeze_u", u, (mode,), n_modes)


def beamsplitter(theta: float, modes=(0, 1), n_modes: int = 2) -> SymplecticOp:
    return symplectic_generator("beamsplitter", theta, modes, n_modes)


def identity_op(n_modes: int = 1) -> SymplecticOp:
    return SymplecticOp(np.eye(2 * n_modes), "rotation", {"theta": 0.0})


def embed_op(op: SymplecticOp, mode: int, n_modes: int) -> SymplecticOp:
    """Lift a single-mode operator onto ``mode`` of an ``n_modes`` system."""
    if op.n_modes != 1:
        raise DomainError("embed_op expects a single-mode operator")
    return SymplecticOp(embed(op.matrix, (mode,), n_modes), op.kind, dict(op.params))


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    """Transform ``state`` by ``op`` (``cov -> S cov S.T``, ``mean -> S mean``)."""
    S = op.matrix if isinstance(op, SymplecticOp) else np.asarray(op, dtype=float)
    if S.shape != state.cov.shape:
        raise DomainError(
            f"operator acts on {S.shape[0] // 2} modes, state has {state.n_modes}"
        )
    return GaussianState(S @ state.cov @ S.T, S @ state.mean)


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(0.5 * np.eye(2 * n_modes))


def thermal_state(b: float) -> GaussianState:
    """Single-mode thermal state with covariance ``diag(b, b)``, ``b >= 1/2``."""
    if b < 0.5:
        raise DomainError(f"thermal covariance {b} is below the vacuum value 1/2")
    return GaussianState(b * np.eye(2))


def tmss_cov(q: float) -> np.ndarray:
    """Covariance of the two-mode squeezed state ``sqrt(1-q^2) exp(q a1+ a2+)|00>``."""
    q = float(q)
    if not abs(q) < 1:
        raise DomainError(f"two-mode squeezed state needs |q| < 1, got {q}")
    d = 1.0 - q * q
    a = 0.5 * (1.0 + q * q) / d
    c = q / d
    return np.block([[a * np.eye(2), c * PAULI_Z], [c * PAULI_Z, a * np.eye(2)]])


def tmss_state(q: float) -> GaussianState:
    """Two-mode squeezed state of amplitude ``q`` (``|q| < 1``)."""
    return GaussianState(tmss_cov(q))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    n2a, n2b = a.cov.shape[0], b.cov.shape[0]
    cov = np.zeros((n2a + n2b, n2a + n2b))
    cov[:n2a, :n2a] = a.cov
    cov[n2a:, n2a:] = b.cov
    return GaussianState(cov, np.concatenate([a.mean, b.mean]))


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Reduced state on the modes in ``keep`` (in the given order)."""
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(keep)
    if not keep:
        raise DomainError("partial_trace needs at least one mode to keep")
    for m in keep:
        _check_mode(m, state.n_modes)
    idx = [i for m in keep for i in (2 * m, 2 * m + 1)]
    return GaussianState(state.cov[np.ix_(idx, idx)], state.mean[idx])


def _wrap(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    a = (angle + np.pi) % (2 * np.pi) - np.pi
    return np.pi if a == -np.pi else float(a)


def euler_decompose(S) -> tuple[float, float, float]:
    """Factor a single-mode symplectic as ``R(theta_out) squeeze_r(r) R(theta_in)``.

    Returns ``(theta_out, r, theta_in)`` with ``r >= 0``. The sign ambiguity
    ``(theta_out + pi, theta_in + pi)`` is fixed by ``theta_out`` in
    ``(-pi/2, pi/2]``; a pure rotation returns ``theta_out = 0``.
    """
    S = S.matrix if isinstance(S, SymplecticOp) else np.asarray(S, dtype=float)
    if S.shape != (2, 2):
        raise DomainError(f"euler_decompose expects a 2x2 matrix, got {S.shape}")
    if not is_symplectic(S):
        raise NotSymplecticError("input is not symplectic (det != 1)")
    U, sig, Wt = np.linalg.svd(S)
    if np.linalg.det(U) < 0:
        U = U @ PAULI_Z
        Wt = PAULI_Z @ Wt
    r = 0.5 * np.log(sig[0])
    if r < 1e-13:
        # pure rotation: S = R(theta) exactly
        return 0.0, 0.0, _wrap(np.arctan2(S[0, 1], S[0, 0]))
    # R(t) = [[cos t, sin t], [-sin t, cos t]]
    t_out = np.arctan2(U[0, 1], U[0, 0])
    t_in = np.arctan2(Wt[0, 1], Wt[0, 0])
    if not -np.pi / 2 < t_out <= np.pi / 2:
        t_out += np.pi
        t_in += np.pi
    return _wrap(t_out), float(r), _wrap(t_in)


def euler_compose(theta_out: float, r: float, theta_in: float) -> np.ndarray:
    return rotation_matrix(theta_out) @ squeeze_matrix(np.exp(2 * r)) @ rotation_matrix(theta_in)
