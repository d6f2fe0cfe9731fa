r"""Two-mode entanglement and the entanglement degradation of single-mode channels.

All logarithms are base 2. The smallest symplectic eigenvalue of the partial
transpose is computed from the block invariants

.. math::

    \tilde\Delta = \det A + \det C - 2\det B, \qquad
    2\nu_-^2 = \tilde\Delta - \sqrt{\tilde\Delta^2 - 4\det\gamma},

using the cancellation-free root :math:`\nu_-^2 = 2\det\gamma / (\tilde\Delta + \sqrt{\cdot})`
and a Schur-complement determinant. Both stay accurate for highly squeezed
inputs where generic eigensolvers lose several digits. Near a double root the
square root amplifies roundoff to ``sqrt(eps)``; there the symmetric
eigensolver route of :func:`symplectic_eigenvalues` is used instead.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import channels as ch
from .symplectic import (
    R_CAP,
    NumericalError,
    UnphysicalStateError,
    is_physical,
    is_symmetric,
    n_modes,
    symplectic_eigenvalues,
    tmsv_covariance,
)

LOG_BASE = 2
INF = math.inf

_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])
#: Below this value of ``disc / delta^2`` the roots count as nearly degenerate.
NEAR_DOUBLE_ROOT = 1e-4


@dataclass(frozen=True, eq=False)
class TwoModeBlocks:
    """``gamma = [[A, B], [B^T, C]]`` for a two-mode covariance matrix."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @classmethod
    def from_matrix(cls, gamma):
        gamma = _two_mode(gamma)
        return cls(gamma[:2, :2], gamma[:2, 2:], gamma[2:, 2:])

    def assemble(self):
        return np.block([[self.A, self.B], [self.B.T, self.C]])

    @property
    def delta_tilde(self):
        """``det A + det C - 2 det B``: the seralian of the partial transpose."""
        return _det2(self.A) + _det2(self.C) - 2.0 * _det2(self.B)


@dataclass(frozen=True)
class DegradationResult:
    D: float
    nu_minus_squared: float
    log_negativity: float
    entanglement_breaking: bool

    @property
    def capacity_bound(self):
        return capacity_bound_from_D(self.D)


def _det2(m):
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _two_mode(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if n_modes(gamma) != 2:
        raise ValueError(f"expected a two-mode (4x4) matrix, got shape {gamma.shape}")
    return gamma


def two_mode_det(gamma):
    r"""Determinant via ``det A * det(C - B^T A^{-1} B)``.

    For Choi-type states the Schur complement is ``O(1)`` while the blocks are
    ``O(cosh 2r)``; forming it first avoids the catastrophic cancellation of a
    generic 4x4 determinant.
    """
    blocks = TwoModeBlocks.from_matrix(gamma)
    det_a = _det2(blocks.A)
    if det_a <= 0:
        return float(np.linalg.det(gamma))
    schur = blocks.C - blocks.B.T @ np.linalg.solve(blocks.A, blocks.B)
    return det_a * _det2(schur)


def partial_transpose(gamma):
    """Momentum flip on the second mode, ``P gamma P`` with ``P = diag(1, 1, 1, -1)``."""
    gamma = _two_mode(gamma)
    return _FLIP @ gamma @ _FLIP


def nu_minus_squared(gamma):
    """Square of the smallest symplectic eigenvalue of the partial transpose."""
    gamma = _two_mode(gamma)
    if not is_symmetric(gamma):
        raise ValueError("covariance matrix is not symmetric")
    delta = TwoModeBlocks.from_matrix(gamma).delta_tilde
    return _smaller_root(delta, two_mode_det(gamma), fallback=lambda: gamma)


def _eigen_route(gamma):
    return float(symplectic_eigenvalues(partial_transpose(gamma))[0] ** 2)


def _smaller_root(delta, det, fallback=None):
    """Smaller root ``nu^2`` of ``nu^4 - delta nu^2 + det = 0``, cancellation free.

    ``fallback`` returns the covariance matrix whose partial transpose is
    diagonalised when the roots are nearly degenerate.
    """
    disc = delta * delta - 4.0 * det
    if disc < -1e-9 * max(1.0, delta * delta):
        raise NumericalError(f"negative discriminant {disc:.3e} in nu_minus")
    if fallback is not None and disc < NEAR_DOUBLE_ROOT * delta * delta:
        return _eigen_route(fallback())
    root = math.sqrt(max(disc, 0.0))
    if delta + root <= 0:
        raise NumericalError("partially transposed matrix has no positive invariant")
    return max(2.0 * det / (delta + root), 0.0)


def nu_minus(gamma):
    """Smallest symplectic eigenvalue of the partially transposed two-mode state."""
    return math.sqrt(nu_minus_squared(gamma))


def log_negativity(gamma):
    """``max(0, -log2 nu_-)``; ``inf`` when ``nu_- = 0``."""
    nu2 = nu_minus_squared(gamma)
    if nu2 == 0:
        return INF
    return max(0.0, -0.5 * math.log2(nu2))


def capacity_bound_from_D(d):
    if d == 0:
        return INF
    return max(0.0, -0.5 * math.log2(d))


def entanglement_degradation(channel):
    r"""Closed-form entanglement degradation ``min(det N / (1 + det M)^2, 1)``.

    Channels with ``det M <= 0`` are entanglement breaking and get ``D = 1``;
    the ``det M = -1`` pole never reaches the division.
    """
    ch.check_channel(channel)
    det_m, det_n = channel.det_M, max(channel.det_N, 0.0)
    breaking = ch.breaking_determinants(det_m, det_n)
    denom = (1.0 + det_m) ** 2
    if denom <= 1e-300:
        nu2 = INF
    else:
        nu2 = det_n / denom
    if det_m <= 0:
        d = 1.0
    else:
        d = min(nu2, 1.0)
    log_neg = INF if d == 0 else max(0.0, -0.5 * math.log2(d))
    return DegradationResult(d, nu2, log_neg, breaking)


def choi_covariance(channel, r, r_cap=R_CAP):
    """``(1 x T)`` applied to the two-mode squeezed vacuum of squeezing ``r``."""
    return ch.apply(channel, tmsv_covariance(r, r_cap=r_cap), 1)


def _mixed_det(x, y):
    """``det(x + y) - det x - det y`` for 2x2 matrices."""
    return float(x[0, 0] * y[1, 1] + x[1, 1] * y[0, 0] - x[0, 1] * y[1, 0] - x[1, 0] * y[0, 1])


def choi_invariants(channel, r, r_cap=R_CAP):
    r"""``(delta_tilde, det gamma)`` of the finite-``r`` Choi state, from ``(M, N, r)``.

    With ``c = cosh 2r`` and ``X = M M^T``, using ``c^2 - sinh^2 2r = 1``::

        delta_tilde = c^2 (1 + det M)^2 - 2 det M + c mix(X, N) + det N
        det gamma   = (det M)^2 + c mix(X, N) + c^2 det N

    where ``mix(X, N) = det(X + N) - det X - det N``. A float64 Choi matrix at
    ``r = 8`` stores ``cosh 2r`` with an absolute error near ``1e-9`` and so
    fixes ``nu_-^2`` only to ``~1e-8``; these expressions keep full precision.
    """
    ch.check_channel(channel)
    if not np.isfinite(r) or abs(r) > r_cap:
        from .symplectic import SqueezingRangeError

        raise SqueezingRangeError(f"|r| = {abs(r)} exceeds the squeezing cap {r_cap}")
    c = math.cosh(2 * r)
    det_m, det_n = channel.det_M, channel.det_N
    mix = _mixed_det(channel.M @ channel.M.T, channel.N)
    delta = c * c * (1.0 + det_m) ** 2 - 2.0 * det_m + c * mix + det_n
    det = det_m * det_m + c * mix + c * c * det_n
    return delta, det


def finite_r_degradation(channel, r, r_cap=R_CAP):
    """``nu_-^2`` of the channel's Choi state at finite squeezing ``r`` (unclipped).

    Evaluated from :func:`choi_invariants`; ``nu_minus_squared(choi_covariance(...))``
    is the equivalent matrix route, accurate to ``~eps cosh(2r) |M|^2``. Nearly
    degenerate roots (small ``r``) are taken from the matrix route.
    """
    delta, det = choi_invariants(channel, r, r_cap=r_cap)
    return _smaller_root(delta, det, fallback=lambda: choi_covariance(channel, r, r_cap=r_cap))


def degradation_from_choi(chi):
    """``min(1, nu_-^2)`` for an arbitrary physical two-mode state."""
    chi = _two_mode(chi)
    if not is_physical(chi):
        raise UnphysicalStateError("Choi covariance matrix is not physical")
    return min(1.0, nu_minus_squared(chi))


def capacity_upper_bound(channel):
    """Upper bound ``-1/2 log2 D`` on the quantum capacity; ``inf`` when ``D = 0``."""
    return entanglement_degradation(channel).capacity_bound
