r"""Finite-squeezing Choi states and covariance-level CV teleportation.

Bell measurement convention: the input mode and the first resource mode are
mixed on a 50/50 beam splitter with output ports
``a = (in - res1)/sqrt(2)`` and ``b = (in + res1)/sqrt(2)``; ``x_a`` and ``p_b``
are homodyned. Bob displaces the second resource mode by
``G sqrt(2) (x_a, p_b)``. With a two-mode squeezed resource this corrects
``x_2 - x_1`` and ``p_2 + p_1``, the two quadratures the resource squeezes.

The feedforward gain ``G`` is read off the resource's cross-correlation,
``G = B^T Z / sinh(2r)`` with ``Z = diag(1, -1)``. For an EPR (identity
channel) resource this is unit gain; for the Choi state of ``(M, N)`` it is
``M``, i.e. Bob's displacement is pushed through the channel
(``T(D(b) rho D(b)^+) = D(M b) T(rho) D(M b)^+``).
"""

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from .symplectic import (
    R_CAP,
    UnphysicalStateError,
    check_covariance,
    embed,
    is_physical,
    n_modes,
    tmsv_covariance,
)

PINV_RCOND = 1e-12

_Z = np.diag([1.0, -1.0])


@dataclass(frozen=True, eq=False)
class ChoiState:
    """Channel acting on mode 1 (0-based) of a two-mode squeezed vacuum."""

    r: float
    gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class TeleportationChannel:
    M_tel: np.ndarray
    N_tel: np.ndarray

    def as_channel(self):
        return ch.GaussianChannel(self.M_tel, 0.5 * (self.N_tel + self.N_tel.T))


def choi_state(channel, r, r_cap=R_CAP):
    return ChoiState(float(r), ch.apply(channel, tmsv_covariance(r, r_cap=r_cap), 1))


def homodyne_condition(gamma, mode, quadrature):
    """Covariance of the remaining modes after homodyning ``quadrature`` on ``mode``.

    Schur-complement update ``gamma_A - gamma_AB (X gamma_B X)^+ gamma_AB^T``
    where ``X`` projects on the measured quadrature.
    """
    gamma = check_covariance(gamma)
    n = n_modes(gamma)
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for {n} modes")
    if n == 1:
        raise ValueError("cannot condition away the only mode")
    q = {"x": 0, "p": 1}.get(quadrature)
    if q is None:
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    meas = np.array([2 * mode, 2 * mode + 1])
    keep = np.array([i for i in range(2 * n) if i not in meas])
    g_a = gamma[np.ix_(keep, keep)]
    g_ab = gamma[np.ix_(keep, meas)]
    proj = np.zeros((2, 2))
    proj[q, q] = 1.0
    inv = np.linalg.pinv(proj @ gamma[np.ix_(meas, meas)] @ proj, rcond=PINV_RCOND)
    out = g_a - g_ab @ inv @ g_ab.T
    return 0.5 * (out + out.T)


def feedforward_gain(resource):
    if resource.r <= 0:
        raise ValueError("teleportation needs a resource squeezed with r > 0")
    cross = resource.gamma[:2, 2:]
    return cross.T @ _Z / np.sinh(2 * resource.r)


def teleportation_map(resource):
    """Linear map from ``(x_in, p_in, x_1, p_1, x_2, p_2)`` to Bob's corrected mode.

    Returns a ``2 x 6`` matrix ``L``; the output covariance for an input
    ``gamma_in`` is ``L (gamma_in + chi) L^T`` (direct sum).
    """
    gain = feedforward_gain(resource)
    bs = np.sqrt(0.5) * np.array([[1.0, -1.0], [1.0, 1.0]])
    # 50/50 beam splitter on (input, resource mode 1), acting identically on x and p
    bell = embed(np.kron(bs, np.eye(2)), [0, 1], 3)
    outcomes = np.stack([bell[0], bell[3]])  # x of port a, p of port b
    lin = np.sqrt(2.0) * gain @ outcomes
    lin[:, 4:] += np.eye(2)
    return lin


def teleport(resource, gamma_in):
    """Covariance of the teleported mode, averaged over Bell outcomes."""
    lin = teleportation_map(resource)
    joint = np.zeros((6, 6))
    joint[:2, :2] = gamma_in
    joint[2:, 2:] = resource.gamma
    out = lin @ joint @ lin.T
    return 0.5 * (out + out.T)


def teleport_channel(resource):
    """Effective ``(M_tel, N_tel)`` of teleportation through ``resource``.

    ``M_tel`` is the input block of the teleportation map; ``N_tel`` is the
    output for a zero input, i.e. the resource noise routed through the
    feedforward. :func:`probe_channel` recovers the same pair from physical
    probe states.
    """
    if not is_physical(resource.gamma):
        raise UnphysicalStateError("teleportation resource is not physical")
    lin = teleportation_map(resource)
    m_tel = lin[:, :2].copy()
    n_tel = teleport(resource, np.zeros((2, 2)))
    return TeleportationChannel(m_tel, n_tel)


def probe_channel(transform, m_hint):
    r"""Recovers ``N`` (and checks ``M``) of a covariance map from probe states.

    Args:
        transform: callable mapping a 2x2 covariance matrix to its image
        m_hint (array): candidate ``M``; its sign convention is kept

    Returns:
        tuple: ``(N, residual)`` where ``residual`` is the largest deviation of
        ``transform(g) - M g M^T - N`` over three linearly independent probes
    """
    probes = [np.eye(2), np.diag([np.e**-1, np.e]), np.array([[2.0, 1.0], [1.0, 1.0]])]
    images = [transform(g) for g in probes]
    noise = images[0] - m_hint @ probes[0] @ m_hint.T
    residual = max(
        np.abs(img - m_hint @ g @ m_hint.T - noise).max() for g, img in zip(probes, images)
    )
    return noise, float(residual)


def lemma1_residual(channel, r, r_cap=R_CAP):
    """Largest elementwise gap between the teleported channel and ``channel`` itself."""
    return lemma1_components(channel, r, r_cap)["residual"]


def lemma1_components(channel, r, r_cap=R_CAP):
    ch.check_channel(channel)
    tel = teleport_channel(choi_state(channel, r, r_cap=r_cap))
    dm = np.abs(tel.M_tel - channel.M).max()
    dn = np.abs(tel.N_tel - channel.N).max()
    return {
        "M_tel": tel.M_tel,
        "N_tel": tel.N_tel,
        "residual_M": float(dm),
        "residual_N": float(dn),
        "residual": float(max(dm, dn)),
    }
