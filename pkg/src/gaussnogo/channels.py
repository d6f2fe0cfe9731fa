r"""Single-mode Gaussian channels :math:`\gamma \to M \gamma M^T + N`."""

from dataclasses import dataclass

import numpy as np

from .symplectic import n_modes, phase_shifter, squeezer

#: Absolute slack on the complete-positivity inequality.
CP_ATOL = 1e-9
#: Below this (relative to the largest singular value) ``M`` counts as singular.
SINGULAR_RTOL = 1e-12

_Z = np.diag([1.0, -1.0])


class InvalidChannelError(ValueError):
    """Raised when an operation receives a channel that fails validation."""


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """Single-mode Gaussian channel given by its amplification and noise matrices.

    Construction only checks shapes and finiteness; complete positivity is
    reported by :func:`validate` and enforced by :func:`check_channel`.
    """

    M: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        for name in ("M", "N"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {value.shape}")
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{name} has non-finite entries")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def det_M(self):
        m = self.M
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def det_N(self):
        n = self.N
        return float(n[0, 0] * n[1, 1] - n[0, 1] * n[1, 0])

    def __repr__(self):
        return f"GaussianChannel(M={self.M.tolist()}, N={self.N.tolist()})"


@dataclass(frozen=True)
class ValidityReport:
    symmetric_N: bool
    psd_N: bool
    min_eig_N: float
    cp_margin: float
    cp_tolerance: float

    @property
    def completely_positive(self):
        return self.cp_margin >= -self.cp_tolerance

    @property
    def valid(self):
        return self.symmetric_N and self.psd_N and self.completely_positive

    def failures(self):
        out = []
        if not self.symmetric_N:
            out.append("N is not symmetric")
        if not self.psd_N:
            out.append(f"N is not positive semidefinite (min eigenvalue {self.min_eig_N:.3e})")
        if not self.completely_positive:
            out.append(f"det N < (det M - 1)^2 by {-self.cp_margin:.3e}")
        return out


def cp_margin(channel):
    """``det N - (det M - 1)^2``; nonnegative for completely positive channels."""
    return channel.det_N - (channel.det_M - 1.0) ** 2


def validate(channel):
    """Checks symmetry and positivity of ``N`` and the complete-positivity inequality.

    The CP slack is :data:`CP_ATOL` scaled by the roundoff magnitude of the
    2x2 determinants involved, so that channels assembled from large
    intermediate products are not rejected for cancellation noise.
    """
    m, n = channel.M, channel.N
    symmetric = bool(np.allclose(n, n.T, rtol=0, atol=1e-12 * max(1.0, np.abs(n).max())))
    # smallest eigenvalue of the symmetric part, closed form for 2x2
    a, b, d = n[0, 0], 0.5 * (n[0, 1] + n[1, 0]), n[1, 1]
    min_eig = float(0.5 * (a + d) - np.hypot(0.5 * (a - d), b))
    scale = max(1.0, np.sum(n**2), (1.0 + np.sum(m**2)) ** 2)
    psd = min_eig >= -1e-12 * max(1.0, np.abs(n).max())
    return ValidityReport(symmetric, psd, min_eig, cp_margin(channel), CP_ATOL * scale)


def check_channel(channel):
    report = validate(channel)
    if not report.valid:
        raise InvalidChannelError("invalid Gaussian channel: " + "; ".join(report.failures()))
    return channel


def apply(channel, gamma, mode):
    """Acts with ``channel`` on one mode of a multimode covariance matrix.

    Args:
        channel (GaussianChannel): a valid channel
        gamma (array): ``2n x 2n`` covariance matrix
        mode (int): 0-based index of the target mode

    Returns:
        array: ``X gamma X^T + Y`` with ``X`` (``Y``) equal to ``M`` (``N``) on
        the target block and identity (zero) elsewhere
    """
    check_channel(channel)
    gamma = np.asarray(gamma, dtype=float)
    n = n_modes(gamma)
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for {n} modes")
    sl = slice(2 * mode, 2 * mode + 2)
    out = gamma.copy()
    out[sl, :] = channel.M @ out[sl, :]
    out[:, sl] = out[:, sl] @ channel.M.T
    out[sl, sl] += channel.N
    # the two off-diagonal strips come from different products
    return 0.5 * (out + out.T)


def compose(second, first):
    """Channel applying ``first`` then ``second``."""
    check_channel(second)
    check_channel(first)
    return GaussianChannel(
        second.M @ first.M, second.M @ first.N @ second.M.T + second.N
    )


def identity_channel():
    return GaussianChannel(np.eye(2), np.zeros((2, 2)))


def attenuation(eta):
    """Pure-loss channel of amplitude transmission ``0 < eta < 1``: ``M = eta I``, ``N = (1 - eta^2) I``."""
    if not 0 < eta < 1:
        raise ValueError(f"attenuation requires 0 < eta < 1, got {eta}")
    return GaussianChannel(eta * np.eye(2), abs(1 - eta**2) * np.eye(2))


def amplification(eta):
    """Quantum-limited amplifier of gain ``eta > 1``: ``M = eta I``, ``N = (eta^2 - 1) I``."""
    if not eta > 1:
        raise ValueError(f"amplification requires eta > 1, got {eta}")
    return GaussianChannel(eta * np.eye(2), abs(1 - eta**2) * np.eye(2))


def classical_noise(noise):
    """Additive classical noise channel ``M = I`` with positive definite ``N``.

    A scalar ``noise`` means the isotropic matrix ``noise * I``.
    """
    noise = np.asarray(noise, dtype=float)
    if noise.ndim == 0:
        noise = float(noise) * np.eye(2)
    if noise.shape != (2, 2) or not np.allclose(noise, noise.T, rtol=0, atol=1e-12):
        raise ValueError("classical noise matrix must be a symmetric 2x2 matrix")
    if np.linalg.eigvalsh(noise).min() <= 0:
        raise ValueError("classical noise matrix must be positive definite")
    return GaussianChannel(np.eye(2), noise)


def phase_conjugation(eta):
    """Approximate phase conjugation ``M = eta diag(1, -1)`` with the least CP noise ``(1 + eta^2) I``."""
    if not eta > 0:
        raise ValueError(f"phase conjugation requires eta > 0, got {eta}")
    return GaussianChannel(eta * _Z, (1 + eta**2) * np.eye(2))


def measure_prepare():
    """Optimal measure-and-prepare reference point, ``M = I``, ``N = 2 I`` (``det N = 4``)."""
    return classical_noise(2.0)


def is_entanglement_breaking(channel):
    """``det M <= 0``, or ``det N >= (1 + det M)^2``."""
    check_channel(channel)
    return breaking_determinants(channel.det_M, channel.det_N)


def breaking_determinants(det_m, det_n):
    if det_m <= 0:
        return True
    return det_n >= (1.0 + det_m) ** 2 * (1 - 1e-12)


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    """``M' = S V M U`` and ``N' = S V N V^T S^T`` with ``M'`` in normal form."""

    channel_prime: GaussianChannel
    U: np.ndarray
    V: np.ndarray
    S: np.ndarray
    eta: float


def _rotation_from(orth):
    """Rotation angle of an orthogonal 2x2 matrix with determinant +1."""
    return float(np.arctan2(orth[0, 1], orth[0, 0]))


def canonical_form(channel):
    """Reduces ``M`` to ``eta I``, ``eta diag(1, -1)`` or ``diag(eta, 0)`` by local operations.

    Phase shifters ``U`` (input) and ``V`` (output) diagonalise ``M`` through
    its singular value decomposition; a squeezer ``S`` then equalises the two
    singular values. For singular ``M`` the squeezer is the identity and
    ``eta`` is the surviving singular value.
    """
    check_channel(channel)
    w, sig, vt = np.linalg.svd(channel.M)
    # force both factors into SO(2); a leftover reflection shows up as a sign on sig[1]
    if np.linalg.det(w) < 0:
        w = w @ _Z
        sig = sig * np.array([1.0, -1.0])
    if np.linalg.det(vt) < 0:
        vt = _Z @ vt
        sig = sig * np.array([1.0, -1.0])
    v_out = phase_shifter(_rotation_from(w.T))
    u_in = phase_shifter(_rotation_from(vt.T))
    s1, s2 = sig
    if abs(s2) <= SINGULAR_RTOL * max(s1, 1e-300):
        sq = np.eye(2)
        eta = float(s1)
    else:
        sq = squeezer(0.5 * np.log(s1 / abs(s2)))
        eta = float(np.sqrt(s1 * abs(s2)))
    m_prime = sq @ v_out @ channel.M @ u_in
    n_prime = sq @ v_out @ channel.N @ v_out.T @ sq.T
    n_prime = 0.5 * (n_prime + n_prime.T)
    return CanonicalDecomposition(GaussianChannel(m_prime, n_prime), u_in, v_out, sq, eta)


#: Channel families addressable by a single scalar parameter.
FAMILIES = {
    "attenuation": attenuation,
    "amplification": amplification,
    "classical-noise": classical_noise,
    "phase-conjugation": phase_conjugation,
}


def family_channel(family, value):
    """Member of a named family; ``classical-noise`` is parameterised by ``det N`` here."""
    if family == "classical-noise":
        if not value > 0:
            raise ValueError(f"classical-noise needs det N > 0, got {value}")
        return classical_noise(np.sqrt(value))
    try:
        ctor = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown channel family {family!r}; choose from {sorted(FAMILIES)}") from None
    return ctor(value)
