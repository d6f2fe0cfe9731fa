r"""Symplectic linear algebra and Gaussian states at the covariance level.

Conventions used throughout the package:

* quadratures are interleaved, ``(x1, p1, x2, p2, ..., xn, pn)``;
* the vacuum covariance matrix is the identity (so ``hbar = 2``);
* covariance and symplectic matrices are plain ``numpy`` float arrays.
"""

import numpy as np
from scipy.stats import unitary_group

#: Default bound on ``|r|`` for squeezing constructors (``cosh(2r)`` overflow guard).
R_CAP = 20.0

SYMMETRY_ATOL = 1e-12
PHYSICAL_ATOL = 1e-9
SYMPLECTIC_ATOL = 1e-10


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty principle."""


class SqueezingRangeError(ValueError):
    """Raised when a squeezing parameter exceeds the configured cap."""


class NumericalError(ArithmeticError):
    """Raised when a computation leaves its numerically trustworthy regime."""


def symplectic_form(n):
    r"""Returns the ``2n x 2n`` symplectic form :math:`\Omega` in interleaved ordering.

    Args:
        n (int): number of modes

    Returns:
        array: block diagonal matrix with ``n`` copies of ``[[0, 1], [-1, 0]]``
    """
    if int(n) != n or n < 1:
        raise ValueError(f"number of modes must be a positive integer, got {n!r}")
    return np.kron(np.eye(int(n)), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def n_modes(matrix):
    """Number of modes of a ``2n x 2n`` matrix."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even dimension, got shape {matrix.shape}")
    return matrix.shape[0] // 2


def _check_r(r, r_cap):
    if not np.isfinite(r):
        raise SqueezingRangeError(f"squeezing parameter must be finite, got {r!r}")
    if abs(r) > r_cap:
        raise SqueezingRangeError(f"|r| = {abs(r)} exceeds the squeezing cap {r_cap}")


def phase_shifter(theta):
    """Single-mode phase rotation ``[[cos, sin], [-sin, cos]]``."""
    if not np.isfinite(theta):
        raise ValueError(f"phase must be finite, got {theta!r}")
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(r, r_cap=R_CAP):
    """Single-mode squeezer ``diag(exp(-r), exp(r))`` (x squeezed for ``r > 0``)."""
    _check_r(r, r_cap)
    return np.diag([np.exp(-r), np.exp(r)])


def vacuum(n=1):
    """Covariance matrix of ``n`` vacuum modes."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of modes must be a positive integer, got {n!r}")
    return np.eye(2 * int(n))


def thermal(nu, n=1):
    """Covariance matrix ``nu * I`` of ``n`` identical thermal modes."""
    if nu < 1:
        raise UnphysicalStateError(f"thermal symplectic eigenvalue must be >= 1, got {nu}")
    return nu * np.eye(2 * n)


def tmsv_covariance(r, r_cap=R_CAP):
    r"""Two-mode squeezed vacuum covariance matrix.

    Block form ``[[A, C], [C, A]]`` with ``A = cosh(2r) I`` and
    ``C = sinh(2r) diag(1, -1)``.

    Note:
        Beyond ``r ~ 4`` the float64 entries can no longer encode
        ``cosh^2 - sinh^2 = 1`` to better than ``~1e-10``; at ``r = 8`` the
        stored matrix is pure only to ``~1e-2`` in its symplectic eigenvalues.
        Quantities built from block determinants remain accurate.
    """
    _check_r(r, r_cap)
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    a = c * np.eye(2)
    z = s * np.diag([1.0, -1.0])
    return np.block([[a, z], [z, a]])


def is_symmetric(matrix, atol=SYMMETRY_ATOL):
    """Symmetry up to ``atol`` times the largest entry (at least 1)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    scale = max(1.0, float(np.abs(matrix).max(initial=0.0)))
    return bool(np.allclose(matrix, matrix.T, rtol=0, atol=atol * scale))


def physicality_margin(gamma):
    r"""Smallest eigenvalue of the Hermitian matrix :math:`\gamma + i\Omega`."""
    gamma = np.asarray(gamma, dtype=float)
    omega = symplectic_form(n_modes(gamma))
    return float(np.linalg.eigvalsh(gamma + 1j * omega).min())


def physical_tolerance(gamma, atol=PHYSICAL_ATOL):
    """Tolerance for :func:`is_physical`: ``atol`` or the eigensolver roundoff floor."""
    # eigvalsh backward error and float64 storage of cosh(2r) are both ~eps * ||gamma||
    return max(atol, 4 * np.finfo(float).eps * float(np.linalg.norm(gamma, 2)))


def is_physical(gamma, atol=PHYSICAL_ATOL):
    """Whether ``gamma`` is a symmetric matrix satisfying ``gamma + i Omega >= 0``."""
    gamma = np.asarray(gamma, dtype=float)
    if not is_symmetric(gamma) or not np.all(np.isfinite(gamma)):
        return False
    return physicality_margin(gamma) >= -physical_tolerance(gamma, atol)


def check_covariance(gamma):
    """Validates a covariance matrix and returns it as a float array."""
    gamma = np.asarray(gamma, dtype=float)
    n_modes(gamma)
    if not is_symmetric(gamma):
        raise ValueError("covariance matrix is not symmetric")
    if not is_physical(gamma):
        raise UnphysicalStateError(
            f"covariance matrix violates gamma + i Omega >= 0 "
            f"(min eigenvalue {physicality_margin(gamma):.3e})"
        )
    return gamma


def is_symplectic(matrix, atol=SYMPLECTIC_ATOL):
    r"""Whether ``S Omega S^T = Omega`` holds elementwise within ``atol``."""
    matrix = np.asarray(matrix, dtype=float)
    try:
        omega = symplectic_form(n_modes(matrix))
    except ValueError:
        return False
    return bool(np.allclose(matrix @ omega @ matrix.T, omega, rtol=0, atol=atol))


def symplectic_eigenvalues(gamma):
    r"""Symplectic eigenvalues of a symmetric matrix, ascending.

    These are the values :math:`\nu` with :math:`\pm\nu` in the spectrum of
    :math:`i\Omega\gamma`, obtained as square roots of the (doubly degenerate)
    eigenvalues of :math:`-(\Omega\gamma)^2`. For positive definite input the
    problem is mapped to the symmetric matrix :math:`K^T K` with
    :math:`K = L^T \Omega L` and :math:`\gamma = L L^T`, which is similar to
    :math:`-(\Omega\gamma)^2`. The input need not be physical, so partial
    transposes are accepted.

    Args:
        gamma (array): real symmetric ``2n x 2n`` matrix

    Returns:
        array: the ``n`` symplectic eigenvalues in ascending order
    """
    gamma = np.asarray(gamma, dtype=float)
    n = n_modes(gamma)
    if not is_symmetric(gamma):
        raise ValueError("symplectic eigenvalues need a symmetric matrix")
    omega = symplectic_form(n)
    try:
        chol = np.linalg.cholesky(gamma)
        k = chol.T @ omega @ chol
        squares = np.linalg.eigvalsh(k.T @ k)
    except np.linalg.LinAlgError:
        og = omega @ gamma
        squares = np.sort(np.linalg.eigvals(-og @ og).real)
    if squares[0] < -1e-9:
        raise NumericalError(f"negative eigenvalue {squares[0]:.3e} of -(Omega gamma)^2")
    squares = np.clip(squares, 0.0, None)
    # eigenvalues come in equal pairs; average each pair
    return np.sqrt(0.5 * (squares[0::2] + squares[1::2]))


def _mode_index(modes, n):
    modes = sorted(set(int(m) for m in modes))
    if not modes:
        raise ValueError("mode selection is empty")
    if modes[0] < 0 or modes[-1] >= n:
        raise ValueError(f"mode indices {modes} out of range for {n} modes")
    return np.array([q for m in modes for q in (2 * m, 2 * m + 1)])


def tensor(a, b):
    """Direct sum of two covariance (or symplectic) matrices, modes of ``a`` first."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n_modes(a), n_modes(b)
    out = np.zeros((a.shape[0] + b.shape[0],) * 2)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0] :, a.shape[0] :] = b
    return out


def direct_sum(*blocks):
    out = blocks[0]
    for block in blocks[1:]:
        out = tensor(out, block)
    return np.asarray(out, dtype=float)


def partial_trace(gamma, keep):
    """Reduced covariance matrix on the modes listed in ``keep`` (0-based)."""
    gamma = np.asarray(gamma, dtype=float)
    idx = _mode_index(keep, n_modes(gamma))
    return gamma[np.ix_(idx, idx)].copy()


def apply_symplectic(s, gamma):
    """Returns ``S gamma S^T``."""
    s = np.asarray(s, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if s.shape != gamma.shape:
        raise ValueError(f"dimension mismatch: S is {s.shape}, gamma is {gamma.shape}")
    return s @ gamma @ s.T


def embed(local, modes, n):
    """Embeds a ``2k x 2k`` matrix acting on ``modes`` into an ``n``-mode identity."""
    local = np.asarray(local, dtype=float)
    idx = _mode_index(modes, n)
    if local.shape != (idx.size, idx.size):
        raise ValueError(f"local matrix of shape {local.shape} does not fit modes {modes}")
    out = np.eye(2 * n)
    out[np.ix_(idx, idx)] = local
    return out


def xxpp_to_xpxp(n):
    """Permutation matrix ``P`` with ``r_xpxp = P r_xxpp``."""
    perm = np.zeros((2 * n, 2 * n))
    for k in range(n):
        perm[2 * k, k] = 1.0
        perm[2 * k + 1, n + k] = 1.0
    return perm


def passive_symplectic(unitary):
    r"""Real symplectic representation of a passive (photon-number preserving) unitary.

    The mode transformation :math:`a \to U a` with ``U = X + iY`` acts on the
    quadratures in ``xx..pp`` ordering as ``[[X, -Y], [Y, X]]``; the result is
    returned in interleaved ordering.
    """
    unitary = np.asarray(unitary)
    n = unitary.shape[0]
    x, y = unitary.real, unitary.imag
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = x
    out[0::2, 1::2] = -y
    out[1::2, 0::2] = y
    out[1::2, 1::2] = x
    return out


def squeezing_layer(rs):
    """Direct sum of single-mode squeezers ``diag(exp(-r_i), exp(r_i))``."""
    rs = np.asarray(rs, dtype=float)
    diag = np.empty(2 * rs.size)
    diag[0::2] = np.exp(-rs)
    diag[1::2] = np.exp(rs)
    return np.diag(diag)


def random_symplectic(n, r_max, seed=None):
    r"""Random symplectic matrix in Bloch-Messiah form ``K1 Z K2``.

    ``K1`` and ``K2`` are independent Haar-random passive symplectics and ``Z``
    is a layer of single-mode squeezers with ``r_i ~ U[-r_max, r_max]``.

    Args:
        n (int): number of modes
        r_max (float): squeezing bound
        seed: anything accepted by :func:`numpy.random.default_rng`

    Returns:
        array: ``2n x 2n`` symplectic matrix, deterministic given ``seed``
    """
    if int(n) != n or n < 1:
        raise ValueError(f"number of modes must be a positive integer, got {n!r}")
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max!r}")
    n = int(n)
    rng = np.random.default_rng(seed)
    if n == 1:
        u1 = np.exp(2j * np.pi * rng.random((1, 1)))
        u2 = np.exp(2j * np.pi * rng.random((1, 1)))
    else:
        u1 = unitary_group.rvs(n, random_state=rng)
        u2 = unitary_group.rvs(n, random_state=rng)
    rs = rng.uniform(-r_max, r_max, size=n)
    return passive_symplectic(u1) @ squeezing_layer(rs) @ passive_symplectic(u2)


def random_physical_state(n, seed=None, r_max=1.0, nu_max=3.0):
    """Random mixed Gaussian covariance ``S diag(nu) S^T`` with ``nu_i ~ U[1, nu_max]``."""
    rng = np.random.default_rng(seed)
    nus = rng.uniform(1.0, nu_max, size=n)
    s = random_symplectic(n, r_max, seed=rng)
    return s @ np.diag(np.repeat(nus, 2)) @ s.T
