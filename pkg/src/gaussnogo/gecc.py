"""Gaussian error-correcting codes and the single-mode channel they induce.

A code ``G(n, E, D)`` adjoins ``n - 1`` vacuum ancillas to the signal (mode
0), applies the encoder, sends every mode through one use of the channel,
applies the decoder and keeps mode 0.
"""

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from .entanglement import entanglement_degradation
from .symplectic import is_symplectic


@dataclass(frozen=True, eq=False)
class GECCode:
    n: int
    S_E: np.ndarray
    S_D: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"a code needs n >= 1 modes, got {self.n!r}")
        for name in ("S_E", "S_D"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (2 * self.n, 2 * self.n):
                raise ValueError(
                    f"{name} must be {2 * self.n}x{2 * self.n} for n={self.n}, got {value.shape}"
                )
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def check(self, atol=1e-9):
        for name in ("S_E", "S_D"):
            mat = getattr(self, name)
            # roundoff in S Omega S^T grows like eps * |S|^2
            tol = atol + 64 * np.finfo(float).eps * np.abs(mat).max() ** 2
            if not is_symplectic(mat, atol=tol):
                raise ValueError(f"{name} is not symplectic")
        return self

    @classmethod
    def identity(cls, n=1):
        return cls(n, np.eye(2 * n), np.eye(2 * n))


def effective_channel(code, channel, check=True):
    """Single-mode channel ``(M_GC, N_GC)`` realised by ``code`` around ``channel``.

    With ``A = S_D (+)M S_E`` and ``B = S_D (+)N S_D^T``, the signal rows of
    ``A`` restricted to the signal column give ``M_GC``; the ancilla columns
    carry vacuum noise, so ``N_GC = A_a A_a^T + B`` on the signal block.
    """
    if check:
        code.check()
        ch.check_channel(channel)
    n = code.n
    d_rows = code.S_D[:2]
    # rows of S_D times the block diagonal of n copies of M (resp. N)
    d_blocks = d_rows.reshape(2, n, 2)
    a_rows = np.einsum("ikj,jl->ikl", d_blocks, channel.M).reshape(2, 2 * n) @ code.S_E
    dn = np.einsum("ikj,jl->ikl", d_blocks, channel.N).reshape(2, 2 * n)
    m_gc = a_rows[:, :2]
    anc = a_rows[:, 2:]
    n_gc = anc @ anc.T + dn @ d_rows.T
    return ch.GaussianChannel(m_gc, 0.5 * (n_gc + n_gc.T))


def degradation_of_code(code, channel, check=True):
    """Entanglement degradation of the code-corrected channel."""
    return entanglement_degradation(effective_channel(code, channel, check=check)).D
