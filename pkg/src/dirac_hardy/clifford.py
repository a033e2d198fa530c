"""Hermitian Clifford representations for Dirac operators in dimension n.

The matrices are built by the fixed recursion

    G(1)   = [s1, s2, s3]
    G(p+1) = [s1 (x) g for g in G(p)] + [s2 (x) I, s3 (x) I]

so ``G(p)`` holds ``2p + 1`` mutually anticommuting Hermitian involutions of
size ``2**p``.  For spatial dimension ``n`` we take ``p = ceil(n / 2)``,
``alpha_j = G(p)[j]`` for ``j < n`` and ``beta = G(p)[-1]``.  For ``n = 3``
this is exactly the block form ``alpha_j = [[0, s_j], [s_j, 0]]``,
``beta = diag(I, -I)``.  All entries lie in ``{0, +-1, +-i}``, so the
anticommutation relations hold exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA1, SIGMA2, SIGMA3)


def spinor_dim(n: int) -> int:
    """2**(n/2) for even n, 2**((n+1)/2) for odd n."""
    return 2 ** ((n + 1) // 2)


def _generators(p: int) -> list[np.ndarray]:
    gens = [g.copy() for g in PAULI]
    for _ in range(p - 1):
        eye = np.eye(gens[0].shape[0], dtype=complex)
        gens = [np.kron(SIGMA1, g) for g in gens] + [np.kron(SIGMA2, eye), np.kron(SIGMA3, eye)]
    return gens


@dataclass(frozen=True)
class CliffordRep:
    n: int
    m: int
    alphas: tuple[np.ndarray, ...] = field(repr=False)
    beta: np.ndarray = field(repr=False)

    @property
    def alpha_stack(self) -> np.ndarray:
        """The alphas as one ``(n, m, m)`` array."""
        return np.stack(self.alphas)

    def anticommutator_errors(self) -> dict[str, float]:
        """Max entrywise defects of every Clifford relation and of Hermiticity."""
        eye = np.eye(self.m)
        mats = list(self.alphas) + [self.beta]
        herm = max(np.abs(a - a.conj().T).max() for a in mats)
        worst = 0.0
        for j, aj in enumerate(mats):
            for k, ak in enumerate(mats):
                target = 2.0 * eye if j == k else 0.0 * eye
                worst = max(worst, float(np.abs(aj @ ak + ak @ aj - target).max()))
        return {"anticommutator": worst, "hermiticity": float(herm)}


def build_clifford(n: int) -> CliffordRep:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {n!r}")
    n = int(n)
    gens = _generators((n + 1) // 2)
    alphas = tuple(gens[:n])
    beta = gens[-1]
    for a in (*alphas, beta):
        a.setflags(write=False)
    return CliffordRep(n=n, m=spinor_dim(n), alphas=alphas, beta=beta)


def unit_direction(omega: Sequence[float], atol: float = 1e-12) -> np.ndarray:
    """Validate and return a unit vector as a float array."""
    w = np.asarray(omega, dtype=float)
    if w.ndim != 1:
        raise ValueError("direction must be a 1-D vector")
    if abs(np.linalg.norm(w) - 1.0) > atol:
        raise ValueError(f"direction is not a unit vector (norm {np.linalg.norm(w)!r})")
    return w


def _check_dir(rep: CliffordRep, omega) -> np.ndarray:
    w = unit_direction(omega)
    if w.shape[0] != rep.n:
        raise ValueError(f"direction has dimension {w.shape[0]}, representation has n={rep.n}")
    return w


def alpha_hat(rep: CliffordRep, omega) -> np.ndarray:
    """sum_j omega_j alpha_j; Hermitian and squares to the identity."""
    w = _check_dir(rep, omega)
    return np.einsum("j,jab->ab", w.astype(complex), rep.alpha_stack)


def minus_i_alphahat_beta(rep: CliffordRep, omega) -> np.ndarray:
    """-i alpha_hat beta: a Hermitian involution with spectrum {+1, -1}."""
    return -1j * alpha_hat(rep, omega) @ rep.beta


def alpha_hat_field(rep: CliffordRep, omegas: np.ndarray) -> np.ndarray:
    """Vectorised alpha_hat for an ``(N, n)`` batch of directions, shape ``(N, m, m)``."""
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 2 or omegas.shape[1] != rep.n:
        raise ValueError("directions must have shape (N, n)")
    return np.einsum("sj,jab->sab", omegas.astype(complex), rep.alpha_stack)
