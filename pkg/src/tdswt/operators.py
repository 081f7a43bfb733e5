"""Dense operator algebra on truncated cavity x multilevel product spaces.

The tensor ordering is fixed: the cavity is slot 0 and occupies the most
significant position, followed by system 1, ..., system N. A product basis
state |n, j_1, ..., j_N> therefore sits at index
``((n * L_1 + j_1) * L_2 + j_2) ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class SystemSpec:
    """Hilbert-space layout of a cavity coupled to N multilevel systems.

    Parameters
    ----------
    cavity_cutoff : int
        Number of Fock states kept for the cavity (>= 2).
    levels : tuple of int
        Number of levels kept for each system (each >= 2).
    omega_r : float
        Cavity angular frequency in rad/ns.
    """

    cavity_cutoff: int
    levels: tuple[int, ...]
    omega_r: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))
        if self.cavity_cutoff < 2:
            raise ValueError(f"cavity_cutoff must be >= 2, got {self.cavity_cutoff}")
        if len(self.levels) < 1:
            raise ValueError("at least one multilevel system is required")
        if any(n < 2 for n in self.levels):
            raise ValueError(f"every system needs >= 2 levels, got {self.levels}")

    @property
    def n_systems(self) -> int:
        return len(self.levels)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.cavity_cutoff, *self.levels)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, photons: int, *levels: int) -> int:
        """Flat index of the product state |photons, levels...>."""
        if len(levels) != self.n_systems:
            raise ValueError(f"expected {self.n_systems} level labels, got {len(levels)}")
        return int(np.ravel_multi_index((photons, *levels), self.dims))

    def labels(self) -> np.ndarray:
        """Array of shape (dim, N+1) with the quantum numbers of each basis state."""
        return np.stack(np.unravel_index(np.arange(self.dim), self.dims), axis=1)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= rtol * max(scale, 1e-300))


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated bosonic lowering operator, a|n> = sqrt(n)|n-1>."""
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def level_projector(dim: int, j: int) -> np.ndarray:
    if not 0 <= j < dim:
        raise ValueError(f"level {j} out of range for dimension {dim}")
    out = np.zeros((dim, dim), dtype=complex)
    out[j, j] = 1.0
    return out


def raise_op(dim: int, j: int) -> np.ndarray:
    """|j+1><j|"""
    if not 0 <= j < dim - 1:
        raise ValueError(f"transition {j}->{j + 1} out of range for dimension {dim}")
    out = np.zeros((dim, dim), dtype=complex)
    out[j + 1, j] = 1.0
    return out


def lower_op(dim: int, j: int) -> np.ndarray:
    """|j><j+1|"""
    return raise_op(dim, j).T.copy()


def embed(local: np.ndarray, slot: int, spec: SystemSpec) -> np.ndarray:
    """Place ``local`` on ``slot`` (0 = cavity, m = system m) of the product space."""
    dims = spec.dims
    if not 0 <= slot < len(dims):
        raise ValueError(f"slot {slot} out of range 0..{len(dims) - 1}")
    local = np.asarray(local, dtype=complex)
    if local.shape != (dims[slot], dims[slot]):
        raise ValueError(
            f"operator of shape {local.shape} does not fit slot {slot} of dimension {dims[slot]}"
        )
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[slot] = local
    return reduce(np.kron, factors)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-2:] != b.shape[-2:]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def nested_commutator(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """[A, B]_n = [[A, B]_{n-1}, B] with [A, B]_0 = A."""
    if n < 0:
        raise ValueError("nesting depth must be >= 0")
    out = np.asarray(a)
    for _ in range(n):
        out = commutator(out, b)
    return out


def expm_skew(h: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i H tau) for Hermitian H (a single matrix or a stack).

    Uses the eigendecomposition of H, so the result is unitary to machine
    precision.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("expm_skew requires a Hermitian generator")
    h = 0.5 * (h + dagger(h))
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * tau * evals)
    return (evecs * phases[..., None, :]) @ dagger(evecs)
