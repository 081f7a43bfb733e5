"""Numerical time-dependent Schrieffer-Wolff transformation.

The effective Hamiltonian in the frame e^S is

    H_eff = e^{-S} H e^{S} + i (d/dt e^{-S}) e^{S}
          = sum_j [H, S]_j / j!  -  i sum_j [S_dot, S]_j / (j+1)!

with S = S_1 + S_2 + S_3 and the bookkeeping that S_k and S_dot_{k-1} are
of order k. Each S_k is fixed by requiring the order-k block-offdiagonal
part of H_eff to vanish:

    [H0, S_k] = -offdiag(R_k),

where R_k collects every order-k contribution that does not involve S_k.
For a two-block partition this is exactly

    [H0, S1] = -H2
    [H0, S2] = -[H1, S1] + i S1_dot
    [H0, S3] = -[H1, S2] - [[H2, S1], S1] / 3 + i S2_dot,

because products of two off-diagonal operators are then block diagonal.
For finer partitions (e.g. photon-number sectors of a cavity) R_k also
carries off-diagonal pieces of lower-order products, which the same
equation removes.

Arrays may carry a leading time axis; all algebra is batched over it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import DegeneracyError
from .operators import SystemSpec, dagger, expm_skew

DEGENERACY_TOL = 1e-9
SERIES_TOL = 1e-14
MAX_ORDER = 3


@dataclass(frozen=True)
class BlockPartition:
    """Assignment of every basis index to a block id."""

    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels).ravel())

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def same_block(self) -> np.ndarray:
        return self.labels[:, None] == self.labels[None, :]

    def diag(self, a):
        return np.where(self.same_block, a, 0.0)

    def offdiag(self, a):
        return np.where(self.same_block, 0.0, a)

    @property
    def is_bipartition(self) -> bool:
        return len(np.unique(self.labels)) <= 2


def photon_number_partition(spec: SystemSpec) -> BlockPartition:
    """Blocks = cavity Fock number; removes every photon-changing term."""
    return BlockPartition(spec.labels()[:, 0])


def photon_parity_partition(spec: SystemSpec) -> BlockPartition:
    """Two blocks = even / odd cavity Fock number."""
    return BlockPartition(spec.labels()[:, 0] % 2)


def _eigenbasis(h0, partition: BlockPartition):
    """Eigenpairs of a block-diagonal H0, diagonalized block by block.

    Keeps every eigenvector inside one block, so degenerate levels in
    different blocks are never mixed.
    """
    h0 = np.asarray(h0)
    lead = h0.shape[:-2]
    dim = h0.shape[-1]
    evals = np.zeros(lead + (dim,))
    evecs = np.zeros(lead + (dim, dim), dtype=complex)
    for label in np.unique(partition.labels):
        idx = np.flatnonzero(partition.labels == label)
        w, v = np.linalg.eigh(h0[..., idx[:, None], idx[None, :]])
        evals[..., idx] = w
        evecs[..., idx[:, None], idx[None, :]] = v
    return evals, evecs


def solve_generator(h0, rhs, partition: BlockPartition, tol: float = DEGENERACY_TOL):
    """Solve [H0, S] = RHS for block-offdiagonal S.

    In the eigenbasis of H0, S_mn = RHS_mn / (E_m - E_n) for pairs in
    different blocks and 0 otherwise.

    Raises
    ------
    DegeneracyError
        If a nonzero RHS entry connects levels closer than ``tol`` (rad/ns).
    """
    h0 = np.asarray(h0)
    rhs = np.asarray(rhs, dtype=complex)
    evals, evecs = _eigenbasis(h0, partition)
    r = dagger(evecs) @ rhs @ evecs
    gaps = evals[..., :, None] - evals[..., None, :]
    inter = ~partition.same_block
    scale = max(np.max(np.abs(r), initial=0.0), 1e-300)
    active = inter & (np.abs(r) > 1e-13 * scale)
    bad = active & (np.abs(gaps) <= tol)
    if np.any(bad):
        pos = np.argwhere(bad)[0]
        pair = (int(pos[-2]), int(pos[-1]))
        raise DegeneracyError(f"degenerate denominator between eigenstates {pair}", pair)
    safe = np.where(inter & (np.abs(gaps) > tol), gaps, np.inf)
    s = np.where(inter, r / safe, 0.0)
    return evecs @ s @ dagger(evecs)


def time_derivative(values, times):
    """Second-order finite difference along axis 0 (one-sided at the ends)."""
    return np.gradient(np.asarray(values), np.asarray(times, dtype=float), axis=0, edge_order=2)


# graded series: dict order -> matrix (stack)

def _add(acc: dict, order: int, term):
    acc[order] = acc[order] + term if order in acc else term


def _ad(x: dict, s: dict, max_order: int) -> dict:
    out: dict = {}
    for p, xp in x.items():
        for q, sq in s.items():
            if p + q <= max_order:
                _add(out, p + q, xp @ sq - sq @ xp)
    return out


def graded_effective_hamiltonian(h: dict, s: dict, s_dot: dict, max_order: int) -> dict:
    """Order-by-order H_eff from graded H, S and S_dot (orders as dict keys)."""
    total: dict = {}
    term = dict(h)
    j = 0
    while term:
        for k, v in term.items():
            _add(total, k, v / factorial(j))
        term = _ad(term, s, max_order)
        j += 1
    term = {k: v for k, v in s_dot.items() if k <= max_order}
    j = 0
    while term:
        for k, v in term.items():
            _add(total, k, -1j * v / factorial(j + 1))
        term = _ad(term, s, max_order)
        j += 1
    return total


@dataclass(frozen=True)
class GeneratorSeries:
    """S1, S2, S3 (and their finite-difference derivatives) on a time grid.

    ``times`` is None for a time-independent problem, in which case the
    arrays have no time axis and every derivative is zero.
    """

    S1: np.ndarray
    S2: np.ndarray
    S3: np.ndarray
    S1_dot: np.ndarray
    S2_dot: np.ndarray
    S3_dot: np.ndarray
    times: np.ndarray | None

    @property
    def generators(self):
        return [self.S1, self.S2, self.S3]

    def total(self, order: int = 3):
        return sum(self.generators[:order])

    def total_dot(self, order: int = 3):
        return sum([self.S1_dot, self.S2_dot, self.S3_dot][:order])


def _derivative(values, times):
    return np.zeros_like(values) if times is None else time_derivative(values, times)


def _validate(h0, h1, h2, partition, times):
    if times is not None:
        times = np.asarray(times, dtype=float)
        if h0.ndim != 3 or len(times) != h0.shape[0]:
            raise ValueError("time-sampled input needs arrays of shape (len(times), d, d)")
        if len(times) < 3:
            raise ValueError("need at least 3 time samples")
        steps = np.diff(times)
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * abs(steps.mean()):
            raise ValueError("time grid must be uniform")
    if np.max(np.abs(partition.offdiag(h0)), initial=0.0) > 0:
        raise ValueError("H0 must be block diagonal")
    if np.max(np.abs(partition.offdiag(h1)), initial=0.0) > 0:
        raise ValueError("H1 must be block diagonal")
    if np.max(np.abs(partition.diag(h2)), initial=0.0) > 0:
        raise ValueError("H2 must be block offdiagonal")
    return times


def build_hierarchy(h0, h1, h2, partition: BlockPartition, times=None,
                    tol: float = DEGENERACY_TOL) -> GeneratorSeries:
    """Solve for S1, S2, S3 order by order.

    Parameters
    ----------
    h0, h1, h2 : ndarray
        Unperturbed, block-diagonal and block-offdiagonal parts, either single
        matrices (static problem, ``times=None``) or stacks sampled on ``times``.
    partition : BlockPartition
    times : array, optional
        Uniform time grid (ns) with at least 3 samples. Generator derivatives
        use second-order central differences, one-sided at the end points.
    """
    h0, h1, h2 = (np.asarray(x, dtype=complex) for x in (h0, h1, h2))
    times = _validate(h0, h1, h2, partition, times)
    h = {0: h0, 1: h1 + h2}
    s: dict = {}
    s_dot: dict = {}
    for k in range(1, MAX_ORDER + 1):
        residual = graded_effective_hamiltonian(h, s, s_dot, k).get(k)
        rhs = -partition.offdiag(residual) if residual is not None else np.zeros_like(h0)
        s[k] = solve_generator(h0, rhs, partition, tol=tol)
        s_dot[k + 1] = _derivative(s[k], times)
    return GeneratorSeries(S1=s[1], S2=s[2], S3=s[3],
                           S1_dot=s_dot[2], S2_dot=s_dot[3], S3_dot=s_dot[4], times=times)


def effective_hamiltonian_terms(h0, h1, h2, series: GeneratorSeries, partition: BlockPartition,
                                max_order: int = 4):
    """Block-diagonal effective Hamiltonian terms [H~_0, ..., H~_max_order].

    Each term is the block-diagonal part of the order-k contribution to
    H_eff. For a two-block partition these reduce to H0, H1, [H2, S1]/2,
    [H2, S2]/2 and [H2, S3]/2 - [H2, S1]_3/24.
    """
    h = {0: np.asarray(h0, dtype=complex), 1: np.asarray(h1 + h2, dtype=complex)}
    s = {1: series.S1, 2: series.S2, 3: series.S3}
    s_dot = {2: series.S1_dot, 3: series.S2_dot, 4: series.S3_dot}
    graded = graded_effective_hamiltonian(h, s, s_dot, max_order)
    zero = np.zeros_like(h[0])
    return [partition.diag(graded.get(k, zero)) for k in range(max_order + 1)]


def bipartite_effective_terms(h0, h1, h2, series: GeneratorSeries):
    """Closed-form two-block effective terms H~_0 .. H~_4."""
    from .operators import nested_commutator
    comm = lambda a, b: a @ b - b @ a  # noqa: E731
    return [
        np.asarray(h0, dtype=complex),
        np.asarray(h1, dtype=complex),
        0.5 * comm(h2, series.S1),
        0.5 * comm(h2, series.S2),
        0.5 * comm(h2, series.S3) - nested_commutator(h2, series.S1, 3) / 24.0,
    ]


def frame_derivative_term(s, s_dot, tol: float = SERIES_TOL):
    """i (d/dt e^{-S}) e^{S} = -i sum_j [S_dot, S]_j / (j+1)!, summed until terms < tol."""
    total = np.zeros_like(s_dot, dtype=complex)
    term = np.asarray(s_dot, dtype=complex)
    j = 0
    while True:
        contribution = term / factorial(j + 1)
        total = total - 1j * contribution
        if np.max(np.abs(contribution), initial=0.0) < tol or j > 60:
            return total
        term = term @ s - s @ term
        j += 1


def transformed_hamiltonian(h, s, s_dot):
    """Exact e^{-S} H e^{S} plus the frame-derivative term, one time sample."""
    u = expm_skew(1j * s, 1.0)      # exp(S) for anti-Hermitian S
    return dagger(u) @ h @ u + frame_derivative_term(s, s_dot)


def offdiagonal_residual(h, s_total, partition: BlockPartition, times=None, s_dot=None):
    """Spectral norm of the block-offdiagonal part of the transformed Hamiltonian.

    ``h`` and ``s_total`` are single matrices (static) or stacks on ``times``.
    ``s_dot`` defaults to the finite-difference derivative of ``s_total``.
    Returns one value per sample.
    """
    h = np.asarray(h, dtype=complex)
    s_total = np.asarray(s_total, dtype=complex)
    if h.ndim == 2:
        h, s_total = h[None], s_total[None]
        s_dot = np.zeros_like(s_total) if s_dot is None else np.asarray(s_dot)[None]
    elif s_dot is None:
        s_dot = _derivative(s_total, times)
    out = []
    for hk, sk, dk in zip(h, s_total, s_dot):
        od = partition.offdiag(transformed_hamiltonian(hk, sk, dk))
        out.append(float(np.linalg.norm(od, 2)))
    return np.array(out)
