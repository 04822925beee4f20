"""The 1-(N-1) Schmidt-like decomposition of a fixed-N pure state.

An N-fermion state expands as (1/N) sum_{k,l} L[k,l] c†_k C†_l |0>, where
C†_l creates the (N-1)-fermion basis determinant labeled by the l-th
(N-1)-element mode subset.  The SVD of L yields natural orbitals (columns
of U), natural (N-1)-fermion states (columns of V) and occupations
lambda_nu = squared singular values, shared with the one-body density
matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .spdm import SortedSpectrum
from .states import (
    PureState,
    apply_annihilation,
    apply_creation,
    basis_state,
    inner_product,
    superpose,
    zero_state,
)

RANK_TOL = 1e-10


@dataclass(frozen=True)
class SubsetIndexer:
    """Bidirectional map between r-element mode subsets and column indices.

    Subsets are enumerated lexicographically over ascending index tuples;
    C†_l applies its creation operators in ascending order, so the basis
    determinant of column l is exactly basis_state(mask of subset l).
    """

    n: int
    r: int
    subsets: tuple
    masks: tuple
    index: dict

    @classmethod
    def build(cls, n: int, r: int) -> SubsetIndexer:
        if not 0 <= r <= n:
            raise ValueError(f"subset size {r} out of range for n={n}")
        subsets = tuple(combinations(range(n), r))
        masks = tuple(sum(1 << k for k in s) for s in subsets)
        index = {mask: l for l, mask in enumerate(masks)}
        return cls(n, r, subsets, masks, index)

    @property
    def size(self) -> int:
        return len(self.subsets)


@dataclass(frozen=True)
class LambdaMatrix:
    """n x C(n, N-1) coefficient matrix of the 1-(N-1) expansion."""

    matrix: np.ndarray
    indexer: SubsetIndexer

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.indexer.r + 1


@dataclass(frozen=True)
class SchmidtData:
    lambdas: SortedSpectrum
    U: np.ndarray
    V: np.ndarray
    indexer: SubsetIndexer
    N: int


def build_lambda(state: PureState) -> LambdaMatrix:
    """L[k, l] = amplitude of the l-th (N-1)-basis determinant in c_k|psi>.

    Tr L L† equals N for a normalized input.
    """
    if state.fixed_N is None:
        raise ValueError("state must carry a definite fermion number")
    n, N = state.n, state.fixed_N
    if N < 1:
        raise ValueError("need at least one fermion")
    indexer = SubsetIndexer.build(n, N - 1)
    mat = np.zeros((n, indexer.size), dtype=complex)
    for k in range(n):
        removed = apply_annihilation(state, k)
        for mask, amp in removed.amplitudes.items():
            mat[k, indexer.index[mask]] = amp
    return LambdaMatrix(mat, indexer)


def schmidt_decompose(lam: LambdaMatrix) -> SchmidtData:
    """SVD of the coefficient matrix with a reproducible phase gauge.

    Each column of U is rotated so its largest-modulus entry is real
    positive; paired V columns absorb the inverse phase, leaving the
    product U D V† unchanged.  For degenerate occupations only
    gauge-invariant quantities are meaningful.
    """
    u, svals, vh = np.linalg.svd(lam.matrix, full_matrices=True)
    v = vh.conj().T
    n = lam.n
    for nu in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, nu])))
        phase = u[i, nu]
        if abs(phase) > 0:
            phase /= abs(phase)
            u[:, nu] /= phase
            if nu < v.shape[1]:
                v[:, nu] /= phase
    for nu in range(u.shape[1], v.shape[1]):
        i = int(np.argmax(np.abs(v[:, nu])))
        phase = v[i, nu]
        if abs(phase) > 0:
            v[:, nu] /= phase / abs(phase)
    lambdas = np.zeros(n)
    lambdas[: len(svals)] = svals**2
    return SchmidtData(SortedSpectrum(lambdas), u, v, lam.indexer, lam.N)


def _natural_pair_state(sd: SchmidtData, n: int, nu: int) -> PureState:
    """C†_nu |0> = sum_l conj(V[l, nu]) |subset l>."""
    terms = [
        (np.conj(sd.V[l, nu]), basis_state(n, sd.indexer.masks[l]))
        for l in range(sd.indexer.size)
        if abs(sd.V[l, nu]) > 1e-16
    ]
    return superpose(terms, n, fixed_N=sd.N - 1)


def _natural_orbital_applied(sd: SchmidtData, base: PureState, nu: int):
    """c†_nu |base> with c†_nu = sum_k U[k, nu] c†_k."""
    n = base.n
    terms = []
    for k in range(n):
        if abs(sd.U[k, nu]) > 1e-16:
            terms.append((sd.U[k, nu], apply_creation(base, k)))
    new_N = None if base.fixed_N is None else base.fixed_N + 1
    return superpose(terms, n, fixed_N=new_N)


def reconstruct_state(sd: SchmidtData, n: int | None = None) -> PureState:
    """Rebuild (1/N) sum_nu sqrt(lambda_nu) c†_nu C†_nu |0>, normalized."""
    n = sd.U.shape[0] if n is None else n
    total = zero_state(n, fixed_N=sd.N)
    parts = []
    for nu in range(len(sd.lambdas.values)):
        lam_nu = sd.lambdas.values[nu]
        if lam_nu <= RANK_TOL:
            continue
        pair = _natural_pair_state(sd, n, nu)
        parts.append((np.sqrt(lam_nu) / sd.N, _natural_orbital_applied(sd, pair, nu)))
    if parts:
        total = superpose(parts, n, fixed_N=sd.N)
    return total.normalize()


@dataclass(frozen=True)
class NaturalModeReport:
    collapse_residuals: dict
    occupation_offdiag: float
    occupation_diag_error: float
    passed: bool


def natural_mode_check(
    state: PureState, sd: SchmidtData, tol: float = 1e-9
) -> NaturalModeReport:
    """Check c_nu |psi> = sqrt(lambda_nu) C†_nu |0> and the occupation
    orthogonality <psi| c†_nu c_nu' |psi> = lambda_nu delta_nu,nu'."""
    n = state.n
    active = [
        nu for nu in range(len(sd.lambdas.values)) if sd.lambdas.values[nu] > RANK_TOL
    ]
    removed = {}
    residuals = {}
    removed_N = None if state.fixed_N is None else state.fixed_N - 1
    for nu in active:
        # c_nu = sum_k conj(U[k, nu]) c_k
        terms = [
            (np.conj(sd.U[k, nu]), apply_annihilation(state, k)) for k in range(n)
        ]
        c_nu_psi = superpose(terms, n, fixed_N=removed_N)
        removed[nu] = c_nu_psi
        target = _natural_pair_state(sd, n, nu)
        diff = superpose(
            [(1.0, c_nu_psi), (-np.sqrt(sd.lambdas.values[nu]), target)], n
        )
        residuals[nu] = diff.norm()
    offdiag = 0.0
    diag_err = 0.0
    for nu in active:
        for nup in active:
            val = inner_product(removed[nu], removed[nup])
            if nu == nup:
                diag_err = max(diag_err, abs(val - sd.lambdas.values[nu]))
            else:
                offdiag = max(offdiag, abs(val))
    passed = (
        all(r <= tol for r in residuals.values())
        and offdiag <= tol
        and diag_err <= tol
    )
    return NaturalModeReport(residuals, offdiag, diag_err, passed)


def slater_rank_two_fermion(state: PureState) -> int:
    """Number of determinant pairs in the two-fermion normal form.

    Rank 1 means the state is a single determinant.  Occupations come in
    degenerate pairs for N = 2, so the rank is half the count above the
    threshold.
    """
    if state.fixed_N != 2:
        raise ValueError("Slater rank is implemented for two-fermion states only")
    sd = schmidt_decompose(build_lambda(state))
    count = int(np.sum(sd.lambdas.values > RANK_TOL))
    if count % 2 != 0:
        raise ArithmeticError(
            "occupation spectrum has an unpaired value at the rank threshold"
        )
    return count // 2
