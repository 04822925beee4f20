"""One-body density matrices, their 2n x 2n extension, and sorted spectra.

The one-body density matrix of a state has entries (k, k') = <c†_k' c_k>.
For a determinant it is idempotent; its deviation from idempotency is what
the entropy module quantifies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import MixedState, PureState, apply_annihilation, inner_product

HERMITICITY_TOL = 1e-12
EIGEN_RANGE_TOL = 1e-10
SORT_TIE_TOL = 1e-12
NONZERO_EIG_TOL = 1e-10


@dataclass(frozen=True)
class SortedSpectrum:
    """Real eigenvalue vector in descending order."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if np.any(np.diff(vals) > SORT_TIE_TOL):
            raise ValueError("spectrum is not sorted in descending order")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, values) -> SortedSpectrum:
        vals = np.sort(np.asarray(values, dtype=float).reshape(-1))[::-1]
        return cls(vals.copy())


def as_sorted_values(spec) -> np.ndarray:
    """Accept a SortedSpectrum or a raw descending array."""
    if isinstance(spec, SortedSpectrum):
        return spec.values
    return SortedSpectrum(np.asarray(spec, dtype=float)).values


@dataclass(frozen=True)
class OneBodyDM:
    """n x n Hermitian matrix of mode-pair contractions."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("one-body density matrix must be square")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL:
            raise ValueError("one-body density matrix is not Hermitian")
        mat = (mat + mat.conj().T) / 2.0
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


@dataclass(frozen=True)
class ExtendedDM:
    """Block matrix diag(rho, 1 - rho^T); trace equals the mode count."""

    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2


def compute_spdm(state: PureState | MixedState) -> OneBodyDM:
    """One-body density matrix with entries (k, k') = <c†_k' c_k>.

    Mixed states are ensemble-averaged; the result is symmetrized to kill
    rounding-level Hermiticity violations.
    """
    if isinstance(state, MixedState):
        mat = sum(
            w * compute_spdm(psi).matrix for w, psi in state.ensemble
        )
        return OneBodyDM(mat)
    if not state.is_normalized(1e-9):
        raise ValueError(f"state norm {state.norm()} deviates from 1 beyond 1e-9")
    n = state.n
    removed = [apply_annihilation(state, k) for k in range(n)]
    mat = np.zeros((n, n), dtype=complex)
    for k in range(n):
        mat[k, k] = removed[k].norm() ** 2
        for kp in range(k + 1, n):
            val = inner_product(removed[kp], removed[k])
            mat[k, kp] = val
            mat[kp, k] = np.conj(val)
    return OneBodyDM(mat)


def spectrum(matrix) -> SortedSpectrum:
    """Descending real eigenvalues of a Hermitian matrix."""
    if isinstance(matrix, (OneBodyDM, ExtendedDM)):
        mat = matrix.matrix
    else:
        mat = np.asarray(matrix, dtype=complex)
        if np.max(np.abs(mat - mat.conj().T)) > 1e-9 * max(
            1.0, np.max(np.abs(mat))
        ):
            raise ValueError("matrix is not Hermitian within tolerance")
    vals = np.linalg.eigvalsh(mat)
    return SortedSpectrum(vals[::-1].copy())


def extended_dm(rho: OneBodyDM) -> ExtendedDM:
    """diag(rho, 1 - rho^T); its spectrum is the union of lambda and
    1 - lambda, which lets states of different particle number be compared."""
    n = rho.n
    top = rho.matrix
    bottom = np.eye(n) - rho.matrix.T
    mat = np.zeros((2 * n, 2 * n), dtype=complex)
    mat[:n, :n] = top
    mat[n:, n:] = bottom
    return ExtendedDM(mat)


def rho_n_minus_1_spectrum(state: PureState) -> SortedSpectrum:
    """Nonzero spectrum of the (N-1)-body density matrix, descending.

    Computed as the squared singular values of the coefficient matrix of the
    1-(N-1) expansion; isospectral (on nonzero values) with the one-body
    density matrix of the same pure state.
    """
    from .schmidt import build_lambda

    if state.fixed_N is None:
        raise ValueError("state must carry a definite fermion number")
    lam = build_lambda(state)
    svals = np.linalg.svd(lam.matrix, compute_uv=False)
    eigs = svals**2
    return SortedSpectrum(eigs[eigs > NONZERO_EIG_TOL].copy())


def nonzero_part(spec: SortedSpectrum, tol: float = NONZERO_EIG_TOL) -> np.ndarray:
    return spec.values[spec.values > tol]


def is_idempotent(rho: OneBodyDM, tol: float = 1e-10) -> bool:
    """True iff rho^2 = rho within tol in max norm (determinant criterion)."""
    mat = rho.matrix
    return float(np.max(np.abs(mat @ mat - mat))) <= tol
