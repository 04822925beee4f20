"""Mode-entanglement bridge: partitions, partial trace, and the embedding
of multipartite tensor states into fermion states.

With definite fermion-number parity inside each mode block, the one-body
density matrix is block diagonal, and entanglement between blocks requires
a non-determinant state.  The embedding places one fermion per block, under
which local reduced density matrices become the diagonal blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import EntropyFunction, VON_NEUMANN, trace_form_entropy
from .spdm import OneBodyDM, SortedSpectrum, compute_spdm, spectrum
from .states import MixedState, PureState
from .schmidt import build_lambda

CROSS_BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class SubspacePartition:
    """Disjoint mode subsets covering [0, n)."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(k) for k in b)) for b in self.blocks)
        seen: set[int] = set()
        for b in blocks:
            for k in b:
                if k in seen:
                    raise ValueError(f"mode {k} appears in two blocks")
                seen.add(k)
        if seen != set(range(self.n)):
            raise ValueError("blocks must cover all modes exactly once")
        object.__setattr__(self, "blocks", blocks)


@dataclass(frozen=True)
class TensorState:
    """Normalized multipartite state over a product index space."""

    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(dims)
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"tensor state norm {nrm} deviates from 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def parts(self) -> int:
        return len(self.dims)


def random_tensor_state(dims, seed: int) -> TensorState:
    rng = np.random.default_rng(seed)
    shape = tuple(int(d) for d in dims)
    amps = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return TensorState(shape, amps / np.linalg.norm(amps))


def local_reduced_dm(ts: TensorState, i: int) -> np.ndarray:
    """Reduced density matrix of the i-th subsystem."""
    axes = [ax for ax in range(ts.parts) if ax != i]
    psi = np.moveaxis(ts.amplitudes, i, 0).reshape(ts.dims[i], -1)
    del axes
    return psi @ psi.conj().T


def apply_local_unitary(ts: TensorState, i: int, u: np.ndarray) -> TensorState:
    psi = np.moveaxis(ts.amplitudes, i, 0)
    psi = np.tensordot(np.asarray(u, dtype=complex), psi, axes=(1, 0))
    return TensorState(ts.dims, np.moveaxis(psi, 0, i))


def measure_local(ts: TensorState, i: int) -> list:
    """Projective computational-basis readout of subsystem i: one outcome
    per local index, post states keep the full index space."""
    outcomes = []
    for j in range(ts.dims[i]):
        slicer = [slice(None)] * ts.parts
        slicer[i] = j
        collapsed = np.zeros_like(ts.amplitudes)
        collapsed[tuple(slicer)] = ts.amplitudes[tuple(slicer)]
        p = float(np.sum(np.abs(collapsed) ** 2))
        post = TensorState(ts.dims, collapsed / np.sqrt(p)) if p > 1e-12 else None
        outcomes.append((j, p, post))
    return outcomes


def block_offsets(dims) -> list:
    offsets = [0]
    for d in dims:
        offsets.append(offsets[-1] + int(d))
    return offsets


def block_unitary(dims, i: int, u: np.ndarray) -> np.ndarray:
    """Embed a local unitary as a mode-space unitary on block i."""
    offsets = block_offsets(dims)
    n = offsets[-1]
    mat = np.eye(n, dtype=complex)
    lo, hi = offsets[i], offsets[i + 1]
    mat[lo:hi, lo:hi] = np.asarray(u, dtype=complex)
    return mat


def theta_map(ts: TensorState) -> PureState:
    """Embed the tensor state as a fermion state with one particle per
    contiguous mode block; separable states land on determinants."""
    offsets = block_offsets(ts.dims)
    n = offsets[-1]
    if n > 20:
        raise ValueError(f"total dimension {n} exceeds the supported mode count 20")
    amps: dict[int, complex] = {}
    flat = ts.amplitudes.reshape(-1)
    for flat_idx, amp in enumerate(flat):
        if abs(amp) < 1e-16:
            continue
        idx = np.unravel_index(flat_idx, ts.dims)
        mask = 0
        for block, j in enumerate(idx):
            mask |= 1 << (offsets[block] + int(j))
        amps[mask] = complex(amp)
    return PureState(n, amps, fixed_N=ts.parts)


def theta_partition(dims) -> SubspacePartition:
    offsets = block_offsets(dims)
    blocks = tuple(
        tuple(range(offsets[i], offsets[i + 1])) for i in range(len(dims))
    )
    return SubspacePartition(offsets[-1], blocks)


def multipartite_monotone(ts: TensorState, f: EntropyFunction = VON_NEUMANN) -> float:
    """sum_i Tr f(rho_i) over the local reduced density matrices; equals the
    one-body entanglement of the embedded fermion state."""
    total = 0.0
    for i in range(ts.parts):
        eigs = np.linalg.eigvalsh(local_reduced_dm(ts, i))
        total += trace_form_entropy(SortedSpectrum.from_values(eigs), f)
    return total


@dataclass(frozen=True)
class BlockDiagonalReport:
    applicable: bool
    reason: str
    cross_block_max: float
    blocks: tuple
    holds: bool


def _block_parities(state: PureState, partition: SubspacePartition):
    """Per-block popcount parities if uniform across amplitudes, else None."""
    masks = [sum(1 << k for k in b) for b in partition.blocks]
    parities = None
    for m in state.amplitudes:
        vec = tuple((m & bm).bit_count() & 1 for bm in masks)
        if parities is None:
            parities = vec
        elif parities != vec:
            return None
    return parities


def check_block_diagonal(
    state: PureState, partition: SubspacePartition
) -> BlockDiagonalReport:
    """Verify the one-body density matrix is block diagonal over a partition
    with definite per-block number parity."""
    if _block_parities(state, partition) is None:
        return BlockDiagonalReport(
            False, "no definite local number parity", float("nan"), (), False
        )
    rho = compute_spdm(state).matrix
    blocks = []
    cross_max = 0.0
    for bi, block in enumerate(partition.blocks):
        idx = np.array(block)
        blocks.append(OneBodyDM(rho[np.ix_(idx, idx)]))
        for bj, other in enumerate(partition.blocks):
            if bi != bj:
                cross = rho[np.ix_(idx, np.array(other))]
                if cross.size:
                    cross_max = max(cross_max, float(np.max(np.abs(cross))))
    return BlockDiagonalReport(
        True, "", cross_max, tuple(blocks), cross_max <= CROSS_BLOCK_TOL
    )


def _split_sign(mask: int, s_mask: int) -> int:
    """Sign relating |mask> to (S-creations asc)(complement-creations asc)|0>:
    counts occupied pairs (i in complement, j in S) with i < j."""
    inv = 0
    rest = mask & ~s_mask
    for j in range(mask.bit_length()):
        if s_mask & mask & (1 << j):
            inv += (rest & ((1 << j) - 1)).bit_count()
    return -1 if inv & 1 else 1


def _compress(mask: int, modes) -> int:
    out = 0
    for pos, k in enumerate(modes):
        if mask & (1 << k):
            out |= 1 << pos
    return out


def reduced_state(state: PureState, subset) -> MixedState:
    """Partial trace over the complement of a mode subset, returned as the
    eigendecomposition ensemble on the subset's own Fock space.

    Requires definite number parity on the subset; the reordering that puts
    subset modes first is folded into the coefficients as a sign.
    """
    s_modes = tuple(sorted(int(k) for k in subset))
    if not s_modes:
        raise ValueError("empty mode subset")
    for k in s_modes:
        if not 0 <= k < state.n:
            raise ValueError(f"mode index {k} out of range")
    s_mask = sum(1 << k for k in s_modes)
    other = tuple(k for k in range(state.n) if k not in s_modes)
    parities = {(m & s_mask).bit_count() & 1 for m in state.amplitudes}
    if len(parities) > 1:
        raise ValueError("state has no definite number parity on the subset")
    dim_s = 1 << len(s_modes)
    coeff: dict[int, dict[int, complex]] = {}
    for m, a in state.amplitudes.items():
        mu = _compress(m, s_modes)
        nu = _compress(m, other)
        coeff.setdefault(nu, {})[mu] = _split_sign(m, s_mask) * a
    rho_s = np.zeros((dim_s, dim_s), dtype=complex)
    for col in coeff.values():
        vec = np.zeros(dim_s, dtype=complex)
        for mu, c in col.items():
            vec[mu] = c
        rho_s += np.outer(vec, vec.conj())
    eigvals, eigvecs = np.linalg.eigh(rho_s)
    members = []
    for w, chi in zip(eigvals[::-1], eigvecs.T[::-1]):
        if w < 1e-12:
            continue
        amps = {mu: complex(chi[mu]) for mu in range(dim_s) if abs(chi[mu]) > 1e-15}
        counts = {int(mu).bit_count() for mu in amps}
        fixed = counts.pop() if len(counts) == 1 else None
        members.append((float(w), PureState(len(s_modes), amps, fixed)))
    return MixedState(tuple(members))


def reduced_dm_matrix(state: PureState, subset) -> np.ndarray:
    """Dense reduced density matrix on the subset Fock basis (mask order)."""
    mixed = reduced_state(state, subset)
    dim = 1 << mixed.ensemble[0][1].n
    out = np.zeros((dim, dim), dtype=complex)
    for w, chi in mixed.ensemble:
        vec = np.zeros(dim, dtype=complex)
        for mu, a in chi.amplitudes.items():
            vec[mu] = a
        out += w * np.outer(vec, vec.conj())
    return out


def two_fermion_pairing(state: PureState):
    """Normal form of a two-fermion state: unitary Q whose columns come in
    pairs spanning the determinant pairs, plus the pair coefficients.

    The coefficient matrix of a two-fermion state is antisymmetric; each
    deflation step peels one pair (top singular vector and its partner).
    """
    if state.fixed_N != 2:
        raise ValueError("pairing normal form needs a two-fermion state")
    n = state.n
    lam = build_lambda(state).matrix  # antisymmetric n x n
    work = lam.copy()
    columns = []
    coeffs = []
    while True:
        u_svd, svals, _ = np.linalg.svd(work)
        if svals[0] < 1e-12:
            break
        s = float(svals[0])
        u = u_svd[:, 0]
        p = -work @ np.conj(u) / s
        columns.extend([u, p])
        coeffs.append(s)
        work = work - s * (np.outer(u, p) - np.outer(p, u))
    q = np.zeros((n, n), dtype=complex)
    for i, col in enumerate(columns):
        q[:, i] = col
    # complete with an orthonormal basis of the unoccupied subspace
    filled = len(columns)
    if filled < n:
        proj = np.eye(n) - q[:, :filled] @ q[:, :filled].conj().T
        basis = np.linalg.qr(proj)[0]
        # keep the columns with significant projector weight
        good = [c for c in basis.T if np.linalg.norm(proj @ c) > 0.5]
        for i, col in enumerate(good[: n - filled]):
            q[:, filled + i] = col / np.linalg.norm(col)
    return q, np.array(coeffs)


@dataclass(frozen=True)
class ModeRelationReport:
    mode_entropy: float
    one_body_entropy: float
    gap: float
    passed: bool


def two_fermion_mode_relation(
    state: PureState, f: EntropyFunction = VON_NEUMANN, tol: float = 1e-9
) -> ModeRelationReport:
    """Check that the entanglement entropy across the natural pair split of
    a two-fermion state equals half its one-body entanglement."""
    from .gates import apply_one_body_unitary

    q, _ = two_fermion_pairing(state)
    rotated = apply_one_body_unitary(state, q.conj().T)
    part_a = tuple(range(0, state.n, 2))
    rho_a = reduced_dm_matrix(rotated, part_a)
    eigs = np.linalg.eigvalsh(rho_a)
    e_ab = trace_form_entropy(SortedSpectrum.from_values(eigs), f)
    e_one = trace_form_entropy(spectrum(compute_spdm(state)), f)
    gap = abs(e_ab - 0.5 * e_one)
    return ModeRelationReport(e_ab, e_one, gap, gap <= tol)
