"""Occupation-number representation of fermionic pure and mixed states.

Basis states are n-bit masks (bit k set = mode k occupied).  The mask with
bits {k1 < k2 < ... < kr} set denotes the state obtained by applying the
creation operators in ascending index order to the vacuum, with phase +1.
Every sign in the library follows from this single convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

PRUNE_TOL = 1e-14
NORM_TOL = 1e-12


def _popcount(mask: int) -> int:
    return mask.bit_count()


def _sign_below(mask: int, k: int) -> int:
    """(-1)**(number of occupied modes with index < k)."""
    return -1 if (mask & ((1 << k) - 1)).bit_count() & 1 else 1


@dataclass(frozen=True)
class PureState:
    """Sparse complex amplitude map over occupation bitmasks of n modes.

    States are immutable; all operations return new values.  A state may be
    unnormalized (e.g. the output of :func:`apply_annihilation`) or even zero;
    callers must check :meth:`norm` before renormalizing.
    """

    n: int
    amplitudes: dict[int, complex]
    fixed_N: int | None = None

    def __post_init__(self):
        if not 1 <= self.n <= 63:
            raise ValueError(f"mode count {self.n} out of range [1, 63]")
        pruned = {}
        for mask, amp in self.amplitudes.items():
            if mask < 0 or mask >= (1 << self.n):
                raise ValueError(f"mask {mask} out of range for n={self.n}")
            if abs(amp) >= PRUNE_TOL:
                pruned[int(mask)] = complex(amp)
        if self.fixed_N is not None:
            for mask in pruned:
                if _popcount(mask) != self.fixed_N:
                    raise ValueError(
                        f"mask {mask:b} has {_popcount(mask)} fermions, "
                        f"expected fixed_N={self.fixed_N}"
                    )
        object.__setattr__(self, "amplitudes", pruned)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def is_zero(self) -> bool:
        return not self.amplitudes

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalize(self) -> PureState:
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return PureState(
            self.n,
            {m: a / nrm for m, a in self.amplitudes.items()},
            self.fixed_N,
        )

    def amplitude(self, mask: int) -> complex:
        return self.amplitudes.get(mask, 0.0 + 0.0j)

    def number_parity(self) -> int | None:
        """+1 / -1 if every amplitude carries even / odd fermion number."""
        parities = {_popcount(m) & 1 for m in self.amplitudes}
        if len(parities) != 1:
            return None
        return -1 if parities.pop() else 1


def vacuum(n: int) -> PureState:
    return PureState(n, {0: 1.0 + 0.0j}, fixed_N=0)


def basis_state(n: int, mask: int) -> PureState:
    return PureState(n, {mask: 1.0 + 0.0j}, fixed_N=_popcount(mask))


def slater_basis_state(n: int, modes) -> PureState:
    """Basis Slater determinant occupying the given modes."""
    mask = 0
    for k in modes:
        if not 0 <= k < n:
            raise ValueError(f"mode index {k} out of range for n={n}")
        if mask & (1 << k):
            raise ValueError(f"mode index {k} repeated")
        mask |= 1 << k
    return basis_state(n, mask)


def zero_state(n: int, fixed_N: int | None = None) -> PureState:
    return PureState(n, {}, fixed_N)


def apply_creation(state: PureState, k: int) -> PureState:
    """c†_k applied termwise; Pauli-blocked terms drop out.  Unnormalized."""
    if not 0 <= k < state.n:
        raise ValueError(f"mode index {k} out of range for n={state.n}")
    bit = 1 << k
    out: dict[int, complex] = {}
    for mask, amp in state.amplitudes.items():
        if mask & bit:
            continue
        out[mask | bit] = _sign_below(mask, k) * amp
    new_N = None if state.fixed_N is None else state.fixed_N + 1
    return PureState(state.n, out, new_N)


def apply_annihilation(state: PureState, k: int) -> PureState:
    """c_k applied termwise; the matrix adjoint of apply_creation."""
    if not 0 <= k < state.n:
        raise ValueError(f"mode index {k} out of range for n={state.n}")
    bit = 1 << k
    out: dict[int, complex] = {}
    for mask, amp in state.amplitudes.items():
        if not mask & bit:
            continue
        out[mask & ~bit] = _sign_below(mask, k) * amp
    new_N = None if state.fixed_N is None else state.fixed_N - 1
    return PureState(state.n, out, new_N)


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in a."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    if len(a.amplitudes) > len(b.amplitudes):
        return complex(np.conj(inner_product(b, a)))
    total = 0.0 + 0.0j
    for mask, amp in a.amplitudes.items():
        other = b.amplitudes.get(mask)
        if other is not None:
            total += np.conj(amp) * other
    return complex(total)


def superpose(terms, n: int, fixed_N: int | None = None) -> PureState:
    """Linear combination sum(c * state) of states on the same mode count."""
    out: dict[int, complex] = {}
    for coeff, state in terms:
        if state.n != n:
            raise ValueError("superpose: mismatched mode counts")
        for mask, amp in state.amplitudes.items():
            out[mask] = out.get(mask, 0.0 + 0.0j) + coeff * amp
    return PureState(n, out, fixed_N)


def scale(state: PureState, c: complex) -> PureState:
    return PureState(
        state.n, {m: c * a for m, a in state.amplitudes.items()}, state.fixed_N
    )


def fixed_number_masks(n: int, N: int) -> list[int]:
    """All C(n, N) occupation masks, lexicographic in the ascending
    occupied-index tuples."""
    return [sum(1 << k for k in combo) for combo in combinations(range(n), N)]


def random_pure_state(n: int, N: int, seed: int) -> PureState:
    """Normalized state with i.i.d. complex-normal amplitudes over all
    C(n, N) masks.  Deterministic per seed."""
    if not 1 <= N <= n:
        raise ValueError(f"need 1 <= N <= n, got N={N}, n={n}")
    if n > 20:
        raise ValueError(f"n={n} exceeds the supported mode count 20")
    rng = np.random.default_rng(seed)
    masks = fixed_number_masks(n, N)
    amps = rng.standard_normal(len(masks)) + 1j * rng.standard_normal(len(masks))
    amps /= np.linalg.norm(amps)
    return PureState(n, {m: complex(a) for m, a in zip(masks, amps)}, fixed_N=N)


def reference_slater_determinant(n: int, N: int) -> PureState:
    """The determinant occupying modes 0..N-1."""
    if not 0 <= N <= n:
        raise ValueError(f"need 0 <= N <= n, got N={N}, n={n}")
    return basis_state(n, (1 << N) - 1)


def random_slater_determinant(n: int, N: int, seed: int) -> PureState:
    """Haar-random one-body rotation of the reference determinant."""
    from .gates import apply_one_body_unitary, haar_unitary

    if N > n:
        raise ValueError(f"need N <= n, got N={N}, n={n}")
    u = haar_unitary(n, np.random.default_rng(seed))
    return apply_one_body_unitary(reference_slater_determinant(n, N), u)


def ghz_like_state(n: int, N: int) -> PureState:
    """Equal superposition of m = n/N determinants in disjoint mode blocks.

    Its one-body density matrix is 1/m times the identity, the most mixed
    value attainable at this (n, N).
    """
    if N < 1 or n % N != 0:
        raise ValueError(f"n={n} must be a multiple of N={N}")
    m = n // N
    if m < 2:
        raise ValueError("need at least two blocks (n >= 2N)")
    amp = 1.0 / math.sqrt(m)
    block = (1 << N) - 1
    return PureState(
        n, {block << (N * l): amp + 0.0j for l in range(m)}, fixed_N=N
    )


@dataclass(frozen=True)
class MixedState:
    """Ensemble (weight, PureState) with normalized members.

    All members must share the mode count and the fermion number parity;
    if every member has fixed_N set, the numbers must coincide.
    """

    ensemble: tuple

    def __post_init__(self):
        members = tuple((float(w), psi) for w, psi in self.ensemble)
        if not members:
            raise ValueError("empty ensemble")
        total = sum(w for w, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"ensemble weights sum to {total}, expected 1")
        if any(w < -PRUNE_TOL for w, _ in members):
            raise ValueError("negative ensemble weight")
        n = members[0][1].n
        if any(psi.n != n for _, psi in members):
            raise ValueError("ensemble members disagree on mode count")
        parities = {psi.number_parity() for _, psi in members}
        if None in parities or len(parities) > 1:
            raise ValueError("ensemble members must share number parity")
        numbers = [psi.fixed_N for _, psi in members]
        if all(N is not None for N in numbers) and len(set(numbers)) > 1:
            raise ValueError("fixed-N ensemble members disagree on N")
        for _, psi in members:
            if not psi.is_normalized(1e-9):
                raise ValueError("ensemble member is not normalized")
        object.__setattr__(self, "ensemble", members)

    @property
    def n(self) -> int:
        return self.ensemble[0][1].n

    @property
    def fixed_N(self) -> int | None:
        numbers = {psi.fixed_N for _, psi in self.ensemble}
        if len(numbers) == 1:
            return numbers.pop()
        return None


def pure_ensemble(state: PureState) -> MixedState:
    return MixedState(((1.0, state),))
