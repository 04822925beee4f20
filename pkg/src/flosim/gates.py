"""Number-conserving one-body unitaries and their gate decomposition.

Any n x n unitary acting on mode space factors into two-mode beamsplitter
rotations and single-mode phase shifts.  Each gate updates the sparse Fock
amplitudes directly, so applying a unitary costs O(n^2) sparse passes
instead of a 2^n x 2^n exponential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import PureState

UNITARITY_TOL = 1e-10
DECOMPOSITION_TOL = 1e-10


@dataclass(frozen=True)
class OneBodyUnitary:
    """Mode-space unitary U; the Fock-space action sends c†_k to
    sum_k' U[k', k] c†_k'."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("unitary must be a square matrix")
        err = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if err > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (deviation {err:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PhaseGate:
    """exp(-i phi c†_k c_k): multiplies occupied-k amplitudes by e^{-i phi}."""

    k: int
    phi: float


@dataclass(frozen=True)
class BeamSplitterGate:
    """exp(-i theta (c†_k c_k' + c†_k' c_k)): 2x2 block
    [[cos t, -i sin t], [-i sin t, cos t]] on modes (k, k')."""

    k: int
    kp: int
    theta: float


Gate = PhaseGate | BeamSplitterGate


def phase_shifter(n: int, k: int, phi: float) -> OneBodyUnitary:
    if not 0 <= k < n:
        raise ValueError(f"mode index {k} out of range for n={n}")
    mat = np.eye(n, dtype=complex)
    mat[k, k] = np.exp(-1j * phi)
    return OneBodyUnitary(mat)


def beam_splitter(n: int, k: int, kp: int, theta: float) -> OneBodyUnitary:
    if k == kp:
        raise ValueError("beam splitter needs two distinct modes")
    for idx in (k, kp):
        if not 0 <= idx < n:
            raise ValueError(f"mode index {idx} out of range for n={n}")
    mat = np.eye(n, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    mat[k, k] = c
    mat[kp, kp] = c
    mat[k, kp] = -1j * s
    mat[kp, k] = -1j * s
    return OneBodyUnitary(mat)


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    if isinstance(gate, PhaseGate):
        return phase_shifter(n, gate.k, gate.phi).matrix
    return beam_splitter(n, gate.k, gate.kp, gate.theta).matrix


def _two_mode_gates(v: np.ndarray, a: int, b: int) -> list:
    """Gates realizing an arbitrary 2x2 unitary v on modes (a, b):
    diag(e^{i alpha}, e^{i beta}) . BS(theta) . diag(e^{i gamma}, e^{i delta}).
    """
    theta = math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    cos_small = abs(v[0, 0]) < 1e-14
    sin_small = abs(v[1, 0]) < 1e-14
    alpha = 0.0
    if sin_small:
        gamma = float(np.angle(v[0, 0]))
        beta = 0.0
        delta = float(np.angle(v[1, 1]))
    elif cos_small:
        gamma = 0.0
        delta = float(np.angle(v[0, 1])) + math.pi / 2
        beta = float(np.angle(v[1, 0])) + math.pi / 2
    else:
        gamma = float(np.angle(v[0, 0]))
        delta = float(np.angle(v[0, 1])) + math.pi / 2
        beta = float(np.angle(v[1, 0])) + math.pi / 2 - gamma
    gates = [
        PhaseGate(a, -alpha),
        PhaseGate(b, -beta),
        BeamSplitterGate(a, b, theta),
        PhaseGate(a, -gamma),
        PhaseGate(b, -delta),
    ]
    return [g for g in gates if not (isinstance(g, PhaseGate) and abs(g.phi) < 1e-15)]


def decompose_unitary(u) -> list:
    """Triangular elimination of U into phase and beamsplitter gates.

    The returned list multiplies back to U (left to right, as matrices)
    within DECOMPOSITION_TOL in max norm; a failure to reconstruct raises.
    """
    mat = np.array(getattr(u, "matrix", u), dtype=complex)
    n = mat.shape[0]
    work = mat.copy()
    rotations = []
    for col in range(n):
        for row in range(n - 1, col, -1):
            x, y = work[row - 1, col], work[row, col]
            r = math.hypot(abs(x), abs(y))
            if abs(y) < 1e-14:
                continue
            # 2x2 unitary g with g @ [x, y] = [r, 0]
            g = np.array(
                [[np.conj(x), np.conj(y)], [-y, x]], dtype=complex
            ) / r
            work[row - 1 : row + 1, :] = g @ work[row - 1 : row + 1, :]
            rotations.append((row - 1, row, g))
    # work is now diagonal unitary; U = (product of g†) . diag
    gates: list = []
    for a, b, g in rotations:
        gates.extend(_two_mode_gates(g.conj().T, a, b))
    for k in range(n):
        phi = -float(np.angle(work[k, k]))
        if abs(phi) > 1e-15:
            gates.append(PhaseGate(k, phi))
    rebuilt = np.eye(n, dtype=complex)
    for gate in gates:
        rebuilt = rebuilt @ gate_matrix(gate, n)
    err = float(np.max(np.abs(rebuilt - mat)))
    if err > DECOMPOSITION_TOL:
        raise ArithmeticError(f"gate decomposition failed to reconstruct ({err:.3e})")
    return gates


def _apply_phase(state: PureState, gate: PhaseGate) -> PureState:
    bit = 1 << gate.k
    factor = np.exp(-1j * gate.phi)
    amps = {
        m: (a * factor if m & bit else a) for m, a in state.amplitudes.items()
    }
    return PureState(state.n, amps, state.fixed_N)


def _apply_beam_splitter(state: PureState, gate: BeamSplitterGate, u2: np.ndarray) -> PureState:
    a, b = (gate.k, gate.kp) if gate.k < gate.kp else (gate.kp, gate.k)
    if a == gate.kp:
        # orient the 2x2 block to ascending (a, b)
        u2 = u2[::-1, ::-1]
    bit_a, bit_b = 1 << a, 1 << b
    between = ((1 << b) - 1) & ~((1 << (a + 1)) - 1)
    det = u2[0, 0] * u2[1, 1] - u2[0, 1] * u2[1, 0]
    out: dict[int, complex] = {}

    def add(mask, amp):
        out[mask] = out.get(mask, 0.0 + 0.0j) + amp

    for mask, amp in state.amplitudes.items():
        occ_a, occ_b = bool(mask & bit_a), bool(mask & bit_b)
        if occ_a == occ_b:
            add(mask, amp * det if occ_a else amp)
            continue
        # crossing the modes occupied strictly between a and b flips the sign
        sign = -1.0 if (mask & between).bit_count() & 1 else 1.0
        if occ_a:
            add(mask, u2[0, 0] * amp)
            add(mask ^ bit_a ^ bit_b, u2[1, 0] * sign * amp)
        else:
            add(mask, u2[1, 1] * amp)
            add(mask ^ bit_a ^ bit_b, u2[0, 1] * sign * amp)
    return PureState(state.n, out, state.fixed_N)


def apply_gate(state: PureState, gate: Gate) -> PureState:
    if isinstance(gate, PhaseGate):
        return _apply_phase(state, gate)
    c, s = math.cos(gate.theta), math.sin(gate.theta)
    u2 = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return _apply_beam_splitter(state, gate, u2)


def apply_one_body_unitary(state: PureState, u) -> PureState:
    """Fock-space image of the state under a mode-space unitary.

    The occupation spectrum of the one-body density matrix is invariant
    under this map, and determinants stay determinants.
    """
    if not isinstance(u, OneBodyUnitary):
        u = OneBodyUnitary(np.asarray(u, dtype=complex))
    if u.n != state.n:
        raise ValueError(f"unitary is {u.n}x{u.n} but the state has n={state.n}")
    gates = decompose_unitary(u)
    # rightmost factor acts first
    for gate in reversed(gates):
        state = apply_gate(state, gate)
    return state


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via the QR of a complex Ginibre matrix."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
