"""Measurement channels: the free set and one deliberately non-free op.

Free measurements (mode occupation, its generalized two-operator variant,
the particle ladder pair, and determinant-basis readout) never increase,
on average, the mixedness of the one-body density matrix.  The two-mode
joint occupation measurement is provided as the boundary witness: its
middle branch can carry a determinant into an entangled state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import OneBodyUnitary, apply_one_body_unitary
from .spdm import ExtendedDM, OneBodyDM, compute_spdm, extended_dm
from .states import (
    MixedState,
    PureState,
    apply_annihilation,
    apply_creation,
    superpose,
)

P_FLOOR = 1e-12

FREE_MEASUREMENTS = (
    "measure_occupation",
    "measure_generalized",
    "measure_ladder",
    "measure_sd_basis",
)
NON_FREE_MEASUREMENTS = ("measure_two_mode_joint",)


@dataclass(frozen=True)
class MeasurementOutcome:
    label: str
    probability: float
    post_state: object  # PureState | MixedState | None
    post_spdm: OneBodyDM | None
    post_extended: ExtendedDM | None


@dataclass(frozen=True)
class GeneralizedMkParams:
    """Coefficients of the operator pair alpha*P_k + beta*(1 - P_k) and
    gamma*P_k + delta*(1 - P_k); completeness requires the two column
    norms |alpha|^2 + |gamma|^2 and |beta|^2 + |delta|^2 to equal 1."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name, value in (
            ("alpha/gamma", abs(self.alpha) ** 2 + abs(self.gamma) ** 2),
            ("beta/delta", abs(self.beta) ** 2 + abs(self.delta) ** 2),
        ):
            if abs(value - 1.0) > 1e-12:
                raise ValueError(
                    f"column norm {name} is {value}, must equal 1"
                )


def random_generalized_params(rng, equal_moduli: bool = False) -> GeneralizedMkParams:
    """Random valid parameter set; with equal_moduli, |alpha| = |beta|
    (the equality edge of the averaged-spectrum bound)."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    if equal_moduli:
        t = np.sqrt(rng.uniform(0.0, 1.0))
        phases = np.exp(2j * np.pi * rng.uniform(size=4))
        s = np.sqrt(1.0 - t * t)
        return GeneralizedMkParams(
            t * phases[0], t * phases[1], s * phases[2], s * phases[3]
        )
    col1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    col2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    col1 /= np.linalg.norm(col1)
    col2 /= np.linalg.norm(col2)
    return GeneralizedMkParams(col1[0], col2[0], col1[1], col2[1])


def project_occupation(state: PureState, k: int, occupied: bool) -> PureState:
    """Unnormalized component with mode k occupied (or empty)."""
    if not 0 <= k < state.n:
        raise ValueError(f"mode index {k} out of range for n={state.n}")
    bit = 1 << k
    amps = {
        m: a
        for m, a in state.amplitudes.items()
        if bool(m & bit) == occupied
    }
    return PureState(state.n, amps, state.fixed_N)


def _finalize(label: str, prob: float, post) -> MeasurementOutcome:
    if prob < P_FLOOR or post is None:
        return MeasurementOutcome(label, max(prob, 0.0), None, None, None)
    rho = compute_spdm(post)
    return MeasurementOutcome(label, prob, post, rho, extended_dm(rho))


def _kraus_outcome(state, label: str, kraus) -> MeasurementOutcome:
    """Branch produced by one Kraus map (a function on pure states)."""
    if isinstance(state, MixedState):
        survivors = []
        prob = 0.0
        for w, psi in state.ensemble:
            phi = kraus(psi)
            p_member = phi.norm() ** 2
            prob += w * p_member
            if w * p_member > P_FLOOR:
                survivors.append((w * p_member, phi.normalize()))
        if prob < P_FLOOR or not survivors:
            return _finalize(label, prob, None)
        post = MixedState(tuple((wp / prob, phi) for wp, phi in survivors))
        return _finalize(label, prob, post)
    phi = kraus(state)
    prob = phi.norm() ** 2
    if prob < P_FLOOR:
        return _finalize(label, prob, None)
    return _finalize(label, prob, phi.normalize())


def measure_occupation(state, k: int) -> list:
    """Projective occupation readout of mode k: branches 'occupied' and
    'empty' with Born probabilities summing to one."""
    return [
        _kraus_outcome(state, "occupied", lambda psi: project_occupation(psi, k, True)),
        _kraus_outcome(state, "empty", lambda psi: project_occupation(psi, k, False)),
    ]


def measure_generalized(state, k: int, params: GeneralizedMkParams) -> list:
    """Two-outcome measurement mixing the occupied and empty components of
    mode k with the given coefficients."""

    def mk(psi: PureState) -> PureState:
        return superpose(
            [
                (params.alpha, project_occupation(psi, k, True)),
                (params.beta, project_occupation(psi, k, False)),
            ],
            psi.n,
            fixed_N=psi.fixed_N,
        )

    def mkbar(psi: PureState) -> PureState:
        return superpose(
            [
                (params.gamma, project_occupation(psi, k, True)),
                (params.delta, project_occupation(psi, k, False)),
            ],
            psi.n,
            fixed_N=psi.fixed_N,
        )

    return [
        _kraus_outcome(state, "mk", mk),
        _kraus_outcome(state, "mkbar", mkbar),
    ]


def measure_ladder(state, k: int) -> list:
    """Measurement with the annihilator and creator of mode k as the two
    operators; branches carry N-1 and N+1 fermions.  Composing it with
    itself reproduces the occupation measurement."""
    return [
        _kraus_outcome(state, "removed", lambda psi: apply_annihilation(psi, k)),
        _kraus_outcome(state, "added", lambda psi: apply_creation(psi, k)),
    ]


def measure_sd_basis(state, u) -> list:
    """Occupation readout of every mode in the rotated basis: one branch
    per occupation mask, each post state a rotated basis determinant."""
    if not isinstance(u, OneBodyUnitary):
        u = OneBodyUnitary(np.asarray(u, dtype=complex))
    u_dag = OneBodyUnitary(u.matrix.conj().T)
    members = (
        state.ensemble if isinstance(state, MixedState) else ((1.0, state),)
    )
    weights: dict[int, float] = {}
    for w, psi in members:
        rotated = apply_one_body_unitary(psi, u_dag)
        for mask, amp in rotated.amplitudes.items():
            weights[mask] = weights.get(mask, 0.0) + w * abs(amp) ** 2
    outcomes = []
    for mask in sorted(weights):
        prob = weights[mask]
        if prob < P_FLOOR:
            outcomes.append(MeasurementOutcome(str(mask), prob, None, None, None))
            continue
        collapsed = PureState(
            state.n, {mask: 1.0 + 0.0j}, fixed_N=int(mask).bit_count()
        )
        post = apply_one_body_unitary(collapsed, u)
        outcomes.append(_finalize(str(mask), prob, post))
    return outcomes


def measure_two_mode_joint(state, k: int, kp: int) -> list:
    """Simultaneous occupation readout of two modes, coarse-grained to the
    total count 0, 1 or 2.  NOT a free operation: the 'one' branch sums two
    projector products and can generate one-body entanglement."""
    if k == kp:
        raise ValueError("two-mode measurement needs distinct modes")

    def count_is(psi: PureState, want: int) -> PureState:
        bits = (1 << k) | (1 << kp)
        amps = {
            m: a
            for m, a in psi.amplitudes.items()
            if (m & bits).bit_count() == want
        }
        return PureState(psi.n, amps, psi.fixed_N)

    return [
        _kraus_outcome(state, "neither", lambda psi: count_is(psi, 0)),
        _kraus_outcome(state, "one", lambda psi: count_is(psi, 1)),
        _kraus_outcome(state, "both", lambda psi: count_is(psi, 2)),
    ]


def _as_complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        return complex(float(z[0]), float(z[1]))
    return complex(z)


def _unitary_everywhere(state, u) -> object:
    if isinstance(state, MixedState):
        return MixedState(
            tuple((w, apply_one_body_unitary(psi, u)) for w, psi in state.ensemble)
        )
    return apply_one_body_unitary(state, u)


def apply_channel(state, descriptor: dict) -> list:
    """Dispatch a JSON-style op descriptor; unitaries come back as a single
    certain outcome so callers can treat everything uniformly."""
    op = descriptor.get("op")
    if op == "measure_occupation":
        return measure_occupation(state, int(descriptor["k"]))
    if op == "measure_generalized":
        a, b, g, d = (_as_complex(z) for z in descriptor["params"])
        return measure_generalized(state, int(descriptor["k"]), GeneralizedMkParams(a, b, g, d))
    if op == "measure_ladder":
        return measure_ladder(state, int(descriptor["k"]))
    if op == "measure_sd_basis":
        return measure_sd_basis(state, np.asarray(descriptor["matrix"], dtype=complex))
    if op == "measure_two_mode_joint":
        return measure_two_mode_joint(state, int(descriptor["k"]), int(descriptor["kp"]))
    if op == "unitary":
        u = np.asarray(descriptor["matrix"], dtype=complex)
        return [_finalize("applied", 1.0, _unitary_everywhere(state, u))]
    if op == "phase":
        from .gates import phase_shifter

        u = phase_shifter(state.n, int(descriptor["k"]), float(descriptor["phi"]))
        return [_finalize("applied", 1.0, _unitary_everywhere(state, u))]
    if op == "beam_splitter":
        from .gates import beam_splitter

        u = beam_splitter(
            state.n,
            int(descriptor["k"]),
            int(descriptor["kp"]),
            float(descriptor["theta"]),
        )
        return [_finalize("applied", 1.0, _unitary_everywhere(state, u))]
    raise ValueError(f"unknown op descriptor {op!r}")


def is_free_descriptor(descriptor: dict) -> bool:
    op = descriptor.get("op")
    return op in FREE_MEASUREMENTS or op in ("unitary", "phase", "beam_splitter")
