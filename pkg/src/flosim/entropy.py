"""Schur-concave entanglement monotones over occupation spectra.

A trace-form entropy sums a concave f with f(0) = f(1) = 0 over the
one-body occupations, so it vanishes exactly on determinants and never
increases, on average, under the free channels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spdm import OneBodyDM, as_sorted_values, extended_dm, spectrum
from .states import MixedState, PureState, scale, superpose

_GRID = np.linspace(0.0, 1.0, 101)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


@dataclass(frozen=True)
class EntropyFunction:
    """Concave f on [0, 1] with f(0) = f(1) = 0, validated on construction
    by endpoint values and midpoint concavity over a 101-point grid."""

    fn: Callable
    name: str

    def __post_init__(self):
        vals = np.asarray(self.fn(_GRID), dtype=float)
        if abs(vals[0]) > 1e-12 or abs(vals[-1]) > 1e-12:
            raise ValueError(f"entropy function {self.name}: f(0), f(1) must vanish")
        mids = np.asarray(self.fn((_GRID[:, None] + _GRID[None, :]) / 2.0))
        if np.min(mids - (vals[:, None] + vals[None, :]) / 2.0) < -1e-12:
            raise ValueError(f"entropy function {self.name} is not concave")

    def __call__(self, x):
        return self.fn(x)


VON_NEUMANN = EntropyFunction(lambda x: -_xlog2x(x), "vn")
LINEAR = EntropyFunction(lambda x: np.asarray(x) * (1.0 - np.asarray(x)), "linear")

BUILTIN_ENTROPIES = {"vn": VON_NEUMANN, "linear": LINEAR}


def trace_form_entropy(spec, f: EntropyFunction) -> float:
    """sum_nu f(lambda_nu) over a spectrum, entries clamped to [0, 1]."""
    vals = np.clip(as_sorted_values(spec), 0.0, 1.0)
    return float(np.sum(f(vals)))


def binary_entropy(p) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    return -_xlog2x(p) - _xlog2x(1.0 - p)


def one_body_entropy_s1(rho: OneBodyDM) -> float:
    """Sum of binary entropies of the occupations; equals the von Neumann
    entropy of the extended 2n x 2n density matrix."""
    vals = np.clip(spectrum(rho).values, 0.0, 1.0)
    return float(np.sum(binary_entropy(vals)))


def extended_trace_form_entropy(rho: OneBodyDM, f: EntropyFunction) -> float:
    """Trace-form entropy of diag(rho, 1 - rho^T): comparable across
    different particle numbers."""
    return trace_form_entropy(spectrum(extended_dm(rho)), f)


def one_body_entanglement(state, f: EntropyFunction = VON_NEUMANN) -> float:
    """Trace-form entropy of the one-body density matrix of a pure state.

    Zero exactly when the state is a determinant.
    """
    from .spdm import compute_spdm

    rho = compute_spdm(state)
    return trace_form_entropy(spectrum(rho), f)


def convex_roof_upper_bound(
    rho: MixedState,
    f: EntropyFunction = VON_NEUMANN,
    trials: int = 200,
    seed: int = 0,
) -> float:
    """Heuristic upper bound on the convex-roof extension.

    The given ensemble is remixed by Haar-random unitaries on the
    ensemble-label space (every decomposition of rho arises this way) and
    the smallest average member entanglement seen is returned.  This is an
    upper bound on the true roof value, nonincreasing in `trials`; no claim
    of attainment is made.
    """
    from .gates import haar_unitary

    weighted = [
        scale(psi, np.sqrt(w)) for w, psi in rho.ensemble if w > 1e-15
    ]
    m = len(weighted)
    n = rho.n

    def ensemble_value(members) -> float:
        total = 0.0
        for phi in members:
            q = phi.norm() ** 2
            if q < 1e-12:
                continue
            total += q * one_body_entanglement(phi.normalize(), f)
        return total

    best = ensemble_value(weighted)
    if m == 1:
        return best
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        w = haar_unitary(m, rng)
        remixed = [
            superpose(
                [(w[beta, alpha], weighted[alpha]) for alpha in range(m)],
                n,
                fixed_N=rho.fixed_N,
            )
            for beta in range(m)
        ]
        best = min(best, ensemble_value(remixed))
    return best
