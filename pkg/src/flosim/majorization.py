"""Majorization partial order on sorted occupation spectra.

x < y (x majorized by y) holds when every leading partial sum of y
dominates the matching partial sum of x and the totals agree.  A more
majorized spectrum is less mixed; determinants sit at the top of the order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spdm import SortedSpectrum, as_sorted_values

DEFAULT_SLACK = 1e-9
DEFAULT_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class MajorizationVerdict:
    holds: bool
    worst_margin: float
    trace_gap: float
    partial_margins: np.ndarray
    slack: float = DEFAULT_SLACK
    trace_tol: float = DEFAULT_TRACE_TOL

    def to_dict(self) -> dict:
        return {
            "holds": bool(self.holds),
            "worst_margin": float(self.worst_margin),
            "trace_gap": float(self.trace_gap),
            "partial_margins": [float(v) for v in self.partial_margins],
        }


def _pad_pair(a: np.ndarray, b: np.ndarray):
    size = max(len(a), len(b))
    return (
        np.pad(a, (0, size - len(a))),
        np.pad(b, (0, size - len(b))),
    )


def majorizes(
    y,
    x,
    slack: float = DEFAULT_SLACK,
    trace_tol: float = DEFAULT_TRACE_TOL,
) -> MajorizationVerdict:
    """Verdict on x < y: partial sums of y dominate those of x within slack
    and the totals agree within trace_tol.

    Shorter inputs are zero-padded.  The margins cover m = 1 .. len-1; the
    final (total) sum is reported separately as trace_gap.
    """
    yv, xv = _pad_pair(as_sorted_values(y), as_sorted_values(x))
    cy = np.cumsum(yv)
    cx = np.cumsum(xv)
    margins = cy[:-1] - cx[:-1]
    worst = float(np.min(margins)) if len(margins) else float("inf")
    trace_gap = float(abs(cy[-1] - cx[-1])) if len(cy) else 0.0
    holds = worst >= -slack and trace_gap <= trace_tol
    return MajorizationVerdict(holds, worst, trace_gap, margins, slack, trace_tol)


def average_spectrum(outcomes) -> SortedSpectrum:
    """Probability-weighted componentwise sum of descending spectra.

    A convex combination of descending vectors is descending, so no
    re-sorting is needed.
    """
    probs = np.array([float(p) for p, _ in outcomes])
    if np.any(probs < -1e-12):
        raise ValueError("negative outcome probability")
    if abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {probs.sum()}, expected 1")
    vecs = [as_sorted_values(spec) for _, spec in outcomes]
    size = max(len(v) for v in vecs)
    total = np.zeros(size)
    for p, v in zip(probs, vecs):
        total[: len(v)] += p * v
    return SortedSpectrum(total)


def union_spectra(a, b) -> SortedSpectrum:
    """Merged multiset of two spectra, descending."""
    av = as_sorted_values(a)
    bv = as_sorted_values(b)
    return SortedSpectrum.from_values(np.concatenate([av, bv]))


def complement_spectrum(x) -> SortedSpectrum:
    """Entrywise 1 - x, re-sorted descending; entries must lie in [0, 1]."""
    xv = as_sorted_values(x)
    if np.any(xv < -1e-10) or np.any(xv > 1.0 + 1e-10):
        raise ValueError("spectrum entries must lie in [0, 1]")
    return SortedSpectrum((1.0 - xv)[::-1].copy())
