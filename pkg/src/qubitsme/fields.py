"""Driving-field models: vacuum, single-photon wavepacket, cat states.

The single-photon pulse shape is the normalized Gaussian

    xi(t) = (W^2 / 2 pi)^(1/4) exp(-(W^2/4) (t - t_c)^2)

with bandwidth W and peak arrival time t_c.  Cat inputs are superpositions
sum_j s_j |alpha_j> of coherent states with piecewise-constant amplitude
functions alpha_j; their overlaps

    g_ij = <alpha_i|alpha_j>
         = exp(-||alpha_i||^2/2 - ||alpha_j||^2/2 + <alpha_i, alpha_j>)

are evaluated in closed form (segment products times overlap durations),
and the weights are rescaled so that sum_ij s_i* s_j g_ij = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError


@dataclass(frozen=True)
class GaussianWavepacket:
    """Single-photon pulse shape; bandwidth > 0, peak time t_c."""

    bandwidth: float
    t_peak: float

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise InvalidInputError("wavepacket bandwidth must be > 0")

    def __call__(self, t):
        w2 = self.bandwidth * self.bandwidth
        norm = (w2 / (2.0 * math.pi)) ** 0.25
        return norm * np.exp(-(w2 / 4.0) * (t - self.t_peak) ** 2)


def wavepacket_value(w: GaussianWavepacket, t: float) -> complex:
    """Value of the (real, positive) Gaussian wavepacket at time t."""
    return complex(w(t))


@dataclass(frozen=True)
class PulseAmplitude:
    """Piecewise-constant complex amplitude; zero outside all segments.

    segments: sorted, non-overlapping (t_start, t_end, value) triples.
    """

    segments: tuple = ()

    def __post_init__(self):
        segs = tuple((float(t0), float(t1), complex(v))
                     for t0, t1, v in self.segments)
        prev_end = -math.inf
        for t0, t1, _ in segs:
            if t1 <= t0:
                raise InvalidInputError(f"empty segment ({t0}, {t1})")
            if t0 < prev_end:
                raise InvalidInputError("segments overlap or are unsorted")
            prev_end = t1
        object.__setattr__(self, "segments", segs)

    @classmethod
    def pulse(cls, t0: float, t1: float, value: complex) -> "PulseAmplitude":
        return cls(((t0, t1, value),))

    @classmethod
    def zero(cls) -> "PulseAmplitude":
        return cls(())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for t0, t1, v in self.segments:
            out[(t >= t0) & (t < t1)] = v
        return out if out.ndim else complex(out)

    def norm_squared(self) -> float:
        """||alpha||^2 = integral |alpha(s)|^2 ds, exactly."""
        return sum((t1 - t0) * (v.real * v.real + v.imag * v.imag)
                   for t0, t1, v in self.segments)


def _segment_inner(a: PulseAmplitude, b: PulseAmplitude) -> complex:
    """<a, b> = integral a*(s) b(s) ds over the overlap of the segments."""
    total = 0.0 + 0.0j
    for a0, a1, av in a.segments:
        for b0, b1, bv in b.segments:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi > lo:
                total += (hi - lo) * av.conjugate() * bv
    return total


def coherent_overlap(alpha_i: PulseAmplitude, alpha_j: PulseAmplitude) -> complex:
    """Overlap g_ij of two coherent states with the given amplitudes."""
    inner = _segment_inner(alpha_i, alpha_j)
    return complex(np.exp(-0.5 * alpha_i.norm_squared()
                          - 0.5 * alpha_j.norm_squared()
                          + inner))


def overlap_matrix(amplitudes) -> np.ndarray:
    n = len(amplitudes)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[i, j] = coherent_overlap(amplitudes[i], amplitudes[j])
    return g


def normalize_cat_weights(raw_s, g: np.ndarray):
    """Rescale branch weights so that sum_ij s_i* s_j g_ij = 1.

    Returns (s, N_a) with N_a = sum_i |s_i|^2.  The scaling is projective:
    multiplying raw_s by any positive constant leaves the result unchanged.
    """
    s = np.asarray(raw_s, dtype=complex)
    norm = np.einsum("i,ij,j->", s.conj(), np.asarray(g, dtype=complex), s)
    if not (norm.real > 0) or abs(norm.imag) > 1e-12 * max(1.0, norm.real):
        raise InvalidInputError(f"cat normalization sum {norm} is not positive")
    s = s / math.sqrt(norm.real)
    na = float(np.vdot(s, s).real)
    return s, na


@dataclass(frozen=True)
class VacuumInput:
    """The field carries no photons."""


@dataclass(frozen=True)
class SinglePhotonInput:
    """One photon in the given wavepacket."""

    wavepacket: GaussianWavepacket


@dataclass(frozen=True)
class CatStateInput:
    """Normalized superposition of coherent states.

    weights and overlaps satisfy sum_ij s_i* s_j g_ij = 1; branch_weights
    holds |s_l|^2 / N_a, the diagonal weights appearing in the filters'
    shared correction sums.
    """

    weights: np.ndarray
    amplitudes: tuple
    overlaps: np.ndarray = field(repr=False)
    n_a: float

    @classmethod
    def from_raw(cls, raw_weights, amplitudes) -> "CatStateInput":
        amplitudes = tuple(amplitudes)
        if len(raw_weights) != len(amplitudes):
            raise InvalidInputError("one weight per branch amplitude required")
        g = overlap_matrix(amplitudes)
        s, na = normalize_cat_weights(raw_weights, g)
        return cls(weights=s, amplitudes=amplitudes, overlaps=g, n_a=na)

    @property
    def n_branches(self) -> int:
        return len(self.amplitudes)

    @property
    def branch_weights(self) -> np.ndarray:
        """|s_l|^2 / N_a for each branch."""
        s = self.weights
        return (s.conj() * s).real / self.n_a

    def amplitude_values(self, t) -> np.ndarray:
        """alpha_l(t) for every branch; shape (n_branches,) + shape(t)."""
        return np.array([a(t) for a in self.amplitudes])
