"""Window recovery from deck data by phase propagation.

Given only the transforms of the order-1 and order-2 deck functions (which the
2- and 3-point correlations determine), the Fourier phase of the window
indicator satisfies

    phi(k1 + k2) = phi(k1) phi(k2) psi2(k1, k2)

on the set D2 of frequency pairs avoiding extinctions.  Any solution differs
from the true phase by a character, i.e. by a translation of the window.  The
solver here constructs one solution:

* phi(0) = 1, and the smallest usable frequency is seeded with phase 1
  (a pure gauge choice; without a seed nothing propagates, since every
  relation needs two already-known phases);
* frequencies are assigned in order of increasing |k|, each from the known
  decomposition maximizing the smallest modulus in the triple (divisions by
  near-extinct values are avoided);
* each assignment tracks an integer grading (net seed usage), and at the end
  a single holonomy measurement rescales the seed so the solution becomes
  phi_true * (exact grid character).  After that the functional equation
  holds on every triple, wrap-around included, and recovery lands on an
  integer cell shift.

Frequencies with no admissible decomposition stay unknown and are counted;
a partial result is legitimate output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError, ReconstructionError
from .spectra import DeckGrid

#: default extinction threshold, as a fraction of the largest |F|
EPS_ZERO_FACTOR = 1e-4

#: rounding band counted as "uncertain" cells in reports
UNCERTAIN_BAND = (0.35, 0.65)


@dataclass(frozen=True)
class PhaseQuotient:
    """psi2 on the admissible pairs D2, plus the moduli it was built from.

    Built from deck transforms only: |F| = sqrt(I1hat), never the true phase.
    """

    M: int
    l_half: float
    absF: np.ndarray
    values: np.ndarray   # complex, meaningful where mask is True
    mask: np.ndarray     # D2 as a boolean M x M grid
    eps_zero: float

    @property
    def D(self) -> np.ndarray:
        return self.absF >= self.eps_zero


@dataclass(frozen=True)
class PhaseField:
    """Recovered phases on the frequency grid; unknown entries are zero."""

    M: int
    l_half: float
    phi: np.ndarray
    known: np.ndarray
    eps_zero: float
    grading: np.ndarray

    @property
    def unknown_count(self) -> int:
        return int(self.M - np.count_nonzero(self.known))


def phase_quotient(deck: DeckGrid, eps_zero: float | None = None) -> PhaseQuotient:
    """The unit-modulus quotient psi2 = I2hat / (|F| |F| |F|) on D2."""
    absF = np.sqrt(np.clip(deck.I1hat.real, 0.0, None))
    if eps_zero is None:
        eps_zero = EPS_ZERO_FACTOR * absF.max()
    if eps_zero <= 0:
        raise ParameterError("eps_zero must be positive")
    D = absF >= eps_zero
    if np.count_nonzero(D) <= 1:
        raise DegenerateInputError("no usable frequencies beyond k = 0")
    M = deck.M
    idx = (np.arange(M)[:, None] + np.arange(M)[None, :]) % M
    mask = D[:, None] & D[None, :] & D[idx]
    denom = absF[:, None] * absF[None, :] * absF[idx]
    values = np.zeros((M, M), dtype=complex)
    values[mask] = deck.I2hat[mask] / denom[mask]
    return PhaseQuotient(M, deck.l_half, absF, values, mask, float(eps_zero))


def _order_by_abs_k(M: int) -> np.ndarray:
    """Frequency indices sorted by (|signed index|, -signed index): 0, 1, -1, 2, ..."""
    m = np.arange(M)
    s = np.where(m <= M // 2, m, m - M)
    return np.array(sorted(m, key=lambda i: (abs(int(s[i])), -int(s[i]))))


def propagate_phase(absF: np.ndarray, psi2: PhaseQuotient,
                    eps_zero: float | None = None) -> PhaseField:
    """Solve the phase functional equation by ordered assignment.

    Deterministic: fixed processing order (increasing |k|), fixed tie-breaks.
    Returns a partial field when some frequencies admit no decomposition.
    """
    M = psi2.M
    if eps_zero is None:
        eps_zero = psi2.eps_zero
    D = absF >= eps_zero
    if not D[0]:
        raise DegenerateInputError("the zero frequency is below eps_zero")

    phi = np.zeros(M, dtype=complex)
    known = np.zeros(M, dtype=bool)
    grading = np.zeros(M, dtype=np.int64)
    phi[0] = 1.0
    known[0] = True

    order = _order_by_abs_k(M)
    seed = next((int(m) for m in order if m != 0 and D[m]), None)
    if seed is not None:
        phi[seed] = 1.0
        known[seed] = True
        grading[seed] = 1

    all_m1 = np.arange(M)
    changed = True
    while changed:
        changed = False
        for m in order:
            m = int(m)
            if known[m] or not D[m]:
                continue
            m2 = (m - all_m1) % M
            ok = known & known[m2] & psi2.mask[all_m1, m2]
            if not ok.any():
                continue
            cand = all_m1[ok]
            score = np.minimum(absF[cand], absF[m2[cand]])
            j = int(np.argmax(score))  # first maximizer: deterministic tie-break
            m1 = int(cand[j])
            mm2 = int(m2[m1])
            phi[m] = phi[m1] * phi[mm2] * psi2.values[m1, mm2]
            phi[m] /= abs(phi[m])
            grading[m] = grading[m1] + grading[mm2]
            known[m] = True
            changed = True

    phi = _normalize_gauge(phi, known, grading, absF, psi2)
    return PhaseField(M, psi2.l_half, phi, known, float(eps_zero), grading)


def _normalize_gauge(phi, known, grading, absF, psi2: PhaseQuotient):
    """Rescale the seed gauge so the solution is an exact grid character times the truth.

    Relations whose gradings do not add up expose the holonomy w^dc of the
    seed value w around the frequency circle; dc is always a multiple of the
    grid order along reachable relations.  One measurement fixes it.
    """
    M = len(phi)
    kd = np.nonzero(known)[0]
    if len(kd) < 2:
        return phi
    g = grading[kd]
    sums = (kd[:, None] + kd[None, :]) % M
    valid = known[sums] & psi2.mask[kd[:, None], kd[None, :]]
    dc = g[:, None] + g[None, :] - grading[sums]
    valid &= dc != 0
    if not valid.any():
        return phi
    score = np.minimum(np.minimum(absF[kd][:, None], absF[kd][None, :]), absF[sums])
    score = np.where(valid, score, -1.0)
    # smallest |dc| first, then the best-conditioned relation
    absdc = np.where(valid, np.abs(dc), np.iinfo(np.int64).max)
    best_abs = absdc.min()
    cand = absdc == best_abs
    score = np.where(cand, score, -1.0)
    i, j = np.unravel_index(int(np.argmax(score)), score.shape)
    m1, m2 = int(kd[i]), int(kd[j])
    m = (m1 + m2) % M
    delta = int(dc[i, j])
    defect = phi[m1] * phi[m2] * psi2.values[m1, m2] / phi[m]
    # defect = w^delta with w^M a root of unity to be absorbed; principal root
    eta = np.exp(-1j * np.angle(defect) / delta)
    out = np.where(known, phi * eta**grading, 0.0)
    mag = np.abs(out[known])
    out[known] /= mag
    return out


def reconstruct_window(absF: np.ndarray, phase: PhaseField,
                       min_known_frac: float = 0.9) -> np.ndarray:
    """Inverse transform of |F| * phi, thresholded at 1/2 into a 0/1 grid.

    Unknown frequencies are zero-filled.  Requires the phase to be known on at
    least ``min_known_frac`` of the usable frequencies D.
    """
    raw = _raw_reconstruction(absF, phase, min_known_frac)
    return (raw >= 0.5).astype(np.int64)


def _raw_reconstruction(absF: np.ndarray, phase: PhaseField,
                        min_known_frac: float = 0.9) -> np.ndarray:
    D = absF >= phase.eps_zero
    nD = int(np.count_nonzero(D))
    covered = int(np.count_nonzero(phase.known & D))
    if nD and covered < min_known_frac * nD:
        h = 2 * phase.l_half / phase.M
        partial = np.fft.ifft(np.where(phase.known, absF * phase.phi, 0)).real / h
        raise ReconstructionError(
            f"phase known on {covered}/{nD} usable frequencies "
            f"(< {min_known_frac:.0%})", partial=partial)
    h = 2 * phase.l_half / phase.M
    F_rec = np.where(phase.known, absF * phase.phi, 0)
    return np.fft.ifft(F_rec).real / h


def uncertain_cells(raw: np.ndarray) -> int:
    lo, hi = UNCERTAIN_BAND
    return int(np.count_nonzero((raw >= lo) & (raw <= hi)))


def align_up_to_translation(f: np.ndarray, g: np.ndarray) -> tuple[int, float]:
    """Circular shift of g minimizing the cell mismatch against f.

    Returns (shift, mismatch fraction); the smallest optimal shift wins.
    """
    f = np.asarray(f).astype(np.int64)
    g = np.asarray(g).astype(np.int64)
    if f.shape != g.shape:
        raise ParameterError("grids must have equal size")
    M = len(f)
    best_shift, best_mis = 0, M + 1
    for s in range(M):
        mis = int(np.count_nonzero(f != np.roll(g, s)))
        if mis < best_mis:
            best_shift, best_mis = s, mis
    return best_shift, best_mis / M


@dataclass(frozen=True)
class ReconstructionReport:
    """Outcome of a recover-forget-reconstruct run, JSON-serializable."""

    M: int
    l_half: float
    eps_zero: float
    unknown_count: int
    shift: int
    mismatch: float
    uncertain_cells: int
    recovered: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "M": self.M,
            "L_half": self.l_half,
            "eps_zero": self.eps_zero,
            "unknown_count": self.unknown_count,
            "shift": self.shift,
            "mismatch": self.mismatch,
            "uncertain_cells": self.uncertain_cells,
        }, indent=2, sort_keys=True)


def roundtrip(f: np.ndarray, M: int, l_half: float,
              eps_zero: float | None = None) -> ReconstructionReport:
    """Compute deck data from an indicator, forget it, reconstruct, align, report."""
    from .spectra import deck_functions
    deck = deck_functions(f, M, l_half)
    psi2 = phase_quotient(deck, eps_zero)
    phase = propagate_phase(psi2.absF, psi2)
    raw = _raw_reconstruction(psi2.absF, phase)
    recovered = (raw >= 0.5).astype(np.int64)
    shift, mismatch = align_up_to_translation(np.asarray(f).astype(np.int64), recovered)
    return ReconstructionReport(M, float(l_half), psi2.eps_zero, phase.unknown_count,
                                shift, mismatch, uncertain_cells(raw), recovered)
