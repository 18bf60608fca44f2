"""Dual lattices, window Fourier transforms, diffraction, and deck grids.

The diffraction of a regular model set is pure point: the intensity at a dual
point k is |FT of the window indicator at -k*|^2.  Dual points carry exact
integer labels so peaks stay addressable even though the physical Fourier
module is dense in R.

Deck grids discretize the window self-intersection functions I1(w) and
I2(w1, w2) on a periodized grid (circle of circumference 2*L_half); there the
discrete Fourier transform turns the transform identities into exact
statements, up to rounding, provided the window support is well inside one
period.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import ParameterError, ResourceError
from .schemes import (COMBINED, FIBONACCI, PERIODIC, SQRT5, IntervalUnion,
                      ProductWindow, QuadNum, QUAD_SQRT5, ResidueSet, Scheme,
                      Window, window_measure)

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# dual lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualPoint:
    """Dual-lattice point with exact integer labels.

    fibonacci:  labels (m, n),    k = (m + n*tau)/sqrt5
    periodic:   labels (j,),      k = j/N
    combined:   labels (m, n, b), k = (m + n*tau + (b/N)*tau')/sqrt5
    """

    scheme: Scheme
    labels: tuple

    @property
    def k(self) -> float:
        return float(self.k_exact())

    def k_exact(self):
        kind = self.scheme.kind
        if kind == PERIODIC:
            (j,) = self.labels
            return Fraction(j, self.scheme.modulus)
        if kind == FIBONACCI:
            m, n = self.labels
            return QuadNum(m, n) / QUAD_SQRT5
        m, n, b = self.labels
        frac = QuadNum(Fraction(b, self.scheme.modulus), 0)
        return (QuadNum(m, n) + frac * QuadNum(1, -1)) / QUAD_SQRT5  # tau' = 1 - tau

    def kstar(self):
        """Internal component of the dual point (exact)."""
        kind = self.scheme.kind
        if kind == PERIODIC:
            (j,) = self.labels
            return (-j) % self.scheme.modulus
        if kind == FIBONACCI:
            m, n = self.labels
            return -(QuadNum(m, n).conj()) / QUAD_SQRT5
        m, n, b = self.labels
        frac = QuadNum(Fraction(b, self.scheme.modulus), 0)
        kappa = -(QuadNum(m, n).conj() + frac * QuadNum(0, 1)) / QUAD_SQRT5
        return kappa, b % self.scheme.modulus


@dataclass(frozen=True)
class DualLattice:
    """Dual basis access and the character pairing with the direct lattice."""

    scheme: Scheme

    def point(self, *labels: int) -> DualPoint:
        expect = {FIBONACCI: 2, PERIODIC: 1, COMBINED: 3}[self.scheme.kind]
        if len(labels) != expect:
            raise ParameterError(f"{self.scheme.kind} dual points take {expect} labels")
        return DualPoint(self.scheme, tuple(int(x) for x in labels))

    def pairing(self, dp: DualPoint, p) -> Fraction:
        """Exact value of k*x + k**x* (+ b*u/N); integrality certifies duality."""
        kind = self.scheme.kind
        if kind == PERIODIC:
            (j,) = dp.labels
            return Fraction(j * p, self.scheme.modulus) + Fraction((-j % self.scheme.modulus) * p,
                                                                   self.scheme.modulus)
        if kind == FIBONACCI:
            total = dp.k_exact() * p.to_quad() + dp.kstar() * p.star_quad()
            if total.b != 0:
                raise AssertionError("pairing left the rationals")
            return total.a
        kappa, b = dp.kstar()
        total = dp.k_exact() * p.to_quad() + kappa * p.star_quad()
        if total.b != 0:
            raise AssertionError("pairing left the rationals")
        return total.a + Fraction(b * p.u, self.scheme.modulus)


def dual_lattice(scheme: Scheme) -> DualLattice:
    return DualLattice(scheme)


# ---------------------------------------------------------------------------
# window Fourier transform and diffraction
# ---------------------------------------------------------------------------

def window_ft(scheme: Scheme, w: Window, kstar) -> complex:
    """Transform of the window indicator at an internal frequency.

    Closed forms: an interval [a, b) contributes
    (exp(-2 pi i k b) - exp(-2 pi i k a)) / (-2 pi i k sqrt5) with the k = 0
    limit (b - a)/sqrt5; a residue set contributes sum exp(-2 pi i a b/N)/N;
    product windows multiply.
    """
    if scheme.kind == FIBONACCI:
        if not isinstance(w, IntervalUnion):
            raise ParameterError("fibonacci window_ft expects an interval union")
        return _interval_ft(w, kstar, SQRT5)
    if scheme.kind == PERIODIC:
        if not isinstance(w, ResidueSet) or w.modulus != scheme.modulus:
            raise ParameterError("periodic window_ft expects a residue set mod N")
        return _residue_ft(w, int(kstar))
    if not isinstance(w, ProductWindow):
        raise ParameterError("combined window_ft expects a product window")
    kappa, b = kstar
    return _interval_ft(w.intervals, kappa, SQRT5) * _residue_ft(w.residues, int(b))


def _interval_ft(iu: IntervalUnion, kappa, c: float) -> complex:
    if isinstance(kappa, QuadNum):
        is_zero = kappa.is_zero()
        kf = float(kappa)
    else:
        kf = float(kappa)
        is_zero = kf == 0.0
    if is_zero:
        return complex(float(iu.length()) / c)
    total = 0j
    for a, b in iu.intervals:
        ea = cmath.exp(-2j * math.pi * kf * float(a))
        eb = cmath.exp(-2j * math.pi * kf * float(b))
        total += (eb - ea) / (-2j * math.pi * kf * c)
    return total


def _residue_ft(rs: ResidueSet, b: int) -> complex:
    N = rs.modulus
    return sum(cmath.exp(-2j * math.pi * a * b / N) for a in rs.elems) / N


@dataclass(frozen=True)
class Spectrum:
    """Pure-point diffraction: dual points and their intensities."""

    scheme: Scheme
    window: Window
    peaks: tuple  # ((DualPoint, intensity), ...) ordered by (|k|, labels)

    def __len__(self):
        return len(self.peaks)

    def intensity_at(self, *labels: int) -> float:
        for dp, inten in self.peaks:
            if dp.labels == tuple(labels):
                return inten
        return 0.0

    def to_csv(self, path: str) -> None:
        names = {FIBONACCI: ["m", "n"], PERIODIC: ["b"], COMBINED: ["m", "n", "b"]}
        header = ",".join(names[self.scheme.kind] + ["k", "intensity"])
        lines = [header]
        for dp, inten in self.peaks:
            cells = [str(x) for x in dp.labels] + [f"{dp.k:.15g}", f"{inten:.15g}"]
            lines.append(",".join(cells))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_svg(self, path: str, width: int = 640, height: int = 320) -> None:
        """Stick plot: one vertical line per peak, height proportional to intensity."""
        if not self.peaks:
            raise ParameterError("empty spectrum")
        ks = [dp.k for dp, _ in self.peaks]
        hs = [inten for _, inten in self.peaks]
        kmin, kmax = min(ks), max(ks)
        span = (kmax - kmin) or 1.0
        top = max(hs) or 1.0
        mleft, mright, mtop, mbot = 45, 15, 15, 35
        pw, ph = width - mleft - mright, height - mtop - mbot
        x = lambda k: mleft + (k - kmin) / span * pw
        y = lambda h: mtop + ph * (1 - h / top)
        parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
                 f'viewBox="0 0 {width} {height}">',
                 f'<rect width="{width}" height="{height}" fill="white"/>',
                 f'<line x1="{mleft}" y1="{mtop + ph}" x2="{mleft + pw}" y2="{mtop + ph}" '
                 'stroke="black" stroke-width="1"/>']
        if self.scheme.kind == PERIODIC:
            N = self.scheme.modulus
            for dp, _ in self.peaks:
                j = dp.labels[0]
                xx = x(dp.k)
                parts.append(f'<line x1="{xx:.2f}" y1="{mtop + ph}" x2="{xx:.2f}" '
                             f'y2="{mtop + ph + 4}" stroke="black" stroke-width="1"/>')
                parts.append(f'<text x="{xx:.2f}" y="{mtop + ph + 16}" font-size="9" '
                             f'text-anchor="middle">{j}</text>')
            parts.append(f'<text x="{mleft + pw / 2:.2f}" y="{height - 6}" font-size="11" '
                         f'text-anchor="middle">k/{N}</text>')
        else:
            for frac in (0.0, 0.5, 1.0):
                kk = kmin + frac * span
                parts.append(f'<text x="{x(kk):.2f}" y="{mtop + ph + 16}" font-size="9" '
                             f'text-anchor="middle">{kk:.3g}</text>')
            parts.append(f'<text x="{mleft + pw / 2:.2f}" y="{height - 6}" font-size="11" '
                         f'text-anchor="middle">k</text>')
        for dp, inten in self.peaks:
            xx = x(dp.k)
            parts.append(f'<line x1="{xx:.2f}" y1="{mtop + ph}" x2="{xx:.2f}" '
                         f'y2="{y(inten):.2f}" stroke="black" stroke-width="1.5"/>')
        parts.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(parts) + "\n")


def diffraction(scheme: Scheme, w: Window, kmax: float, min_intensity: float = 1e-4,
                include_zeros: bool = False) -> Spectrum:
    """All dual points with |k| <= kmax and intensity |window_ft(-k*)|^2.

    For the schemes with a real internal component the dual module is dense in
    R, so peaks below ``min_intensity`` are omitted unless ``include_zeros``
    is set (then everything enumerated within the internal bound appears).
    The bound on the internal frequency follows from
    |FT| <= n_intervals / (pi sqrt5 |kappa|).
    """
    if kmax < 0:
        raise ParameterError("kmax must be nonnegative")
    if not scheme.window_kind_ok(w):
        raise ParameterError("window incompatible with scheme")

    peaks = []
    if scheme.kind == PERIODIC:
        N = scheme.modulus
        jmax = math.floor(kmax * N + 1e-9)
        for j in range(math.ceil(-kmax * N - 1e-9), jmax + 1):
            dp = DualPoint(scheme, (j,))
            inten = abs(window_ft(scheme, w, (-dp.kstar()) % N)) ** 2
            if include_zeros or inten > min_intensity:
                peaks.append((dp, inten))
    else:
        if min_intensity <= 0:
            raise ParameterError("a positive min_intensity is required on dense duals")
        iu = w if scheme.kind == FIBONACCI else w.intervals
        n_int = max(1, len(iu.intervals))
        kappa_bound = n_int / (math.pi * SQRT5 * math.sqrt(min_intensity))
        if scheme.kind == FIBONACCI:
            for labels in _fib_dual_labels(kmax, kappa_bound):
                dp = DualPoint(scheme, labels)
                inten = abs(window_ft(scheme, w, -dp.kstar())) ** 2
                if include_zeros or inten >= min_intensity:
                    peaks.append((dp, inten))
        else:
            N = scheme.modulus
            for b in range(N):
                # residue factor caps the achievable intensity for this b
                rfac = abs(_residue_ft(w.residues, (-b) % N))
                cap = (rfac * float(iu.length()) / SQRT5) ** 2
                if not include_zeros and cap < min_intensity:
                    continue
                for labels in _combined_dual_labels(kmax, kappa_bound, b, N):
                    dp = DualPoint(scheme, labels)
                    kappa, bb = dp.kstar()
                    inten = abs(window_ft(scheme, w, (-kappa, (-bb) % N))) ** 2
                    if include_zeros or inten >= min_intensity:
                        peaks.append((dp, inten))
    peaks.sort(key=lambda t: (abs(t[0].k), t[0].labels))
    return Spectrum(scheme, w, tuple(peaks))


def _fib_dual_labels(kmax: float, kappa_bound: float):
    P = SQRT5 * kmax + 1e-9
    Q = SQRT5 * kappa_bound + 1e-9
    from .schemes import TAU, TAU_PRIME
    nmax = math.floor((P + Q) / SQRT5) + 1
    for n in range(-nmax, nmax + 1):
        lo = max(-P - n * TAU, -Q - n * TAU_PRIME)
        hi = min(P - n * TAU, Q - n * TAU_PRIME)
        for m in range(math.ceil(lo), math.floor(hi) + 1):
            yield (m, n)


def _combined_dual_labels(kmax: float, kappa_bound: float, b: int, N: int):
    # k sqrt5 = m + n tau + (b/N) tau',  kappa sqrt5 = -(m + n tau' + (b/N) tau)
    P = SQRT5 * kmax + 1e-9
    Q = SQRT5 * kappa_bound + 1e-9
    from .schemes import TAU, TAU_PRIME
    beta = b / N
    nmax = math.floor((P + Q) / SQRT5 + beta) + 1
    for n in range(-nmax, nmax + 1):
        lo = max(-P - n * TAU - beta * TAU_PRIME, -Q - n * TAU_PRIME - beta * TAU)
        hi = min(P - n * TAU - beta * TAU_PRIME, Q - n * TAU_PRIME - beta * TAU)
        for m in range(math.ceil(lo), math.floor(hi) + 1):
            yield (m, n, b)


@dataclass(frozen=True)
class ExtinctionReport:
    points: tuple          # sampled internal frequencies with |FT| < eps
    zero_at_origin: bool   # must be False for any window of positive measure


def extinction_set(scheme: Scheme, w: Window, sample: Sequence, eps: float) -> ExtinctionReport:
    """Sampled internal frequencies where the window transform (nearly) vanishes."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if window_measure(scheme, w) == 0:
        raise ParameterError("window has zero measure; its transform vanishes identically")
    hits = tuple(k for k in sample if abs(window_ft(scheme, w, k)) < eps)
    origin = {FIBONACCI: 0.0, PERIODIC: 0, COMBINED: (0.0, 0)}[scheme.kind]
    zero_at_origin = abs(window_ft(scheme, w, origin)) < eps
    return ExtinctionReport(hits, zero_at_origin)


# ---------------------------------------------------------------------------
# finite-group zero condition
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple:
    """Coefficients (ascending) of the n-th cyclotomic polynomial, exactly."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, list(_cyclotomic(d)))
    return tuple(poly)


def _poly_divide_exact(num: list, den: list) -> list:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        coef = num[i + len(den) - 1] // den[-1]
        out[i] = coef
        for j, d in enumerate(den):
            num[i + j] -= coef * d
    if any(num):
        raise AssertionError("non-exact polynomial division")
    return out


def _root_sum_is_zero(exponent_counts: Mapping[int, int], n: int) -> bool:
    """Exact test of sum_j c_j zeta^j = 0 for zeta = exp(2 pi i / n)."""
    poly = [0] * n
    for e, c in exponent_counts.items():
        poly[e % n] += c
    if not any(poly):
        return True
    phi = list(_cyclotomic(n))
    rem = list(poly)
    # reduce modulo the cyclotomic polynomial (monic, integer)
    for i in range(len(rem) - 1, len(phi) - 2, -1):
        coef = rem[i]
        if coef == 0:
            continue
        for j, d in enumerate(phi):
            rem[i - (len(phi) - 1) + j] -= coef * d
    return not any(rem)


def zero_condition(N: int, windows: Mapping[int, IntervalUnion], b: int) -> bool:
    """Whether sum over a of conj(chi_a(b)) * indicator(W_a) vanishes identically.

    Exact: the real line is cut at every window endpoint and on each piece the
    coefficient sum (an integer combination of N-th roots of unity) is tested
    for exact vanishing against the cyclotomic polynomial.
    """
    if N < 1:
        raise ParameterError("modulus must be positive")
    cuts = set()
    live = {a: w for a, w in windows.items() if not w.is_empty()}
    if not live:
        return True
    for w in live.values():
        for lo, hi in w.intervals:
            cuts.add(lo)
            cuts.add(hi)
    cuts = sorted(cuts)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if not lo < hi:
            continue
        mid = (lo + hi) / QuadNum(2, 0)
        counts: dict[int, int] = {}
        for a, w in live.items():
            if w.contains(mid):
                e = (-a * b) % N
                counts[e] = counts.get(e, 0) + 1
        if counts and not _root_sum_is_zero(counts, N):
            return False
    return True


# ---------------------------------------------------------------------------
# deck grids on the periodized line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeckGrid:
    """Window self-intersection data on a circle of circumference 2*L_half.

    ``I1[j]`` is the measure of the window cut with its translate by j cells
    and ``I2[j1, j2]`` the measure of the triple cut; both are exact integer
    cell counts times the cell width.  ``F`` is the scaled DFT of the
    indicator; ``I1hat`` and ``I2hat`` are the transforms of the deck data
    (everything the reconstruction stage is allowed to see).
    """

    M: int
    l_half: float
    f: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    F: np.ndarray
    I1hat: np.ndarray
    I2hat: np.ndarray

    @property
    def cell(self) -> float:
        return 2 * self.l_half / self.M

    def grid(self) -> np.ndarray:
        return -self.l_half + np.arange(self.M) * self.cell

    def frequencies(self) -> np.ndarray:
        """Signed frequency index per DFT bin; physical k = index / (2*l_half)."""
        m = np.arange(self.M)
        return np.where(m <= self.M // 2, m, m - self.M)


def sample_window(iu: IntervalUnion, M: int, l_half) -> np.ndarray:
    """Exact 0/1 sampling of the window on the grid -L + j*(2L/M)."""
    L = Fraction(l_half)
    h = 2 * L / M
    f = np.zeros(M, dtype=np.int64)
    for j in range(M):
        if iu.contains(QuadNum(-L + j * h, 0)):
            f[j] = 1
    return f


def deck_functions(f: np.ndarray, M: int, l_half: float,
                   allow_large: bool = False) -> DeckGrid:
    """Deck data of a sampled indicator; verifies the grid identities.

    Precondition: the support diameter must stay below l_half/2 so circular
    correlations agree with correlations on the line.
    """
    f = np.asarray(f)
    if f.shape != (M,):
        raise ParameterError(f"indicator must have shape ({M},)")
    if not np.isin(f, (0, 1)).all():
        raise ParameterError("indicator must be 0/1 valued")
    if M > 2048 and not allow_large:
        raise ResourceError("M > 2048 stores a large dense I2; pass allow_large=True")
    support = np.nonzero(f)[0]
    if len(support) == 0:
        raise ParameterError("empty indicator")
    h = 2 * l_half / M
    # support extent = minimal covering arc on the circle
    if len(support) == M:
        diam = 2 * l_half
    else:
        gaps = np.diff(np.append(support, support[0] + M))
        diam = (M - gaps.max()) * h
    if not diam < l_half / 2:
        raise ParameterError(
            f"support diameter {diam} must stay below l_half/2 = {l_half / 2} "
            "(anti-wraparound condition)")

    fb = f.astype(float)
    Ff = np.fft.fft(fb)
    cFf = np.conj(Ff)
    n1 = np.rint(np.fft.ifft(Ff * cFf).real).astype(np.int64)
    n2 = np.empty((M, M), dtype=np.int64)
    for j1 in range(M):
        g = fb * np.roll(fb, j1)
        n2[j1] = np.rint(np.fft.ifft(np.fft.fft(g) * cFf).real)
    I1 = h * n1
    I2 = h * n2
    F = h * Ff
    I1hat = h * np.fft.fft(I1)
    I2hat = h * h * np.fft.fft2(I2)

    deck = DeckGrid(M, float(l_half), f.astype(np.int64), I1, I2, F, I1hat, I2hat)
    _verify_deck(deck)
    return deck


def _verify_deck(deck: DeckGrid) -> None:
    M = deck.M
    n1 = np.rint(deck.I1 / deck.cell).astype(np.int64)
    if not np.array_equal(n1, n1[(-np.arange(M)) % M]):
        raise AssertionError("I1 lost its reflection symmetry")
    if deck.I1hat.real.min() < -1e-10 * max(1.0, deck.I1hat.real.max()):
        raise AssertionError("I1hat is significantly negative")
    idx = (np.arange(M)[:, None] + np.arange(M)[None, :]) % M
    pred = np.conj(deck.F)[:, None] * np.conj(deck.F)[None, :] * deck.F[idx]
    scale = np.abs(deck.I2hat).max()
    if scale > 0 and np.abs(deck.I2hat - pred).max() > 1e-8 * scale:
        raise AssertionError("I2hat does not factor through the indicator transform")


# ---------------------------------------------------------------------------
# deck tables over a finite internal group (for the discrete counterexamples)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueDeckTables:
    """Integer deck tables of a residue window and their exact-scale transforms."""

    modulus: int
    n1: np.ndarray      # n1[w]      = card(S cut (w + S))
    n2: np.ndarray      # n2[w1, w2] = card(S cut (w1 + S) cut (w2 + S))
    I1hat: np.ndarray
    I2hat: np.ndarray


def residue_deck_tables(S: ResidueSet) -> ResidueDeckTables:
    N = S.modulus
    members = set(S.elems)
    n1 = np.zeros(N, dtype=np.int64)
    n2 = np.zeros((N, N), dtype=np.int64)
    for w1 in range(N):
        for t in S.elems:
            if (t - w1) % N in members:
                n1[w1] += 1
        for w2 in range(N):
            c = 0
            for t in S.elems:
                if (t - w1) % N in members and (t - w2) % N in members:
                    c += 1
            n2[w1, w2] = c
    I1hat = np.fft.fft(n1) / N**2
    I2hat = np.fft.fft2(n2) / N**3
    return ResidueDeckTables(N, n1, n2, I1hat, I2hat)
