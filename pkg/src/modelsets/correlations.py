"""Pattern frequencies and k-point correlation measures.

Two routes are provided for every frequency: the exact route intersects the
window with its star-translates (pure window geometry, no point set needed),
and the empirical route counts occurrences in a generated patch averaged over
a centred interval.  Their agreement is one of the package's acceptance
checks.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParameterError, ResourceError
from .pointsets import PointSet, generate, symmetric_difference_density, translate_pointset
from .schemes import (COMBINED, FIBONACCI, PERIODIC, TAU, TAU_PRIME,
                      QuadLatticePoint, Scheme, Window, star, window_intersect,
                      window_measure, window_translate)


def canonical_pattern(scheme: Scheme, points: Iterable) -> tuple:
    """Sort and deduplicate the non-base points of a pattern {0, x1, ..., xn}.

    Zero entries coincide with the implicit base point and are dropped;
    repetitions are deleted.  The empty tuple denotes the singleton pattern.
    """
    if scheme.kind == PERIODIC:
        uniq = {int(x) for x in points}
        uniq.discard(0)
        return tuple(sorted(uniq))
    uniq = set()
    for x in points:
        if not isinstance(x, QuadLatticePoint):
            raise ParameterError("pattern points must be QuadLatticePoints for this scheme")
        if x.u == 0 and x.v == 0:
            continue
        uniq.add(x)
    return tuple(sorted(uniq, key=lambda p: (p.phys, p.u, p.v)))


def freq_exact(scheme: Scheme, w: Window, pattern: Sequence) -> float:
    """Frequency of {0, x1, ..., xn}: measure of the window cut with its star-translates."""
    pat = canonical_pattern(scheme, pattern)
    cut = w
    for x in pat:
        cut = window_intersect(cut, window_translate(w, -star(scheme, x)))
    return window_measure(scheme, cut)


def _pattern_phys(scheme: Scheme, pat: tuple) -> list[float]:
    if scheme.kind == PERIODIC:
        return [float(x) for x in pat]
    return [x.phys for x in pat]


def freq_empirical(ps: PointSet, pattern: Sequence, R: float) -> float:
    """Occurrences per unit length over the centred interval (-R/2, R/2).

    The patch must cover that interval inflated by the pattern's extent, so
    membership of every translated point is decided by the patch alone.
    """
    if R <= 0:
        raise ParameterError("averaging radius must be positive")
    pat = canonical_pattern(ps.scheme, pattern)
    ph = _pattern_phys(ps.scheme, pat)
    lo_need = -R / 2 + min([0.0] + ph)
    hi_need = R / 2 + max([0.0] + ph)
    lo, hi = ps.region
    if lo > lo_need or hi < hi_need:
        raise ParameterError(
            f"patch region [{lo}, {hi}] too small; need at least [{lo_need}, {hi_need}]")

    members = ps.coord_set()
    count = 0
    if ps.scheme.kind == PERIODIC:
        for y in ps.points:
            if -R / 2 < y < R / 2 and all((y + x) in members for x in pat):
                count += 1
    else:
        offs = [(x.u, x.v) for x in pat]
        for p in ps.points:
            if -R / 2 < p.phys < R / 2 and \
                    all((p.u + du, p.v + dv) in members for du, dv in offs):
                count += 1
    return count / R


@dataclass(frozen=True)
class CorrelationMeasure:
    """Sparse (n+1)-point correlation: difference tuples -> frequencies.

    ``order`` is n+1; keys are n-tuples of lattice differences with physical
    length at most ``cutoff``; only strictly positive frequencies are stored.
    """

    scheme: Scheme
    window: Window
    order: int
    cutoff: float
    entries: dict

    def support(self) -> list:
        return sorted(self.entries.keys(), key=_tuple_sort_key)

    def entry(self, key: tuple) -> float:
        return self.entries.get(key, 0.0)

    def density(self) -> float:
        return self.entries.get(self._zero_key(), 0.0)

    def _zero_key(self):
        n = self.order - 1
        if self.scheme.kind == PERIODIC:
            return tuple([0] * n)
        return tuple([QuadLatticePoint(0, 0)] * n)

    def to_csv(self, path: str) -> None:
        """Deterministic CSV: diff columns then frequency at 15 significant digits."""
        n = self.order - 1
        header = ",".join(f"diff{i + 1}" for i in range(n)) + ",frequency"
        lines = [header]
        for key in self.support():
            cells = [_coord_text(x) for x in key]
            lines.append(",".join(cells + [f"{self.entries[key]:.15g}"]))
        _atomic_write(path, "\n".join(lines) + "\n")


def _coord_text(x) -> str:
    if isinstance(x, QuadLatticePoint):
        return f"{x.u}{'+' if x.v >= 0 else '-'}{abs(x.v)}*tau"
    return str(x)


def _tuple_sort_key(key: tuple):
    out = []
    for x in key:
        if isinstance(x, QuadLatticePoint):
            out.append((x.u, x.v))
        else:
            out.append((x, 0))
    return out


def _atomic_write(path: str, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".",
                               prefix=".corr-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def support_differences(scheme: Scheme, w: Window, cutoff: float) -> list:
    """Lattice differences x with |phys(x)| <= cutoff and freq({0, x}) > 0.

    Enumerated directly from the lattice against the hull of W - W, so no
    positive-frequency difference can be missed (a patch-based harvest could
    miss tuples of arbitrarily small frequency).
    """
    if cutoff < 0:
        raise ParameterError("cutoff must be nonnegative")
    out = []
    if scheme.kind == PERIODIC:
        for x in range(-math.floor(cutoff), math.floor(cutoff) + 1):
            if freq_exact(scheme, w, (x,)) > 0:
                out.append(x)
        return out

    iu = w if scheme.kind == FIBONACCI else w.intervals
    hull = iu.hull()
    if hull is None or (scheme.kind == COMBINED and w.residues.is_empty()):
        return []
    diff_lo, diff_hi = float(hull[0]) - float(hull[1]), float(hull[1]) - float(hull[0])
    # enumerate x = u + v*tau with phys in [-cutoff, cutoff], star in the hull of W-W
    vmin = math.floor((-cutoff - diff_hi) / math.sqrt(5)) - 2
    vmax = math.ceil((cutoff - diff_lo) / math.sqrt(5)) + 2
    est = (vmax - vmin + 1) * (diff_hi - diff_lo + 4)
    if est > 500_000:
        raise ResourceError(f"difference enumeration would visit ~{int(est)} candidates; "
                            "reduce the cutoff")
    for v in range(vmin, vmax + 1):
        ulo = math.floor(diff_lo - v * TAU_PRIME) - 1
        uhi = math.ceil(diff_hi - v * TAU_PRIME) + 1
        for u in range(ulo, uhi + 1):
            if abs(u + v * TAU) > cutoff + 1e-12:
                continue
            x = QuadLatticePoint(u, v)
            if freq_exact(scheme, w, (x,)) > 0:
                out.append(x)
    out.sort(key=lambda p: (p.phys, p.u, p.v))
    return out


def _freq_batch(scheme: Scheme, w: Window, tuples: list) -> list:
    return [freq_exact(scheme, w, tup) for tup in tuples]


def correlation_measure(scheme: Scheme, w: Window, order: int, cutoff: float,
                        max_entries: int = 2_000_000,
                        workers: int = 1) -> CorrelationMeasure:
    """All difference tuples within the cutoff carrying positive frequency.

    ``workers`` > 1 evaluates the exact frequencies in that many processes;
    the result is independent of the worker count.
    """
    if order not in (2, 3, 4):
        raise ParameterError("order must be 2, 3 or 4")
    if cutoff < 0:
        raise ParameterError("cutoff must be nonnegative")
    base = support_differences(scheme, w, cutoff)
    n = order - 1
    if len(base) ** n > max_entries:
        raise ResourceError(
            f"{len(base)}^{n} candidate tuples exceed the budget of {max_entries}; "
            "reduce the cutoff or raise max_entries")
    from itertools import product
    tuples = [(x,) for x in base] if n == 1 else list(product(base, repeat=n))
    if workers > 1 and len(tuples) > 4 * workers:
        from concurrent.futures import ProcessPoolExecutor
        chunks = [tuples[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            freq_chunks = list(pool.map(_freq_batch, [scheme] * workers,
                                        [w] * workers, chunks))
        freqs = dict(zip((t for ch in chunks for t in ch),
                         (f for fc in freq_chunks for f in fc)))
        entries = {tup: freqs[tup] for tup in tuples if freqs[tup] > 0}
    else:
        entries = {}
        for tup in tuples:
            f = freq_exact(scheme, w, tup)
            if f > 0:
                entries[tup] = f
    return CorrelationMeasure(scheme, w, order, cutoff, entries)


@dataclass(frozen=True)
class ComparisonResult:
    equal: bool
    witness: tuple | None  # (key, value1, value2) at the first discrepancy

    def __bool__(self):
        return self.equal


def correlations_equal(c1: CorrelationMeasure, c2: CorrelationMeasure,
                       tol: float = 0.0) -> ComparisonResult:
    """Support and value comparison; tol = 0 is allowed for exact rational cases."""
    if c1.order != c2.order or c1.cutoff != c2.cutoff:
        raise ParameterError("correlation measures differ in order or cutoff")
    keys = sorted(set(c1.entries) | set(c2.entries), key=_tuple_sort_key)
    for key in keys:
        v1, v2 = c1.entry(key), c2.entry(key)
        if abs(v1 - v2) > tol:
            return ComparisonResult(False, (key, v1, v2))
    return ComparisonResult(True, None)


def almost_periods(scheme: Scheme, w: Window, eps: float, candidates: Sequence,
                   R: float) -> list[tuple]:
    """Candidates t whose estimated density of (t + L) symdiff L is below eps.

    The estimate counts the symmetric difference of the patch and its
    translate on [-R, R]; it is an estimator, not a certificate.
    """
    dens = window_measure(scheme, w)
    if not 0 < eps < 2 * dens + 1e-15:
        raise ParameterError("eps must lie in (0, 2*density)")
    if R <= 0:
        raise ParameterError("R must be positive")
    phys = [0.0]
    for t in candidates:
        phys.append(abs(t) if scheme.kind == PERIODIC else abs(t.phys))
    pad = max(phys) + 1
    base = generate(scheme, w, (-R - pad, R + pad))
    lo, hi = -R, R
    inner = _restrict(base, (lo, hi))
    out = []
    for t in candidates:
        shifted = _restrict(translate_pointset(base, t), (lo, hi))
        est = symmetric_difference_density(inner, shifted)
        if est < eps:
            out.append((t, est))
    return out


def _restrict(ps: PointSet, region: tuple[float, float]) -> PointSet:
    lo, hi = region
    if ps.scheme.kind == PERIODIC:
        pts = tuple(x for x in ps.points if lo <= x <= hi)
    else:
        pts = tuple(p for p in ps.points if lo <= p.phys <= hi)
    return PointSet(ps.scheme, ps.window, pts, region)
