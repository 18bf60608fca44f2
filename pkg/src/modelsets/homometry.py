"""Exact machinery for homometric residue sets and thinned golden-ratio sets.

Centrepiece: a pair of 16-element subsets of Z/32Z that share all 2- and
3-point pattern counts yet are not related by any rigid motion x -> +-x + t.
Both sets are generated from factored polynomials and validated against their
expanded exponent lists at import time.  All residue computations here are
exact integer arithmetic; no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .errors import ParameterError
from .pointsets import PointSet, generate
from .schemes import (COMBINED, FIBONACCI, IntervalUnion, ProductWindow,
                      ResidueSet, make_scheme)

CYCLOTOMIC_MODULUS = 32


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _exponent_set(factors: list[list[int]], modulus: int) -> tuple[int, ...]:
    poly = [1]
    for f in factors:
        poly = _poly_mul(poly, f)
    # reduce mod x^modulus - 1 and demand a 0/1 indicator polynomial
    folded = [0] * modulus
    for i, c in enumerate(poly):
        folded[i % modulus] += c
    if any(c not in (0, 1) for c in folded):
        raise AssertionError("factored polynomial did not expand to an indicator")
    return tuple(i for i, c in enumerate(folded) if c == 1)


# shared factors 1 + x + ... + x^15 and 1 - x^3 + x^9; the last factor differs
_FACTORS_A = [[1] * 16, [1, 0, 0, -1, 0, 0, 0, 0, 0, 1], [1, -1, 0, 1, -1, 0, 1]]
_FACTORS_B = [[1] * 16, [1, 0, 0, -1, 0, 0, 0, 0, 0, 1], [1, 0, -1, 1, 0, -1, 1]]

_SET_A = (0, 7, 8, 9, 12, 15, 17, 18, 19, 20, 21, 22, 26, 27, 29, 30)
_SET_B = (0, 1, 8, 9, 10, 12, 13, 15, 18, 19, 20, 21, 22, 23, 27, 30)

assert _exponent_set(_FACTORS_A, CYCLOTOMIC_MODULUS) == _SET_A
assert _exponent_set(_FACTORS_B, CYCLOTOMIC_MODULUS) == _SET_B


def cyclotomic_pair() -> tuple[ResidueSet, ResidueSet]:
    """The homometric pair (A, B) in Z/32Z, validated against its factored form."""
    return (ResidueSet(CYCLOTOMIC_MODULUS, _SET_A),
            ResidueSet(CYCLOTOMIC_MODULUS, _SET_B))


@dataclass(frozen=True)
class PatternTable:
    """Exact pattern counts over Z/NZ.

    ``counts`` maps each sorted difference tuple (r1, ..., r_{n-1}) to the
    number of t in Z/NZ with t, t+r1, ..., t+r_{n-1} all in the set.  The
    order-2 row sum equals card(S)^2.
    """

    order: int
    modulus: int
    counts: dict

    def count(self, key: tuple) -> int:
        return self.counts.get(tuple(sorted(r % self.modulus for r in key)), 0)

    def frequency(self, key: tuple) -> Fraction:
        return Fraction(self.count(key), self.modulus)

    def to_csv(self, path: str) -> None:
        lines = ["tuple,count,frequency"]
        for key in sorted(self.counts):
            c = self.counts[key]
            lines.append(f"\"{':'.join(map(str, key))}\",{c},{c}/{self.modulus}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def pattern_table(S: ResidueSet, order: int) -> PatternTable:
    """Count every order-n pattern of S exactly (n = 2, 3 or 4)."""
    if order not in (2, 3, 4):
        raise ParameterError("order must be 2, 3 or 4")
    N = S.modulus
    members = set(S.elems)
    counts = {}
    for key in combinations_with_replacement(range(N), order - 1):
        c = 0
        for t in S.elems:
            if all((t + r) % N in members for r in key):
                c += 1
        counts[key] = c
    return PatternTable(order, N, counts)


def tables_equal(t1: PatternTable, t2: PatternTable):
    """Exact comparison; on failure returns the first witness tuple and both counts."""
    if t1.order != t2.order or t1.modulus != t2.modulus:
        raise ParameterError("tables differ in order or modulus")
    for key in sorted(set(t1.counts) | set(t2.counts)):
        c1, c2 = t1.counts.get(key, 0), t2.counts.get(key, 0)
        if c1 != c2:
            return False, (key, c1, c2)
    return True, None


def rigid_equivalent(S: ResidueSet, T: ResidueSet):
    """First transform x -> sign*x + t mapping S onto T, or None."""
    if S.modulus != T.modulus:
        raise ParameterError("modulus mismatch")
    N = S.modulus
    target = set(T.elems)
    for sign in (1, -1):
        for t in range(N):
            if {(sign * x + t) % N for x in S.elems} == target:
                return sign, t
    return None


def thinned_model_set(w: IntervalUnion, S: ResidueSet,
                      region: tuple[float, float]) -> PointSet:
    """Golden-ratio model set thinned by the congruence condition u mod N in S."""
    if S.is_empty():
        raise ParameterError("thinning residue set must be nonempty")
    scheme = make_scheme(COMBINED, S.modulus)
    return generate(scheme, ProductWindow(w, S), region)


@dataclass(frozen=True)
class ProductCheckRow:
    pattern: tuple          # (x, y) lattice differences
    residues: tuple         # (r, s) their residue classes
    interval_factor: float
    freq_1: float
    freq_2: float
    empirical_1: float | None
    empirical_2: float | None


@dataclass(frozen=True)
class ProductCheckReport:
    rows: list
    all_equal: bool
    max_exact_gap: float
    max_empirical_gap: float


def product_correlation_check(w: IntervalUnion, S1: ResidueSet, S2: ResidueSet,
                              patterns, R_empirical: float | None = None) -> ProductCheckReport:
    """Compare 3-point frequencies of the two thinned sets pattern by pattern.

    Each frequency splits as (interval factor) * (residue count)/N; the
    interval factor is common, so equality reduces to the residue tables.
    When ``R_empirical`` is given, occurrences are also counted in patches and
    compared against the exact values.
    """
    if S1.modulus != S2.modulus:
        raise ParameterError("modulus mismatch")
    N = S1.modulus
    fib = make_scheme(FIBONACCI)
    t1 = pattern_table(S1, 3)
    t2 = pattern_table(S2, 3)

    ps1 = ps2 = None
    if R_empirical is not None:
        pats = list(patterns)
        pad = max([1.0] + [max(abs(x.phys), abs(y.phys)) for x, y in pats]) + 2
        reg = (-R_empirical / 2 - pad, R_empirical / 2 + pad)
        ps1 = thinned_model_set(w, S1, reg)
        ps2 = thinned_model_set(w, S2, reg)
        patterns = pats

    from .correlations import freq_empirical, freq_exact

    rows = []
    max_exact_gap = 0.0
    max_emp_gap = 0.0
    for x, y in patterns:
        r, s = x.u % N, y.u % N
        interval_factor = freq_exact(fib, w, (x, y))
        f1 = interval_factor * t1.count((r, s)) / N
        f2 = interval_factor * t2.count((r, s)) / N
        e1 = e2 = None
        if ps1 is not None:
            e1 = freq_empirical(ps1, (x, y), R_empirical)
            e2 = freq_empirical(ps2, (x, y), R_empirical)
            max_emp_gap = max(max_emp_gap, abs(e1 - f1), abs(e2 - f2))
        max_exact_gap = max(max_exact_gap, abs(f1 - f2))
        rows.append(ProductCheckRow((x, y), (r, s), interval_factor, f1, f2, e1, e2))
    return ProductCheckReport(rows, max_exact_gap == 0.0, max_exact_gap, max_emp_gap)
