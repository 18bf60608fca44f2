"""Scheme construction, exact window arithmetic, and the literal grammar."""

import random
from fractions import Fraction

import pytest

from modelsets import (IntervalUnion, ParameterError, ProductPoint, ProductWindow,
                       QuadLatticePoint, QuadNum, RealPoint, ResiduePoint,
                       ResidueSet, format_window, make_scheme, parse_scheme,
                       parse_window, star, window_intersect, window_measure,
                       window_translate, window_union)
from modelsets.schemes import SQRT5, TAU, parse_expr

TAU_OVER_SQRT5 = 0.7236067977499789  # length tau = 1 + 1/tau, divided by sqrt5


# ---------------------------------------------------------------------------
# exact field arithmetic
# ---------------------------------------------------------------------------

def test_quadnum_basics():
    tau = QuadNum(0, 1)
    assert float(tau) == pytest.approx(TAU, abs=1e-15)
    assert tau * tau == tau + 1          # defining relation
    assert 1 / tau == tau - 1            # 1/tau = tau - 1
    assert tau.conj() == 1 - tau         # tau' = 1 - tau
    assert (tau - 1) < 1 < tau
    assert QuadNum(Fraction(1, 2), 0) + QuadNum(Fraction(1, 2), 0) == 1


def test_quadnum_sign_is_exact():
    # 34 + 55*tau' is tiny but positive; 55 + 34*tau' is large
    small = QuadNum(34, 55).conj()
    assert small.sign() == 1
    assert 0 < float(small) < 0.01
    assert QuadNum(-34, -55).conj().sign() == -1
    # sqrt5 = 2*tau - 1
    assert QuadNum(-1, 2) * QuadNum(-1, 2) == 5


def test_lattice_point_arithmetic():
    p = QuadLatticePoint(2, -1)
    q = QuadLatticePoint(-1, 3)
    assert p + q == QuadLatticePoint(1, 2)
    assert -p == QuadLatticePoint(-2, 1)
    assert p.phys == pytest.approx(2 - TAU)
    assert p.star_quad() == QuadNum(1, 1)  # 2 - tau' = 2 - (1 - tau) = 1 + tau


# ---------------------------------------------------------------------------
# schemes and the star map
# ---------------------------------------------------------------------------

def test_make_scheme_normalizations():
    fib = make_scheme("fibonacci")
    assert fib.normalization == pytest.approx(SQRT5)
    per = make_scheme("periodic", 32)
    assert window_measure(per, ResidueSet(32, [5])) == pytest.approx(1 / 32)
    comb = make_scheme("combined", 32)
    assert comb.normalization == pytest.approx(SQRT5 * 32)


def test_make_scheme_rejects_bad_modulus():
    with pytest.raises(ParameterError):
        make_scheme("periodic")
    with pytest.raises(ParameterError):
        make_scheme("combined", 1)
    with pytest.raises(ParameterError):
        make_scheme("fibonacci", 7)
    with pytest.raises(ParameterError):
        make_scheme("penrose")


def test_star_examples():
    fib = make_scheme("fibonacci")
    st = star(fib, QuadLatticePoint(0, 1))
    assert isinstance(st, RealPoint)
    assert st.value == pytest.approx(-0.6180339887498949, abs=1e-12)

    comb = make_scheme("combined", 32)
    st = star(comb, QuadLatticePoint(7, 0))
    assert isinstance(st, ProductPoint)
    assert float(st.y) == pytest.approx(7.0) and st.r == 7

    per = make_scheme("periodic", 32)
    st = star(per, 33)
    assert isinstance(st, ResiduePoint) and st.r == 1


def test_star_kind_mismatch():
    with pytest.raises(ParameterError):
        star(make_scheme("periodic", 32), QuadLatticePoint(1, 0))
    with pytest.raises(ParameterError):
        star(make_scheme("fibonacci"), 3)


def test_star_is_homomorphism():
    rng = random.Random(7)
    fib, per, comb = make_scheme("fibonacci"), make_scheme("periodic", 32), \
        make_scheme("combined", 32)
    for _ in range(50):
        p = QuadLatticePoint(rng.randint(-99, 99), rng.randint(-99, 99))
        q = QuadLatticePoint(rng.randint(-99, 99), rng.randint(-99, 99))
        assert star(fib, p + q).y == star(fib, p).y + star(fib, q).y
        n, m = rng.randint(-999, 999), rng.randint(-999, 999)
        assert star(per, n + m) == star(per, n) + star(per, m)
        sc = star(comb, p + q)
        assert sc == star(comb, p) + star(comb, q)


def test_physical_star_injective_on_samples():
    seen = {}
    for u in range(-20, 21):
        for v in range(-20, 21):
            p = QuadLatticePoint(u, v)
            key = (p.to_quad(), p.star_quad())
            assert key not in seen
            seen[key] = p


# ---------------------------------------------------------------------------
# window measures and set operations
# ---------------------------------------------------------------------------

def test_window_measure_examples():
    fib = make_scheme("fibonacci")
    w = parse_window("[-1,1/tau)")
    assert window_measure(fib, w) == pytest.approx(TAU_OVER_SQRT5, abs=1e-12)
    assert window_measure(fib, IntervalUnion.empty()) == 0.0

    per = make_scheme("periodic", 32)
    a16 = ResidueSet(32, (0, 7, 8, 9, 12, 15, 17, 18, 19, 20, 21, 22, 26, 27, 29, 30))
    assert window_measure(per, a16) == pytest.approx(0.5)


def test_window_measure_kind_mismatch():
    with pytest.raises(ParameterError):
        window_measure(make_scheme("fibonacci"), ResidueSet(32, [0]))


def test_window_translate_examples():
    w = parse_window("[0,1)")
    t = window_translate(w, RealPoint(QuadNum(Fraction(1, 2), 0)))
    assert t == parse_window("[0.5,1.5)")

    rs = ResidueSet(32, (0, 7))
    assert window_translate(rs, ResiduePoint(30, 32)) == ResidueSet(32, (30, 5))

    pw = ProductWindow(parse_window("[0,1)"), ResidueSet(32, (0, 7)))
    moved = window_translate(pw, ProductPoint(QuadNum(1, 0), 1, 32))
    assert moved.intervals == parse_window("[1,2)")
    assert moved.residues == ResidueSet(32, (1, 8))


def test_window_intersect_examples():
    w1 = parse_window("[-1,1/tau)")
    w2 = parse_window("[-0.382,1.236)")
    got = window_intersect(w1, w2)
    assert got.intervals[0][0] == QuadNum(Fraction(-382, 1000), 0)
    assert got.intervals[0][1] == QuadNum(-1, 1)  # 1/tau = tau - 1

    assert window_intersect(ResidueSet(32, (0, 7, 8)), ResidueSet(32, (7, 9))) \
        == ResidueSet(32, (7,))
    assert window_intersect(parse_window("[0,1)"), parse_window("[2,3)")).is_empty()


def test_interval_union_canonicalization():
    w = IntervalUnion([(1, 2), (0, 1)])          # touching intervals merge
    assert w == parse_window("[0,2)")
    w = IntervalUnion([(0, QuadNum(0, 1)), (1, 2)])  # overlapping merge
    assert len(w.intervals) == 1
    with pytest.raises(ParameterError):
        IntervalUnion([(1, 1)])


def _random_union(rng):
    cuts = sorted(rng.sample(range(-40, 40), rng.randint(2, 8)))
    ivs = [(Fraction(a, 4), Fraction(b, 4)) for a, b in zip(cuts[:-1], cuts[1:])]
    return IntervalUnion([iv for i, iv in enumerate(ivs) if i % 2 == 0])


def test_measure_translation_invariance_property():
    fib = make_scheme("fibonacci")
    rng = random.Random(11)
    for _ in range(30):
        w = _random_union(rng)
        shift = RealPoint(QuadNum(Fraction(rng.randint(-50, 50), 7), rng.randint(-3, 3)))
        moved = window_translate(w, shift)
        assert abs(window_measure(fib, moved) - window_measure(fib, w)) < 1e-12
    per = make_scheme("periodic", 32)
    for _ in range(30):
        rs = ResidueSet(32, rng.sample(range(32), rng.randint(1, 20)))
        moved = window_translate(rs, ResiduePoint(rng.randint(0, 31), 32))
        assert window_measure(per, moved) == window_measure(per, rs)  # exact


def test_inclusion_exclusion_property():
    fib = make_scheme("fibonacci")
    rng = random.Random(13)
    for _ in range(40):
        w1, w2 = _random_union(rng), _random_union(rng)
        lhs = window_measure(fib, window_intersect(w1, w2)) \
            + window_measure(fib, window_union(w1, w2))
        rhs = window_measure(fib, w1) + window_measure(fib, w2)
        assert abs(lhs - rhs) < 1e-12


# ---------------------------------------------------------------------------
# literal grammar
# ---------------------------------------------------------------------------

def test_parse_expr_tau_forms():
    assert parse_expr("1/tau") == QuadNum(-1, 1)
    assert parse_expr("-1") == QuadNum(-1, 0)
    assert parse_expr("2*tau-1") == QuadNum(-1, 2)
    assert parse_expr("(1+tau)/2") == QuadNum(Fraction(1, 2), Fraction(1, 2))
    assert parse_expr("0.25") == QuadNum(Fraction(1, 4), 0)


def test_parse_window_kinds():
    assert isinstance(parse_window("[-1,1/tau)"), IntervalUnion)
    assert isinstance(parse_window("{0,7,8}@32"), ResidueSet)
    pw = parse_window("[-1,1/tau)x{0,7}@32")
    assert isinstance(pw, ProductWindow)
    assert pw.residues == ResidueSet(32, (0, 7))


def test_window_literal_roundtrip():
    for lit in ["[-1,1/tau)", "[0,1)u[1.5,2.25)", "{0,7,8}@32",
                "[-1,1/tau)x{0,7,8}@32", "[-1/2,1/2)"]:
        w = parse_window(lit)
        assert parse_window(format_window(w)) == w
        # canonical form is a fixed point of parse/format
        assert format_window(parse_window(format_window(w))) == format_window(w)


def test_parse_window_rejects_garbage():
    for bad in ["[1,0)", "(0,1)", "{}@32", "{1,2}", "[0,1)u", "[0,1)x[2,3)",
                "[a,b)", "[0,1)x{0}@32x{1}@32"]:
        with pytest.raises(ParameterError):
            parse_window(bad)


def test_parse_scheme_literals():
    assert parse_scheme("fibonacci").kind == "fibonacci"
    assert parse_scheme("periodic:32").modulus == 32
    with pytest.raises(ParameterError):
        parse_scheme("periodic:x")
