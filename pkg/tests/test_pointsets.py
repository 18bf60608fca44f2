"""Patch generation, gaps, densities, and the point-set file format."""

import numpy as np
import pytest

from modelsets import (IntervalUnion, ParameterError, QuadLatticePoint, ResidueSet,
                       ResourceError, gap_sequence, generate, load_pointset,
                       make_scheme, parse_window, save_pointset,
                       symmetric_difference_density, window_measure)
from modelsets.schemes import TAU

FIB = make_scheme("fibonacci")
FIB_WINDOW = parse_window("[-1,1/tau)")
SET_A = ResidueSet(32, (0, 7, 8, 9, 12, 15, 17, 18, 19, 20, 21, 22, 26, 27, 29, 30))


def test_generate_small_fibonacci_patch():
    ps = generate(FIB, FIB_WINDOW, (-2, 2))
    assert [(p.u, p.v) for p in ps.points] == [(-1, 0), (0, 0), (0, 1)]
    assert list(ps.physical()) == pytest.approx([-1.0, 0.0, TAU])


def test_generate_periodic_one_period():
    per = make_scheme("periodic", 32)
    ps = generate(per, SET_A, (0, 31))
    assert ps.points == SET_A.elems


def test_generate_empty_window():
    ps = generate(FIB, IntervalUnion.empty(), (-10, 10))
    assert len(ps) == 0


def test_generate_boundary_membership_is_exact():
    # star(-1, 0) = -1 sits exactly on the closed endpoint of [-1, 1/tau): kept
    ps = generate(FIB, FIB_WINDOW, (-2, 2))
    assert (-1, 0) in {(p.u, p.v) for p in ps.points}
    # star(0, -1) = tau - 1 sits exactly on the open endpoint: dropped
    probe = QuadLatticePoint(0, -1)
    assert float(probe.star_quad()) == pytest.approx(TAU - 1)
    assert -2 <= probe.phys <= 2
    assert (0, -1) not in {(p.u, p.v) for p in ps.points}


def test_density_converges_to_window_measure():
    ps = generate(FIB, FIB_WINDOW, (0, 10_000))
    exact = window_measure(FIB, FIB_WINDOW)
    assert abs(ps.density() - exact) / exact < 0.02


def test_combined_full_residues_has_plain_density():
    # thinning by the full residue set changes nothing: same count to R = 1e4
    from modelsets import ProductWindow
    comb = make_scheme("combined", 32)
    full = ProductWindow(FIB_WINDOW, ResidueSet(32, range(32)))
    n_comb = len(generate(comb, full, (0, 10_000)))
    n_fib = len(generate(FIB, FIB_WINDOW, (0, 10_000)))
    assert n_comb == n_fib
    assert window_measure(comb, full) == pytest.approx(window_measure(FIB, FIB_WINDOW))


def test_generate_monotone_in_window():
    small = parse_window("[0,0.3)")
    large = parse_window("[-0.2,0.5)")
    ps_small = generate(FIB, small, (0, 300))
    ps_large = generate(FIB, large, (0, 300))
    assert set(ps_small.points) <= set(ps_large.points)


def test_fibonacci_gaps_take_two_values():
    ps = generate(FIB, FIB_WINDOW, (0, 1000))
    gaps = np.array(gap_sequence(ps))
    short, long_ = 1.0, TAU
    assert np.all((np.abs(gaps - short) < 1e-9) | (np.abs(gaps - long_) < 1e-9))


def test_meyer_difference_set_spacing():
    ps = generate(FIB, FIB_WINDOW, (0, 1000))
    ph = ps.physical()
    diffs = np.unique(np.round(ph[None, :] - ph[:, None], 9))
    spacings = np.diff(diffs)
    assert spacings.min() >= TAU**-2 - 1e-6


def test_gap_sequence_absent_site_convention():
    per = make_scheme("periodic", 32)
    ps = generate(per, SET_A, (0, 31))
    gaps = gap_sequence(ps, absent_sites=True, cyclic=True)
    assert gaps == [6, 0, 0, 2, 2, 1, 0, 0, 0, 0, 0, 3, 0, 1, 0, 1]
    assert gaps[:4] == [6, 0, 0, 2] and gaps[-3:] == [1, 0, 1]


def test_gap_sequence_two_points():
    per = make_scheme("periodic", 4)
    ps = generate(per, ResidueSet(4, (0, 1)), (0, 1))
    assert gap_sequence(ps) == [1.0]


def test_gap_sequence_errors():
    per = make_scheme("periodic", 32)
    ps = generate(per, SET_A, (0, 0.5))
    with pytest.raises(ParameterError):
        gap_sequence(ps)
    fibs = generate(FIB, FIB_WINDOW, (0, 10))
    with pytest.raises(ParameterError):
        gap_sequence(fibs, absent_sites=True)


def test_symmetric_difference_density():
    ps = generate(FIB, FIB_WINDOW, (0, 500))
    assert symmetric_difference_density(ps, ps) == 0.0
    per = make_scheme("periodic", 10)
    p = generate(per, ResidueSet(10, (0,)), (0, 1000))
    q = generate(per, ResidueSet(10, (5,)), (0, 1000))
    got = symmetric_difference_density(p, q)
    assert got == pytest.approx(p.density() + q.density())


def test_symmetric_difference_region_mismatch():
    p = generate(FIB, FIB_WINDOW, (0, 100))
    q = generate(FIB, FIB_WINDOW, (0, 200))
    with pytest.raises(ParameterError):
        symmetric_difference_density(p, q)


def test_generate_resource_guard():
    with pytest.raises(ResourceError):
        generate(FIB, FIB_WINDOW, (0, 1e7), max_candidates=1000)


def test_pointset_file_roundtrip_bytes(tmp_path):
    for scheme, window in [
        (FIB, FIB_WINDOW),
        (make_scheme("periodic", 32), SET_A),
        (make_scheme("combined", 32),
         parse_window("[-1,1/tau)x{0,7,8,9,12,15,17,18,19,20,21,22,26,27,29,30}@32")),
    ]:
        ps = generate(scheme, window, (-50, 50))
        path = tmp_path / "pts.txt"
        save_pointset(ps, str(path))
        loaded = load_pointset(str(path))
        assert loaded.points == ps.points
        assert loaded.region == ps.region
        again = tmp_path / "pts2.txt"
        save_pointset(loaded, str(again))
        assert path.read_bytes() == again.read_bytes()


def test_load_rejects_corrupt_star(tmp_path):
    ps = generate(FIB, FIB_WINDOW, (-5, 5))
    path = tmp_path / "pts.txt"
    save_pointset(ps, str(path))
    lines = path.read_text().splitlines()
    lines.append("3 0")  # physical 3, star 3: far outside the window
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParameterError):
        load_pointset(str(path))
