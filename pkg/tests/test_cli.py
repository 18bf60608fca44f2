"""End-to-end CLI behaviour: outputs, exit codes, reproducibility."""

import json

import pytest

from modelsets.cli import (EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFY,
                           expand_window_literal, main)


def run(*argv):
    return main(list(argv))


def test_generate_fibonacci_example(tmp_path):
    out = tmp_path / "pts.txt"
    code = run("generate", "--scheme", "fibonacci", "--window", "[-1,1/tau)",
               "--region", "-2", "2", "-o", str(out))
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# modelsets pointset scheme=fibonacci")
    assert lines[1:] == ["-1 0", "0 0", "0 1"]


def test_generate_alias_window(tmp_path):
    out = tmp_path / "a.txt"
    code = run("generate", "--scheme", "periodic:32", "--window", "A",
               "--region", "0", "31", "-o", str(out))
    assert code == EXIT_OK
    body = [int(x) for x in out.read_text().splitlines()[1:]]
    assert len(body) == 16 and body[0] == 0 and body[-1] == 30


def test_generate_empty_window_succeeds(tmp_path):
    out = tmp_path / "e.txt"
    code = run("generate", "--scheme", "periodic:32", "--window", "{5}@32",
               "--region", "6", "7", "-o", str(out))
    assert code == EXIT_OK
    assert out.read_text().splitlines()[1:] == []


def test_generate_bad_window_literal(tmp_path):
    code = run("generate", "--scheme", "fibonacci", "--window", "[oops",
               "--region", "0", "1", "-o", str(tmp_path / "x.txt"))
    assert code == EXIT_USAGE


def test_generate_resource_limit(tmp_path):
    code = run("generate", "--scheme", "fibonacci", "--window", "fib",
               "--region", "0", "1e9", "-o", str(tmp_path / "x.txt"))
    assert code == EXIT_RESOURCE


def test_correlate_contains_expected_row(tmp_path):
    out = tmp_path / "corr.csv"
    code = run("correlate", "--scheme", "fibonacci", "--window", "fib",
               "--order", "2", "--cutoff", "5", "-o", str(out))
    assert code == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "diff1,frequency"
    tau_row = [r for r in rows if r.startswith("0+1*tau,")]
    assert tau_row and tau_row[0].split(",")[1].startswith("0.4472135954999")


def test_correlate_compare_thinned_pair(tmp_path):
    out = tmp_path / "cmp.csv"
    code = run("correlate", "--scheme", "combined:32", "--window", "fib x A",
               "--compare", "fib x B", "--order", "3", "--cutoff", "4",
               "-o", str(out))
    assert code == EXIT_OK


def test_correlate_compare_detects_difference(tmp_path):
    out = tmp_path / "cmp2.csv"
    code = run("correlate", "--scheme", "periodic:32", "--window", "A",
               "--compare", "{0,1,2}@32", "--order", "2", "--cutoff", "4",
               "-o", str(out))
    assert code == EXIT_VERIFY


def test_diffract_outputs_and_reproducibility(tmp_path):
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    svg = tmp_path / "s.svg"
    assert run("diffract", "--scheme", "periodic:32", "--window", "A",
               "-o", str(out1), "--svg", str(svg)) == EXIT_OK
    assert run("diffract", "--scheme", "periodic:32", "--window", "A",
               "-o", str(out2)) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    rows = out1.read_text().splitlines()
    assert rows[0] == "b,k,intensity"
    assert len(rows) == 34  # header + b = 0..32
    first = rows[1].split(",")
    assert first[0] == "0" and float(first[2]) == pytest.approx(0.25)
    assert svg.read_text().startswith("<svg")


def test_diffract_kmax_zero_single_central_peak(tmp_path):
    out = tmp_path / "k0.csv"
    assert run("diffract", "--scheme", "periodic:32", "--window", "A",
               "--kmax", "0", "-o", str(out)) == EXIT_OK
    rows = out.read_text().splitlines()
    assert len(rows) == 2
    b, k, inten = rows[1].split(",")
    assert (b, k) == ("0", "0") and float(inten) == pytest.approx(0.25)


def test_diffract_equal_spectra_for_pair(tmp_path):
    oa, ob = tmp_path / "a.csv", tmp_path / "b.csv"
    run("diffract", "--scheme", "periodic:32", "--window", "A", "-o", str(oa))
    run("diffract", "--scheme", "periodic:32", "--window", "B", "-o", str(ob))
    rows_a = [r.split(",") for r in oa.read_text().splitlines()[1:]]
    rows_b = [r.split(",") for r in ob.read_text().splitlines()[1:]]
    for ra, rb in zip(rows_a, rows_b):
        assert ra[0] == rb[0]
        assert abs(float(ra[2]) - float(rb[2])) < 1e-12


def test_reconstruct_selftest(tmp_path):
    out = tmp_path / "rep.json"
    csv = tmp_path / "rec.csv"
    code = run("reconstruct", "--selftest", "--window", "[0,1)u[1.5,2.25)",
               "--grid", "512", "-o", str(out), "--csv", str(csv))
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["mismatch"] < 0.01
    assert csv.read_text().splitlines()[0] == "cell,x,recovered"


def test_reconstruct_bad_literal(tmp_path):
    code = run("reconstruct", "--window", "[0,1", "-o", str(tmp_path / "r.json"))
    assert code == EXIT_USAGE


def test_homometry_default_run(tmp_path, capsys):
    out = tmp_path / "rep.txt"
    code = run("homometry", "-o", str(out))
    assert code == EXIT_OK
    text = out.read_text()
    assert "order-2 tables: equal [PASS]" in text
    assert "order-4 tables: differ" in text
    assert "rigid motions" in text


def test_homometry_order4_witness(capsys):
    code = run("homometry", "--order", "4")
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "witness" in text


def test_homometry_same_set(capsys):
    code = run("homometry", "--sets", "A", "A")
    assert code == EXIT_OK
    assert "rigid equivalence: (1, 0)" in capsys.readouterr().out


def test_alias_expansion():
    assert expand_window_literal("fib") == "[-1,1/tau)"
    expanded = expand_window_literal("fib x A")
    assert expanded.startswith("[-1,1/tau)x{0,7,8,9,")
    assert expand_window_literal("[0,1)") == "[0,1)"
