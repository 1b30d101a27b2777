from __future__ import annotations

import json

import pytest

from hodgeideals import (ParseError, corpus_names, format_divisor_file, ideal_equal, load_corpus,
                         parse_divisor_file, parse_divisor_text)
from hodgeideals.cli import (EXIT_BUDGET, EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, RunReport, main, run_command,
                             serialize)

A2 = """\
[divisor]
variables = x, y, z
h = (x-y)*(x-z)*(y-z)

[saito_basis]
delta1 = Dx + Dy + Dz
delta2 = x^2*Dx + y^2*Dy + z^2*Dz
chi = 1/3*x*Dx + 1/3*y*Dy + 1/3*z*Dz

[bfunction]
roots = -1:2, -2/3:1, -4/3:1
"""


# file format --------------------------------------------------------------------------

def test_parse_a2_file():
    f = parse_divisor_text(A2)
    assert str(f.spec.h) == str(f.spec.ring.parse("(x-y)*(x-z)*(y-z)"))
    assert f.bfunction.format_roots() == "-4/3:1, -1:2, -2/3:1"
    assert f.spec.chi_index == 2 and not f.warnings


def test_exact_rational_coefficients():
    f = parse_divisor_text(A2.replace("1/3*x*Dx", "2/6*x*Dx"))
    assert str(f.spec.chi[0]) == "1/3*x"


def test_basis_arity_error():
    text = A2.replace("delta2 = x^2*Dx + y^2*Dy + z^2*Dz\n", "")
    with pytest.raises(ParseError, match="basis arity"):
        parse_divisor_text(text)


def test_whitney_accepted_with_warning():
    f = load_corpus("whitney_umbrella")
    assert f.flags["extended_scope"]
    assert len(f.spec.fields) == 4
    assert any("extended scope" in w for w in f.warnings)
    assert f.spec.chi == tuple(f.spec.ring.parse(t) for t in ("1/2*x", "1/3*y", "1/3*z"))


@pytest.mark.parametrize("text,line,column", [
    (A2.replace("h = (x-y)*(x-z)*(y-z)", "h = (x-y)*(x-z)*(y-"), 3, 20),
    (A2.replace("h = (x-y)*(x-z)*(y-z)", "h = (x-q)*(x-z)"), 3, 8),
    (A2.replace("delta1 = Dx + Dy + Dz", "delta1 = Dx + Dy + Dw"), 6, 20),
    (A2.replace("[flags]", "") + "[nonsense]\n", 12, 2),
])
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_divisor_text(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_parse_error_messages():
    with pytest.raises(ParseError, match="unknown variable"):
        parse_divisor_text(A2.replace("h = (x-y)*(x-z)*(y-z)", "h = x*q"))
    with pytest.raises(ParseError, match="weights arity"):
        parse_divisor_text(A2.replace("h = (x-y)*(x-z)*(y-z)", "h = (x-y)*(x-z)*(y-z)\nweights = 1, 1"))
    with pytest.raises(ParseError, match="chi"):
        parse_divisor_text(A2.replace("chi =", "delta3 ="))


def test_parse_file_from_disk(tmp_path):
    p = tmp_path / "a2.div"
    p.write_text(A2)
    f = parse_divisor_file(p)
    assert f.source == str(p)


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trip(name):
    f = load_corpus(name)
    text = format_divisor_file(f.spec, f.bfunction, f.flags)
    g = parse_divisor_text(text)
    assert g.spec.ring.names == f.spec.ring.names
    assert g.spec.h == f.spec.h
    assert g.spec.fields == f.spec.fields
    assert g.spec.chi_index == f.spec.chi_index
    assert g.spec.weights == f.spec.weights
    assert g.bfunction == f.bfunction
    assert g.flags == f.flags
    assert format_divisor_file(g.spec, g.bfunction, g.flags) == text


def test_corpus_has_every_example():
    names = set(corpus_names())
    assert {"a2_arrangement", "d3_arrangement", "binary_cubics", "d4_quiver", "d5_quiver", "whitney_umbrella",
            "cross_cap", "lfd_sym3"} <= names
    assert {f"sekiguchi_{n}" for n in ("a1", "a2", "b1", "b3", "h2", "h5")} <= names


# CLI ---------------------------------------------------------------------------------

def run(argv):
    report, code, fmt = run_command(argv)
    return report, code


NC = ("[divisor]\nvariables = x, y\nh = x*y\n[saito_basis]\ndelta1 = x*Dx - y*Dy\n"
      "chi = 1/2*x*Dx + 1/2*y*Dy\n[bfunction]\nroots = -1:2\n")


def test_i0_text_output(capsys):
    assert main(["i0", "a2_arrangement"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "I_0 = (y - z, x - z)"


def test_empty_warnings_omitted_in_text_only(tmp_path, capsys):
    p = tmp_path / "nc.div"
    p.write_text(NC)
    assert main(["i0", str(p)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "I_0 = (1)"
    assert "# warning" not in out
    report, _ = run(["i0", str(p), "--format", "json"])
    assert json.loads(serialize(report, "json"))["warnings"] == []


def test_i0_b3(capsys):
    assert main(["i0", "corpus:sekiguchi_b3"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "I_0 = (z, y^2)"


def test_json_report_round_trip():
    report, code = run(["hodge", "binary_cubics", "--level", "1", "--format", "json"])
    assert code == EXIT_OK
    data = json.loads(serialize(report, "json"))
    assert data["schema"] == "hodgeideals.report/1"
    assert data["warnings"] == []
    again = RunReport.from_dict(data)
    assert again == report
    ideals = again.ideals()
    assert set(ideals) == {("I", 0), ("I", 1)}
    from conftest import computation

    assert ideal_equal(ideals[("I", 1)], computation("binary_cubics").ideal(1))
    rec = data["results"][0]
    assert {"level", "generators", "order", "provenance"} <= set(rec)


def test_text_and_json_carry_the_same_content():
    report, _ = run(["genlevel", "binary_cubics", "--max", "3"])
    text = serialize(report, "text").decode()
    assert text.splitlines()[0] == "generating level = 1"
    data = json.loads(serialize(report, "json"))
    assert data["results"][0]["level"] == 1


def test_serialization_is_deterministic():
    a, _ = run(["hodge", "a2_arrangement", "--level", "2", "--format", "json"])
    b, _ = run(["hodge", "a2_arrangement", "--level", "2", "--format", "json"])
    assert a.results == b.results


def test_check_on_corpus_example(capsys):
    assert main(["check", "a2_arrangement"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "saito criterion: ok" in out and "strong koszul: ok" in out


def test_check_whitney_warns_about_symmetry(capsys):
    assert main(["check", "whitney_umbrella"]) == EXIT_OK
    captured = capsys.readouterr()
    assert "not symmetric" in captured.err
    assert "# warning: b-function" in captured.out


def test_check_non_free_basis_exits_2_with_determinant(tmp_path, capsys):
    p = tmp_path / "bad.div"
    p.write_text("[divisor]\nvariables = x, y\nh = x*y\n[saito_basis]\ndelta1 = x*Dx\nchi = x*Dy\n")
    assert main(["check", str(p)]) == EXIT_INVARIANT
    assert "det = x^2" in capsys.readouterr().out


def test_input_errors_exit_4(tmp_path, capsys):
    assert main(["i0", "no_such_example"]) == EXIT_INPUT
    p = tmp_path / "broken.div"
    p.write_text(A2.replace("h = (x-y)*(x-z)*(y-z)", "h = (x-y"))
    assert main(["i0", str(p)]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert f"{p}:3:" in err
    with pytest.raises(SystemExit) as info:
        main(["hodge", "a2_arrangement"])  # missing --level
    assert info.value.code == EXIT_INPUT
    assert main(["hodge", "a2_arrangement", "--level", "-1"]) == EXIT_INPUT


def test_budget_exceeded_exits_3(capsys):
    assert main(["i0", "d3_arrangement", "--degree-bound", "3"]) == EXIT_BUDGET
    assert "budget_exceeded" in capsys.readouterr().err


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("HODGEIDEALS_PAIR_LIMIT", "3")
    report, code = run(["i0", "d3_arrangement"])
    assert code == EXIT_BUDGET and report.budgets["pair_limit"] == 3
    report, code = run(["i0", "d3_arrangement", "--pair-limit", "0"])
    assert code == EXIT_OK and report.budgets["pair_limit"] is None
    monkeypatch.setenv("HODGEIDEALS_PAIR_LIMIT", "lots")
    assert run(["i0", "a2_arrangement"])[1] == EXIT_INPUT


def test_hodge_minimal_and_check():
    report, code = run(["hodge", "binary_cubics", "--level", "1", "--minimal", "--check"])
    assert code == EXIT_OK
    ideal_1 = [r for r in report.results if r["kind"] == "ideal" and r["level"] == 1][0]
    assert ideal_1["minimal"] and len(ideal_1["generators"]) == 7
    incl = [r for r in report.results if r["kind"] == "inclusions"][0]
    assert incl["ok"]


def test_ord_command():
    report, code = run(["ord", "normal_crossing_xy", "--level", "1"])
    assert code == EXIT_OK
    assert report.results[1]["generators"] == ["y", "x"]


def test_i0_routes_agree():
    ideals = [run(["i0", "sekiguchi_a2", "--route", r])[0].ideals()[("I", 0)]
              for r in ("elimination", "project", "intersect")]
    assert ideal_equal(ideals[0], ideals[1]) and ideal_equal(ideals[0], ideals[2])


def test_bfun_command(tmp_path):
    p = tmp_path / "nc.div"
    p.write_text(NC.split("[bfunction]")[0])
    report, code = run(["bfun", str(p)])
    assert code == EXIT_OK
    assert report.results[0]["roots"] == "-1:2"
    report, code = run(["bfun", str(p), "--method", "eliminate"])
    assert report.results[0]["roots"] == "-1:2"


def test_missing_bfunction_is_computed_with_warning(tmp_path):
    p = tmp_path / "a2.div"
    p.write_text(A2.split("[bfunction]")[0])
    report, code = run(["i0", str(p)])
    assert code == EXIT_OK
    assert any("computing b(s)" in w for w in report.warnings)
