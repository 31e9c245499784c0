from __future__ import annotations

import pytest

from chainrouting.cli import main
from chainrouting.digraph import Digraph, complete_order, serialize_adjacency
from chainrouting.discovery import parse_csv

from conftest import DATA, GOLDEN

NESTED = str(DATA / "nested.adj")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_nested_table(capsys):
    code, out, _ = run_cli(capsys, "analyze", NESTED, "--origin", "s")
    assert code == 0
    header, row = out.splitlines()
    cells = dict(zip(header.split(), row.split()[1:]))
    assert cells["d"] == "3" and cells["s"] == "-"


def test_analyze_csv_round_trip(capsys):
    _, table, _ = run_cli(capsys, "analyze", NESTED, "--all-pairs")
    _, text, _ = run_cli(capsys, "analyze", NESTED, "--all-pairs", "--format", "csv")
    parsed = parse_csv(text)
    rows = table.splitlines()
    labels = rows[0].split()
    for row in rows[1:]:
        origin, *cells = row.split()
        for v, code in zip(labels, cells):
            if v != origin:
                assert parsed[(origin, v)].code == code


def test_analyze_all_pairs_arc_only(tmp_path, capsys):
    p = tmp_path / "star.adj"
    p.write_text(serialize_adjacency(Digraph.from_arcs("abc", [("a", "b"), ("b", "c")])))
    code, out, _ = run_cli(capsys, "analyze", str(p), "--all-pairs")
    assert code == 0
    assert out.splitlines()[1].split() == ["a", "-", "A", "A"]


def test_analyze_unknown_origin_lists_labels(capsys):
    code, _, err = run_cli(capsys, "analyze", NESTED, "--origin", "zz")
    assert code == 2
    assert "s a b c d e f g h i" in err


def test_analyze_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.adj"
    p.write_text("2\na b\n0 1\n")
    code, _, err = run_cli(capsys, "analyze", str(p), "--origin", "a")
    assert code == 2 and "line" in err


def test_analyze_writes_output_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run_cli(capsys, "analyze", NESTED, "--origin", "s", "--format", "csv", "-o", str(out))[0] == 0
    assert out.read_text().startswith("origin,dest,class,height,oracle_disjoint\n")


@pytest.mark.parametrize("name, code", [
    ("varadhan-baseline", 3), ("varadhan-chain", 0), ("griffin-baseline", 3),
    ("griffin-chain", 0), ("temporal-fig6", 0),
])
def test_simulate_exit_codes(name, code, capsys):
    rc, out, _ = run_cli(capsys, "simulate", name)
    assert rc == code
    assert out.startswith(name + ": ")


def test_simulate_trace_matches_golden(tmp_path, capsys):
    trace = tmp_path / "t.trace"
    run_cli(capsys, "simulate", "griffin-chain", "--trace", str(trace))
    assert trace.read_text() == (GOLDEN / "griffin-chain.trace").read_text()


def test_simulate_zero_ticks(capsys):
    code, out, _ = run_cli(capsys, "simulate", "varadhan-chain", "--max-ticks", "0")
    assert code == 4 and "exhausted after 0 ticks" in out


def test_simulate_validation_error(tmp_path, capsys):
    p = tmp_path / "bad.scn"
    p.write_text("[graph] file " + str(DATA / "varadhan.adj") + "\n[destination] d\n[events]\nt=1 fail_node q\n")
    code, _, err = run_cli(capsys, "simulate", str(p))
    assert code == 2
    assert "[events] line 3" in err


def test_simulate_random_seed(capsys):
    a = run_cli(capsys, "simulate", "--seed", "5", "--show-trace")
    b = run_cli(capsys, "simulate", "--seed", "5", "--show-trace")
    assert a == b and a[0] == 0


def test_simulate_needs_input(capsys):
    assert run_cli(capsys, "simulate")[0] == 2


def test_verify_table(capsys):
    code, out, _ = run_cli(capsys, "verify", "--n-max", "7")
    assert code == 0
    assert "all laws pass" in out
    assert "u=13 r=15" in out


def test_verify_small(capsys):
    _, out, _ = run_cli(capsys, "verify", "--n-max", "3")
    rows = [ln.split() for ln in out.splitlines()[1:3]]
    assert [r[4] for r in rows] == ["0", "0"]
    _, out, _ = run_cli(capsys, "verify", "--n-max", "2")
    row = out.splitlines()[1].split()
    assert row[:2] == ["2", "1"]
    assert not out.splitlines()[2].strip()


def test_verify_range_checked(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--n-max", "11"])
    assert info.value.code == 2


def test_histogram_complete_orders(tmp_path, capsys):
    paths = []
    for n in range(3, 8):
        p = tmp_path / f"k{n}.adj"
        p.write_text(serialize_adjacency(complete_order([f"v{i}" for i in range(n)])))
        paths.append(str(p))
    code, out, _ = run_cli(capsys, "histogram", *paths)
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()]
    assert rows[0] == ["height", "count", "arc_only"]
    heights = {int(r[0]) for r in rows[1:]}
    assert {2, 3, 4, 5, 6} <= heights


def test_histogram_arc_only_star(tmp_path, capsys):
    p = tmp_path / "star.adj"
    p.write_text(serialize_adjacency(Digraph.from_arcs("abcd", [("a", "b"), ("a", "c"), ("a", "d")])))
    _, out, _ = run_cli(capsys, "histogram", str(p))
    assert out.splitlines()[1:] == ["1,3,3"]


def test_histogram_skips_bad_files(tmp_path, capsys):
    bad = tmp_path / "bad.adj"
    bad.write_text("nonsense\n")
    code, out, err = run_cli(capsys, "histogram", str(bad), NESTED)
    assert code == 0 and "skipping" in err
    code, _, _ = run_cli(capsys, "histogram", str(bad))
    assert code == 2


def test_histogram_requires_files(capsys):
    with pytest.raises(SystemExit) as info:
        main(["histogram"])
    assert info.value.code == 2


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["analyze", NESTED, "--origin", "s", "--bogus"])
    assert info.value.code == 2
