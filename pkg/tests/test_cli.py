"""End-to-end CLI behavior: exit codes, byte determinism, file formats."""

import io
import json

import pytest

from mmsalloc import cli
from mmsalloc.errors import InvariantViolation
from mmsalloc.jsonio import dump_json, instance_to_json, load_instance


def run_cli(argv):
    return cli.main(argv)


def gen_file(tmp_path, name, n, m, seed, dist="uniform:1:100"):
    path = tmp_path / name
    rc = run_cli(
        [
            "gen",
            "--n",
            str(n),
            "--m",
            str(m),
            "--dist",
            dist,
            "--seed",
            str(seed),
            "--output",
            str(path),
        ]
    )
    assert rc == 0
    return path


def test_gen_is_byte_deterministic(tmp_path):
    a = gen_file(tmp_path, "a.json", 3, 8, 42)
    b = gen_file(tmp_path, "b.json", 3, 8, 42)
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["agents"] == 3 and doc["items"] == 8
    assert len(doc["valuations"]) == 3
    assert all(len(row) == 8 for row in doc["valuations"])


def test_gen_round_trips_through_loader(tmp_path):
    path = gen_file(tmp_path, "inst.json", 4, 9, 5, dist="correlated:0:50:10")
    text = path.read_text()
    inst = load_instance(text)
    assert dump_json(instance_to_json(inst)) == text


def test_mms_prints_value_then_partition(capsys):
    assert run_cli(["mms", "--values", "4,3,2,1", "--k", "2"]) == 0
    assert capsys.readouterr().out == "5\n{4,1},{3,2}\n"


def test_mms_accepts_fractions(capsys):
    assert run_cli(["mms", "--values", "1/2,1/2,1/3", "--k", "2"]) == 0
    assert capsys.readouterr().out == "1/2\n{1/2,1/3},{1/2}\n"


@pytest.mark.parametrize("algorithm", ["poly34", "exist34", "exist34plus"])
def test_solve_with_verification_passes(tmp_path, algorithm):
    inst = gen_file(tmp_path, "inst.json", 3, 9, 11)
    out = tmp_path / "alloc.json"
    rc = run_cli(
        [
            "solve",
            "--input",
            str(inst),
            "--algorithm",
            algorithm,
            "--verify",
            "--output",
            str(out),
        ]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["verify"]["overall"] is True
    assert len(doc["bundles"]) == 3
    assert doc["stats"]["update_loop_iterations"] >= 0


def test_solve_is_byte_deterministic(tmp_path):
    inst = gen_file(tmp_path, "inst.json", 4, 11, 3)
    outs = []
    for name in ("x.json", "y.json"):
        out = tmp_path / name
        rc = run_cli(["solve", "--input", str(inst), "--output", str(out)])
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_solve_reads_stdin_writes_stdout(tmp_path, capsys, monkeypatch):
    inst = gen_file(tmp_path, "inst.json", 2, 6, 9)
    monkeypatch.setattr("sys.stdin", io.StringIO(inst.read_text()))
    rc = run_cli(["solve", "--input", "-"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["bundles"]) == 2


def test_verify_subcommand_accepts_good_allocation(tmp_path, capsys):
    inst = gen_file(tmp_path, "inst.json", 3, 8, 21)
    alloc = tmp_path / "alloc.json"
    assert (
        run_cli(["solve", "--input", str(inst), "--output", str(alloc)]) == 0
    )
    rc = run_cli(
        ["verify", "--input", str(inst), "--allocation", str(alloc)]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["overall"] is True and doc["alpha"] == "3/4"


def test_verify_subcommand_flags_bad_allocation(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(
        dump_json(
            {
                "agents": 2,
                "items": 4,
                "valuations": [[4, 3, 2, 1], [4, 3, 2, 1]],
            }
        )
    )
    alloc = tmp_path / "alloc.json"
    alloc.write_text(
        dump_json(
            {
                "bundles": [[], [0, 1, 2, 3]],
                "leftover_folded_into": None,
                "stats": None,
            }
        )
    )
    rc = run_cli(["verify", "--input", str(inst), "--allocation", str(alloc)])
    assert rc == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["overall"] is False
    assert doc["per_agent"][0]["pass"] is False


def test_verify_alpha_flag(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(
        dump_json(
            {
                "agents": 2,
                "items": 4,
                "valuations": [[4, 3, 2, 1], [4, 3, 2, 1]],
            }
        )
    )
    alloc = tmp_path / "alloc.json"
    alloc.write_text(
        dump_json(
            {
                "bundles": [[2, 3], [0, 1]],
                "leftover_folded_into": None,
                "stats": None,
            }
        )
    )
    # bundle {2,1} is worth 3 against a share of 5: passes at 1/2, not 3/4
    assert (
        run_cli(
            [
                "verify",
                "--input",
                str(inst),
                "--allocation",
                str(alloc),
                "--alpha",
                "1/2",
            ]
        )
        == 0
    )
    capsys.readouterr()
    assert (
        run_cli(["verify", "--input", str(inst), "--allocation", str(alloc)])
        == 1
    )
    capsys.readouterr()


def bad_input_cases(tmp_path):
    not_json = tmp_path / "broken.json"
    not_json.write_text("{")
    floats = tmp_path / "floats.json"
    floats.write_text(
        dump_json({"agents": 1, "items": 2, "valuations": [[0.25, 1.5]]})
    )
    return [
        ["solve", "--input", str(tmp_path / "missing.json")],
        ["solve", "--input", str(not_json)],
        ["solve", "--input", str(floats)],
        ["mms", "--values", "4,abc", "--k", "2"],
        ["mms", "--values", "4,3", "--k", "0"],
        ["mms", "--values", "", "--k", "2"],
        ["gen", "--n", "3", "--m", "5", "--dist", "nope:1:2"],
        ["gen", "--n", "0", "--m", "5"],
        ["bench", "--trials", "0"],
        ["bench", "--algorithms", "poly34,quux"],
    ]


def test_input_errors_exit_2(tmp_path, capsys):
    for argv in bad_input_cases(tmp_path):
        assert run_cli(argv) == 2, argv
        err = capsys.readouterr().err
        assert err.startswith("error:"), argv


def test_invariant_violations_exit_3(tmp_path, capsys, monkeypatch):
    inst = gen_file(tmp_path, "inst.json", 2, 5, 1)

    def boom(name, instance, oracle_cap):
        raise InvariantViolation("synthetic failure")

    monkeypatch.setattr(cli, "_run_algorithm", boom)
    assert run_cli(["solve", "--input", str(inst)]) == 3
    assert capsys.readouterr().err.startswith("internal error:")


def bench_lines(tmp_path, name, extra=()):
    out = tmp_path / name
    rc = run_cli(
        [
            "bench",
            "--trials",
            "4",
            "--n",
            "3",
            "--m",
            "9",
            "--seed",
            "100",
            "--algorithms",
            "poly34,exist34plus",
            "--output",
            str(out),
            *extra,
        ]
    )
    assert rc == 0
    return out.read_text().splitlines()


def test_bench_csv_shape_and_guarantees(tmp_path):
    lines = bench_lines(tmp_path, "bench.csv")
    assert lines[0] == (
        "trial,algorithm,n,m,seed,min_ratio,"
        "update_loop_iterations,bag_rounds,wall_time_s"
    )
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 4 * 2
    from fractions import Fraction

    cap = 4 * 3**3 + 16
    for row in rows:
        assert row[1] in ("poly34", "exist34plus")
        assert row[2] == "3" and row[3] == "9"
        assert Fraction(row[5]) >= Fraction(3, 4)
        assert int(row[6]) <= cap
        float(row[8])  # wall time parses; the one non-exact column


def test_bench_deterministic_apart_from_wall_time(tmp_path):
    first = bench_lines(tmp_path, "one.csv")
    second = bench_lines(tmp_path, "two.csv")

    def strip_wall(lines):
        return [line.rsplit(",", 1)[0] for line in lines]

    assert strip_wall(first) == strip_wall(second)
