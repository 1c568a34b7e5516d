import json
from pathlib import Path

import pytest

from fdnag.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write_ini(path, body):
    path.write_text(body, encoding="utf-8")
    return path


def tabular_ini(tmp_path, table, extra=""):
    return write_ini(tmp_path / "run.ini", f"""
[generation]
d1 = 6
d2 = 5
steps = 40
{extra}
[oracle]
type = tabular
path = {table}
""")


@pytest.fixture(scope="module")
def planted_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("tables") / "planted.csv"
    assert main(["gen-table", "--d1", "6", "--d2", "5", "--optimum", "4-0-3-1-4-0",
                 "--smoothness", "0.05", "--seed", "7", "--out", str(p)]) == 0
    return p


def test_gen_table_line_counts(tmp_path, planted_file):
    assert len(planted_file.read_text().splitlines()) == 15626
    small = tmp_path / "s.csv"
    assert main(["gen-table", "--d1", "2", "--d2", "2", "--optimum", "0-0", "--out", str(small)]) == 0
    assert small.read_text().splitlines()[0] == "genotype,fitness"
    assert len(small.read_text().splitlines()) == 5


def test_gen_table_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["gen-table", "--d1", "3", "--d2", "4", "--seed", "11", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_small_example(example_table, capsys):
    assert main(["verify", str(example_table)]) == 0
    assert capsys.readouterr().out.strip() == "0-1 0.9"


def test_verify_planted(planted_file, capsys):
    assert main(["verify", str(planted_file)]) == 0
    assert capsys.readouterr().out.strip() == "4-0-3-1-4-0 1.0"


def test_verify_cap_exceeded(planted_file, capsys):
    assert main(["verify", str(planted_file), "--cap", "100"]) == 2
    assert "cap" in capsys.readouterr().err


def test_run_top1_matches_verify(tmp_path, planted_file, capsys):
    ini = tabular_ini(tmp_path, planted_file)
    assert main(["run", "--config", str(ini), "--out", str(tmp_path / "out")]) == 0
    top1 = capsys.readouterr().out.strip()
    main(["verify", str(planted_file)])
    assert top1 == capsys.readouterr().out.strip()
    res = json.loads((tmp_path / "out" / "result.json").read_text())
    assert res["topk"][0]["genotype"] == "4-0-3-1-4-0"
    lines = (tmp_path / "out" / "trace.csv").read_text().splitlines()
    assert lines[0] == "t,best,mean,std,evals,ms" and len(lines) == 42


def test_run_same_seed_is_byte_identical(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for o in outs:
        assert main(["run", "--config", str(CONFIGS / "planted.ini"), "--seed", "1",
                     "--set", "steps=30", "--out", str(o)]) == 0
    for name in ("result.json", "trace.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_run_sphere_config(tmp_path, capsys):
    assert main(["run", "--config", str(CONFIGS / "sphere.ini"), "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("best ")
    res = json.loads((tmp_path / "result.json").read_text())
    assert len(res["best_latent"]) == 8


def test_missing_table_exit_code(tmp_path, capsys):
    ini = tabular_ini(tmp_path, tmp_path / "absent.csv")
    assert main(["run", "--config", str(ini), "--out", str(tmp_path / "o")]) == 3
    assert "absent.csv" in capsys.readouterr().err


def test_unknown_key_exit_code(tmp_path, capsys):
    ini = write_ini(tmp_path / "bad.ini", "[generation]\nwidth = 3\n")
    assert main(["run", "--config", str(ini)]) == 2
    assert "width" in capsys.readouterr().err


def test_bad_sigma_exit_code(tmp_path):
    assert main(["run", "--config", str(CONFIGS / "planted.ini"), "--set", "sigma=1.5",
                 "--out", str(tmp_path)]) == 2


def test_override_precedence_in_echo(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--config", str(CONFIGS / "planted.ini"), "--seed", "9",
                 "--set", "generation.steps=5", "--set", "n=12", "--out", str(out)]) == 0
    echo = json.loads((out / "result.json").read_text())["config"]
    gen = echo["generation"]
    assert (gen["seed"], gen["steps"], gen["n"]) == (9, 5, 12)
    assert "output" not in echo
