import hashlib
import json
import subprocess
import sys

import pytest

from conemetric.cli import (EXIT_NONEXISTENT, EXIT_OK, EXIT_UNDETERMINED, EXIT_USAGE, _glue_beta,
                            main)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_glue_beta():
    assert _glue_beta(["exists", "--beta", "-0.5,1,2"]) == ["exists", "--beta=-0.5,1,2"]
    assert _glue_beta(["exists", "--beta=1,1,2"]) == ["exists", "--beta=1,1,2"]


@pytest.mark.parametrize("beta,code,exists", [
    ("-1/2,-1/2,-1/2", EXIT_OK, True),
    ("0.5,1,0.5", EXIT_NONEXISTENT, False),
    ("1,1,2", EXIT_OK, True),
    ("1,1,1", EXIT_NONEXISTENT, False),
    ("0.9,0.9,-0.9", EXIT_NONEXISTENT, False),
    ("0.5,2,0.5", EXIT_OK, True),
    ("1,2,0.5", EXIT_NONEXISTENT, False),
])
def test_exists_exit_codes(capsys, beta, code, exists):
    got, doc = run(capsys, "exists", "--beta", beta)
    assert got == code
    assert doc["exists"] is exists
    assert doc["config"]["subcommand"] == "exists"


def test_usage_errors(capsys):
    assert main(["exists", "--beta", "1,2"]) == EXIT_USAGE
    assert main(["exists", "--beta", "a,b,c"]) == EXIT_USAGE
    assert main(["sample", "--beta", "1,1,2", "--res", "2"]) == EXIT_USAGE
    assert main(["unitarize", "--beta", "1,1,2"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--beta", "1,1,2"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["exists"])
    assert exc.value.code == EXIT_USAGE


def test_classify_reports_class(capsys):
    code, doc = run(capsys, "classify", "--beta", "0.5,2,0.5")
    assert code == EXIT_OK
    assert doc["class"] == "H1-reducible"
    assert doc["solutions"] == 2


def test_monodromy_and_unitarize(capsys):
    code, doc = run(capsys, "monodromy", "--beta", "-1/2,-1/2,-1/2", "--deterministic")
    assert code == EXIT_OK
    assert max(doc["trace_residuals"]) < 1e-7
    code, doc = run(capsys, "unitarize", "--beta", "-1/2,-1/2,-1/2", "--deterministic")
    assert code == EXIT_OK
    assert doc["unitarity_residual"] < 1e-8
    assert doc["deformation"]["tag"] == "Point"
    code, doc = run(capsys, "unitarize", "--beta", "0.9,0.9,-0.9")
    assert code == EXIT_NONEXISTENT


def test_solve_reducible(capsys):
    code, doc = run(capsys, "solve-reducible", "--beta", "2,2,2", "--deterministic")
    assert code == EXIT_OK
    assert doc["N"] == 1
    code, _ = run(capsys, "solve-reducible", "--beta", "0.5,1,0.5")
    assert code == EXIT_NONEXISTENT


def test_sample_writes_artifacts(capsys, tmp_path):
    code, doc = run(capsys, "sample", "--beta", "1,1,2", "--res", "40", "--out", str(tmp_path),
                    "--deterministic")
    assert code == EXIT_OK
    assert abs(doc["area_rel_err"]) < 1e-3
    assert (tmp_path / "sample.csv").exists()
    saved = json.loads((tmp_path / "sample.json").read_text())
    assert saved == doc
    assert saved["config"]["res"] == 40


def test_pipeline_flags_under_resolved_grid(capsys):
    code, doc = run(capsys, "pipeline", "--beta", "0.5,2,0.5", "--res", "40", "--deterministic")
    assert code == 1
    assert doc["checks"]["area_rel_err"] is False
    code, doc = run(capsys, "pipeline", "--beta", "1,1,2", "--res", "60", "--deterministic")
    assert code == EXIT_OK
    assert all(doc["checks"].values())


def test_deterministic_output_is_reproducible(tmp_path):
    digests = []
    out = tmp_path / "run"
    for _ in range(2):
        subprocess.run([sys.executable, "-m", "conemetric", "unitarize", "--beta", "-0.3,0.4,-0.6",
                        "--deterministic", "--out", str(out)], check=True, capture_output=True)
        digests.append(hashlib.sha256((out / "unitarize.json").read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_timings_present_without_flag(capsys):
    _, doc = run(capsys, "exists", "--beta", "1,1,2")
    assert "elapsed_seconds" in doc
    _, doc = run(capsys, "exists", "--beta", "1,1,2", "--deterministic")
    assert "elapsed_seconds" not in doc


def test_undetermined_exit_code(capsys, monkeypatch):
    from conemetric import cli, errors

    def boom(*a, **k):
        raise errors.NoSolution("search exhausted", proven=False)
    monkeypatch.setattr(cli, "_solve_reducible", boom)
    code, doc = run(capsys, "exists", "--beta", "0.5,2,0.5")
    assert code == EXIT_UNDETERMINED
    assert doc["exists"] is None
