"""CLI subcommands end to end (in-process)."""

from __future__ import annotations

import json

import pytest

from bandit_tutor.cli import main
from bandit_tutor.curriculum import generate_synthetic_curriculum, save_curriculum


@pytest.fixture
def curriculum_file(tmp_path):
    path = tmp_path / "curriculum.json"
    save_curriculum(generate_synthetic_curriculum(1, 2, 3, seed=1), path)
    return path


class TestValidate:
    def test_valid_file(self, curriculum_file, capsys):
        assert main(["validate", "--curriculum", str(curriculum_file)]) == 0
        assert "ok:" in capsys.readouterr().out

    def test_invalid_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"sections": []}')
        assert main(["validate", "--curriculum", str(bad)]) == 1
        assert "invalid" in capsys.readouterr().err


class TestDeriveDifficulty:
    def test_writes_difficulty_map(self, tmp_path, capsys):
        responses = tmp_path / "responses.csv"
        responses.write_text("problem_id,correct\np1,0\np1,1\np2,1\n")
        out = tmp_path / "difficulties.json"
        code = main(
            ["derive-difficulty", "--responses", str(responses), "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text()) == {"p1": 3.0, "p2": 1.0}


class TestSimulate:
    def test_synthetic_run_emits_artifacts(self, tmp_path, capsys):
        out = tmp_path / "results"
        code = main(
            [
                "simulate",
                "--curriculum", "synthetic:1x2x3",
                "--students", "4",
                "--seed", "3",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "curves.csv").exists()
        assert (out / "counts.csv").exists()
        assert (out / "curves.png").exists()
        assert any((out / "logs").iterdir())
        assert "seed=3" in capsys.readouterr().out

    def test_env_seed_override(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("BANDIT_TUTOR_SEED", "99")
        out = tmp_path / "results"
        main(
            [
                "simulate",
                "--curriculum", "synthetic:1x1x2",
                "--students", "2",
                "--seed", "3",
                "--out", str(out),
            ]
        )
        assert "seed=99" in capsys.readouterr().out

    def test_group_subset_and_unknown_group(self, tmp_path, capsys):
        out = tmp_path / "results"
        code = main(
            [
                "simulate",
                "--curriculum", "synthetic:1x1x2",
                "--students", "2",
                "--groups", "full",
                "--out", str(out),
            ]
        )
        assert code == 0
        text = (out / "curves.csv").read_text()
        assert "full" in text and "random" not in text
        assert main(
            [
                "simulate",
                "--curriculum", "synthetic:1x1x2",
                "--students", "2",
                "--groups", "bogus",
                "--out", str(out),
            ]
        ) == 2

    def test_curriculum_file_input(self, curriculum_file, tmp_path):
        out = tmp_path / "results"
        code = main(
            [
                "simulate",
                "--curriculum", str(curriculum_file),
                "--students", "2",
                "--out", str(out),
            ]
        )
        assert code == 0

    def test_bkt_params_file(self, curriculum_file, tmp_path):
        cur = generate_synthetic_curriculum(1, 2, 3, seed=1)
        params = {
            cid: {"prior": 0.2, "learn": 0.2, "guess": 0.2, "slip": 0.1}
            for cid in cur.concepts
        }
        params_file = tmp_path / "params.json"
        params_file.write_text(json.dumps(params))
        out = tmp_path / "results"
        code = main(
            [
                "simulate",
                "--curriculum", str(curriculum_file),
                "--students", "2",
                "--bkt-params", str(params_file),
                "--out", str(out),
            ]
        )
        assert code == 0


class TestPlot:
    def test_rerender_from_csv(self, tmp_path, capsys):
        out = tmp_path / "results"
        main(
            [
                "simulate",
                "--curriculum", "synthetic:1x1x2",
                "--students", "2",
                "--out", str(out),
            ]
        )
        (out / "curves.png").unlink()
        assert main(["plot", "--in", str(out)]) == 0
        assert (out / "curves.png").exists()
