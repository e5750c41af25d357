# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

import os

import pytest
import simplejson

from adelic_okounkov import cli
from adelic_okounkov.cli import EXIT_USAGE, run
from adelic_okounkov.exceptions import InstanceTooLargeError
from adelic_okounkov.ui_utils import CACHE_VARIABLE

from conftest import model_path


@pytest.fixture(autouse=True)
def no_cache(monkeypatch):
    monkeypatch.delenv(CACHE_VARIABLE, raising=False)


def _load(directory, name):
    with open(os.path.join(str(directory), name)) as json_file:
        return simplejson.load(json_file)


def test_validate(capsys):
    assert run(["model", "validate", model_path("flagship_p1")]) == 0
    out = capsys.readouterr().out
    assert "P^1 with O(1)" in out
    assert "Nef: nef" in out


def test_validate_rejects_non_concave_weights(capsys):
    assert run(["model", "validate", model_path("non_concave_p1")]) == \
        EXIT_USAGE
    assert "adelic_okounkov: error:" in capsys.readouterr().err


def test_validate_reports_json_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"dim": 1,\n "degree": }')
    assert run(["model", "validate", str(path)]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_missing_model_file(tmp_path):
    assert run(["count", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_usage_errors(tmp_path):
    assert run(["transmogrify"]) == EXIT_USAGE
    assert run(["avol", model_path("flagship_p1"), "--m", "0..3",
                "--output", str(tmp_path)]) == EXIT_USAGE
    assert run(["avol", model_path("flagship_p1"), "--face", "0,2",
                "--m", "2", "--output", str(tmp_path)]) == EXIT_USAGE


def test_oversized_instances_exit_with_usage(tmp_path, monkeypatch, capsys):
    def too_large(*args, **kwargs):
        raise InstanceTooLargeError("Bounding box holds 10^9 candidate "
                                    "points.")

    monkeypatch.setattr(cli, "volume_estimate", too_large)
    assert run(["avol", model_path("flagship_p1"), "--m", "2",
                "--output", str(tmp_path)]) == EXIT_USAGE
    assert "candidate points" in capsys.readouterr().err


def test_sections_and_counts(tmp_path):
    arguments = [model_path("flagship_p1"), "--m", "1,2", "--output",
                 str(tmp_path)]
    assert run(["sections", "enum"] + arguments + ["--limit", "3"]) == 0
    sections = _load(tmp_path, "sections.json")
    assert [entry["count"]["count"] for entry in sections["levels"]] == \
        [5, 63]
    assert run(["count"] + arguments) == 0
    counts = _load(tmp_path, "counts.json")
    assert counts["schema_version"] == 1
    assert [entry["count"] for entry in counts["counts"]] == [5, 63]


def test_avol_is_reproducible(tmp_path):
    outputs = []
    for name in ("first", "second"):
        output = tmp_path / name
        assert run(["avol", model_path("flagship_p1"), "--m", "4,8,16",
                    "--extrapolate", "--deterministic",
                    "--output", str(output)]) == 0
        outputs.append(output)
    for name in ("avol_face-0-1.csv", "avol_face-0-1.json"):
        with open(str(outputs[0] / name), "rb") as first, \
                open(str(outputs[1] / name), "rb") as second:
            assert first.read() == second.read()
    report = _load(outputs[0], "avol_face-0-1.json")
    assert report["schema_version"] == 1
    assert report["extrapolated"] is not None


def test_flag_and_semigroup(tmp_path):
    arguments = [model_path("flagship_p1"), "--p", "11", "--m-max", "8",
                 "--output", str(tmp_path)]
    assert run(["flag", "find"] + arguments) == 0
    flags = _load(tmp_path, "flags.json")["flags"]
    assert flags[0]["flag"]["center"] == [0]
    assert run(["semigroup", "build"] + arguments) == 0
    sample = _load(tmp_path, "semigroups.json")["samples"][0]
    assert sample["rank"] == 3
    assert sample["generates"]
    assert sample["kappa_hat"] == 1


def test_verify_yuan(tmp_path, capsys):
    assert run(["verify", "yuan", model_path("flagship_p1"), "--p", "11,13",
                "--m", "2..6", "--output", str(tmp_path)]) == 0
    names = sorted(os.listdir(str(tmp_path)))
    assert len(names) == 10
    assert names[0] == "yuan_theorem_000.json"
    assert "10 certificates" in capsys.readouterr().out


def test_verify_counting(tmp_path):
    assert run(["verify", "counting", "--instances", "20", "--seed", "3",
                "--output", str(tmp_path)]) == 0
    assert len(os.listdir(str(tmp_path))) == 20
    certificate = _load(tmp_path, "counting_lemma_000.json")
    assert certificate["pass"]


def test_verify_brunn_minkowski(tmp_path):
    assert run(["verify", "brunn-minkowski", model_path("flagship_p1"),
                "--other", model_path("log3_p1"), "--m", "24,48",
                "--output", str(tmp_path)]) == 0


def test_verify_needs_a_nef_model(tmp_path, capsys):
    assert run(["verify", "nef-equality", model_path("positive_p2"),
                "--m", "2,4", "--output", str(tmp_path)]) == EXIT_USAGE
    assert "allow_undetermined" in capsys.readouterr().err


def test_report_bundle(tmp_path):
    assert run(["report", "bundle", model_path("flagship_p1"), "--m", "16,32",
                "--m-max", "8", "--output", str(tmp_path)]) == 0
    index = _load(tmp_path, "index.json")
    assert index["schema_version"] == 1
    assert "avol_face-0-1.csv" in index["files"]
    assert index["certificates"]
    assert all(name.startswith("certificate_")
               for name in index["certificates"])
    assert index["stable_base_locus"]["components"] == []
    for name in index["files"]:
        assert os.path.exists(os.path.join(str(tmp_path), name))
