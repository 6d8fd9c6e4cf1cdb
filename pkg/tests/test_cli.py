import json
import pathlib
import subprocess
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "catmodel.cli", *args],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )


class TestClassifierCommand:
    def test_builds_s(self):
        out = run_cli("classifier", "S", "--flavor", "preadd+")
        assert out.returncode == 0
        assert "3 objects" in out.stdout

    def test_p_plus_inconclusive(self):
        out = run_cli("classifier", "P+", "--flavor", "cat+")
        assert out.returncode == 2

    def test_wrong_flavor_is_input_error(self):
        out = run_cli("classifier", "S", "--flavor", "cat+")
        assert out.returncode == 3


class TestCheckCommands:
    def test_validate_fixture(self):
        out = run_cli("validate", str(CORPUS / "s_classifier.json"))
        assert out.returncode == 0

    def test_weq_identity(self, tmp_path):
        cat = json.loads((CORPUS / "cat_iplus.json").read_text())
        functor = {
            "domain": cat,
            "codomain": cat,
            "object_map": [0, 1],
            "morphism_map": list(range(len(cat["morphisms"]))),
        }
        p = tmp_path / "id.json"
        p.write_text(json.dumps(functor))
        out = run_cli("check", "weq", str(p))
        assert out.returncode == 0
        out = run_cli("check", "trivfib", str(p))
        assert out.returncode == 0

    def test_locality_s_map_v_exits_false(self):
        out = run_cli(
            "locality", str(CORPUS / "s_classifier.json"), "--map", "v"
        )
        assert out.returncode == 1

    def test_locality_zero_classifier_true(self):
        out = run_cli(
            "locality", str(CORPUS / "zero_classifier.json"), "--map", "v"
        )
        assert out.returncode == 0

    def test_missing_file_is_input_error(self):
        out = run_cli("locality", "no_such_file.json", "--map", "v")
        assert out.returncode == 3


class TestCompleteAndEquivariant:
    def test_mat_complete(self):
        out = run_cli(
            "complete", "mat", str(CORPUS / "ring_z_mi.json"), "--maxrank", "2"
        )
        assert out.returncode == 0
        assert "3 objects" in out.stdout

    def test_karoubi_complete(self):
        out = run_cli("complete", "karoubi", str(CORPUS / "e_classifier.json"))
        assert out.returncode == 0

    def test_coinvariants(self, tmp_path):
        g = tmp_path / "c2.json"
        g.write_text(json.dumps({"table": [[0, 1], [1, 0]]}))
        out = run_cli(
            "equivariant", "coinv", str(CORPUS / "ring_z_mi.json"), "--group", str(g)
        )
        assert out.returncode == 0

    def test_psi(self, tmp_path):
        base = json.loads((CORPUS / "ring_z_mi.json").read_text())
        x = {
            "base": base,
            "group": {"table": [[0, 1], [1, 0]]},
            "action": [
                {"object_map": [0], "hom_maps": [[[[1]]]]},
                {"object_map": [0], "hom_maps": [[[[1]]]]},
            ],
        }
        p = tmp_path / "x.json"
        p.write_text(json.dumps(x))
        out = run_cli("equivariant", "psi", str(p))
        assert out.returncode == 0

    def test_not_a_subgroup(self, tmp_path):
        g = tmp_path / "c4.json"
        g.write_text(
            json.dumps({"table": [[(a + b) % 4 for b in range(4)] for a in range(4)]})
        )
        out = run_cli(
            "equivariant",
            "orbitJ",
            str(CORPUS / "ring_z_mi.json"),
            "--group",
            str(g),
            "--subgroup",
            "[0, 1]",
        )
        assert out.returncode == 3


class TestCorpus:
    def test_shipped_corpus_passes(self):
        out = run_cli("corpus", str(CORPUS / "manifest.json"))
        assert out.returncode == 0, out.stdout
        assert "0 mismatches" in out.stdout

    def test_corrupted_fixture_is_input_error(self, tmp_path):
        manifest = {
            "entries": [
                {"name": "broken", "payload": "broken.json", "checks": {"validate": "pass"}}
            ]
        }
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        (tmp_path / "broken.json").write_text("{not json")
        out = run_cli("corpus", str(tmp_path / "manifest.json"))
        assert out.returncode == 3

    def test_empty_corpus_passes(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps({"entries": []}))
        out = run_cli("corpus", str(tmp_path / "manifest.json"))
        assert out.returncode == 0


class TestDeterminism:
    @pytest.mark.parametrize(
        "args",
        [
            ("classifier", "S", "--flavor", "preadd+", "--json"),
            ("classifier", "P", "--flavor", "cat+", "--json"),
            ("locality", str(CORPUS / "e_classifier.json"), "--map", "u"),
        ],
        ids=["S-json", "P-json", "locality-u"],
    )
    def test_byte_identical_runs(self, args):
        outs = [run_cli(*args).stdout for _ in range(3)]
        assert outs[0] == outs[1] == outs[2]
