import json
import math

import pytest

from stabscar.cli import EXIT_FAIL, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main

LN2 = math.log(2)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFactorize:
    def test_cluster_families(self, capsys, tmp_path):
        code, _, _ = run(["factorize", "--model", "cluster", "--n", 14, "--l", 2, "--b", 2,
                          "--format", "json", "--out", tmp_path / "r.json"], capsys)
        assert code == EXIT_OK
        rep = json.loads((tmp_path / "r.json").read_text())
        assert rep["all_certified"] and rep["schema_version"] == 1
        fams = {}
        for row in rep["pairs"]:
            fams[row["family"]] = fams.get(row["family"], 0) + 1
        assert fams == {"omega": 14, "omegap": 14, "J": 14, "Jp": 14}

    def test_product_table(self, capsys):
        code, out, _ = run(["factorize", "--model", "product", "--n", 4], capsys)
        assert code == EXIT_OK
        assert "omega_X+" in out and "gamma" in out and "FAIL" not in out

    def test_budget_too_small(self, capsys):
        code, out, _ = run(["factorize", "--model", "cluster", "--n", 8, "--l", 1, "--b", 1], capsys)
        assert code == EXIT_OK
        assert "count=0" in out

    def test_unknown_model(self, capsys):
        code, _, _ = run(["factorize", "--model", "nope", "--n", 4], capsys)
        assert code == EXIT_USAGE

    def test_flag_not_for_model(self, capsys):
        code, _, err = run(["factorize", "--model", "cluster", "--n", 8, "--ny", 2], capsys)
        assert code == EXIT_USAGE and "--ny" in err


class TestVerify:
    def test_pxp_identity(self, capsys):
        code, out, _ = run(["verify", "--model", "pxp", "--n", 8], capsys)
        assert code == EXIT_OK
        assert "identity: pair Hamiltonian equals H_PXP term by term: True" in out

    def test_atc(self, capsys):
        code, out, _ = run(["verify", "--model", "atc", "--nx", 5, "--l", "1,2"], capsys)
        assert code == EXIT_OK and out.strip().endswith("PASS")

    def test_tampered_file(self, capsys, tmp_path):
        assert run(["build-model", "--model", "cluster", "--n", 8, "--out", tmp_path], capsys)[0] == 0
        terms = json.loads((tmp_path / "hamiltonian.json").read_text())
        code, _, err = run(["verify", "--generators", tmp_path / "generators.txt",
                            "--hamiltonian", tmp_path / "hamiltonian.json"], capsys)
        assert code == EXIT_OK and "no factorization provenance" in err
        terms[3]["coeff"] *= -1
        (tmp_path / "bad.json").write_text(json.dumps(terms))
        code, out, _ = run(["verify", "--model", "cluster", "--n", 8, "--hamiltonian", tmp_path / "bad.json"],
                           capsys)
        assert code == EXIT_FAIL and "FAIL" in out

    def test_needs_state(self, capsys):
        assert run(["verify"], capsys)[0] == EXIT_USAGE


class TestSpectrum:
    def test_cluster_summary(self, capsys, tmp_path):
        code, _, _ = run(["spectrum", "--model", "cluster", "--n", 8, "--out", tmp_path], capsys)
        assert code == EXIT_OK
        s = json.loads((tmp_path / "summary.json").read_text())
        assert s["schema_version"] == 1
        assert s["scar_overlap"] >= 1 - 1e-8
        assert s["scar_entropy"] == pytest.approx(2 * LN2, abs=1e-8)
        for name in ("scatter.csv", "spacings.csv", "scatter.png", "spacings.png"):
            assert (tmp_path / name).stat().st_size > 0
        assert (tmp_path / "scatter.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_deterministic(self, capsys, tmp_path):
        for k in range(2):
            run(["spectrum", "--model", "cluster", "--n", 6, "--seed", 4, "--no-plots",
                 "--out", tmp_path / str(k)], capsys)
        for name in ("scatter.csv", "spacings.csv"):
            assert (tmp_path / "0" / name).read_bytes() == (tmp_path / "1" / name).read_bytes()

    def test_zero_hamiltonian(self, capsys, tmp_path):
        (tmp_path / "zero.json").write_text("[]")
        code, _, _ = run(["spectrum", "--hamiltonian", tmp_path / "zero.json", "--n", 4,
                          "--out", tmp_path / "o"], capsys)
        assert code == EXIT_OK
        s = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert s["degenerate_spectrum"] is True and s["mean_r"] is None
        assert not (tmp_path / "o" / "spacings.csv").exists()

    def test_resource_cap(self, capsys, tmp_path):
        code, _, err = run(["spectrum", "--model", "cluster", "--n", 16, "--out", tmp_path], capsys)
        assert code == EXIT_RESOURCE and "cap" in err

    def test_sector_and_reference(self, capsys, tmp_path):
        code, _, _ = run(["spectrum", "--model", "toric", "--nx", 4, "--ny", 2, "--sector", "1,1",
                          "--reference", "GOE", "--band-samples", 10, "--no-plots", "--out", tmp_path], capsys)
        assert code == EXIT_OK
        s = json.loads((tmp_path / "summary.json").read_text())
        assert s["sector"] == [1, 1] and s["dim"] == 64
        assert s["scar_overlap"] >= 1 - 1e-8
        assert {"lo", "hi", "contains"} <= set(s["reference"])

    def test_sparse_route(self, capsys, tmp_path):
        code, _, _ = run(["spectrum", "--model", "cluster", "--n", 10, "--sparse", 6, "--emit", "json",
                          "--out", tmp_path], capsys)
        assert code == EXIT_OK
        s = json.loads((tmp_path / "summary.json").read_text())
        assert s["route"] == "sparse" and s["near_zero_complete"]
        assert s["scar_overlap"] >= 1 - 1e-8
        assert s["scar_entropy"] == pytest.approx(2 * LN2, abs=1e-8)

    def test_bad_sector(self, capsys, tmp_path):
        code, _, _ = run(["spectrum", "--model", "cluster", "--n", 6, "--sector", "1,2", "--out", tmp_path],
                         capsys)
        assert code == EXIT_USAGE


class TestConfig:
    def test_round_trip(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        run(["--save-config", cfg, "spectrum", "--model", "cluster", "--n", 6, "--seed", 2, "--no-plots",
             "--out", tmp_path / "a"], capsys)
        data = json.loads(cfg.read_text())
        assert data["model"] == "cluster" and data["n"] == 6 and data["seed"] == 2
        run(["--config", cfg, "spectrum", "--out", tmp_path / "b"], capsys)
        assert (tmp_path / "a" / "scatter.csv").read_bytes() == (tmp_path / "b" / "scatter.csv").read_bytes()

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "cluster", "n": 6}))
        code, out, _ = run(["--config", cfg, "build-model", "--n", 8, "--out", tmp_path / "m"], capsys)
        assert code == EXIT_OK and "N=8" in out

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "cluster", "colour": "red"}))
        code, _, err = run(["--config", cfg, "verify"], capsys)
        assert code == EXIT_USAGE and "colour" in err
