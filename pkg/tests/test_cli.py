"""Tests for the reflattice command line."""

import json
from pathlib import Path

import pytest


def report(result) -> dict:
    return json.loads(result.stdout)


class TestLatticeCommands:
    """Tests for lattice-info, disc and similar."""

    def test_lattice_info(self, invoke, fixtures_dir: Path):
        """Test a single lattice gives a report with provenance."""
        result = invoke("lattice-info", "--lattice", fixtures_dir / "U.lat")
        assert result.exit_code == 0
        body = report(result)
        assert body["success"] is True
        assert body["data"]["det"] == -1
        assert body["data"]["unimodular"] is True
        assert body["provenance"]["command"] == "lattice-info"
        assert body["provenance"]["input_digest"].startswith("sha256:")

    def test_not_symmetric(self, invoke, fixtures_dir: Path):
        """Test a bad Gram matrix exits 1 with its error code."""
        result = invoke("lattice-info", "--lattice", fixtures_dir / "not_symmetric.lat")
        assert result.exit_code == 1
        body = report(result)
        assert body["success"] is False
        assert body["error"]["code"] == "NOT_SYMMETRIC"

    def test_missing_file(self, invoke, tmp_path: Path):
        """Test an unreadable lattice file is malformed input."""
        result = invoke("disc", "--lattice", tmp_path / "absent.lat")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "MALFORMED_INPUT"

    def test_batch_is_ordered_by_filename(self, invoke, fixtures_dir: Path):
        """Test several lattices give one item per file in filename order."""
        result = invoke(
            "lattice-info",
            "--lattice",
            fixtures_dir / "diag2.lat",
            "--lattice",
            fixtures_dir / "U.lat",
        )
        assert result.exit_code == 0
        items = report(result)["data"]["items"]
        assert [Path(item["source"]).name for item in items] == ["U.lat", "diag2.lat"]
        assert all(item["success"] for item in items)

    def test_batch_with_failure(self, invoke, fixtures_dir: Path):
        """Test one bad file fails the batch but keeps the other results."""
        result = invoke(
            "lattice-info",
            "--lattice",
            fixtures_dir / "U.lat",
            "--lattice",
            fixtures_dir / "not_symmetric.lat",
        )
        assert result.exit_code == 1
        items = report(result)["data"]["items"]
        assert [item["success"] for item in items] == [True, False]
        assert items[1]["error"]["code"] == "NOT_SYMMETRIC"

    def test_batch_refuses_certificate(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test --out needs a single lattice."""
        result = invoke(
            "lattice-info",
            "--lattice",
            fixtures_dir / "U.lat",
            "--lattice",
            fixtures_dir / "diag2.lat",
            "--out",
            tmp_path / "info.cert",
        )
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "USAGE_ERROR"

    def test_disc(self, invoke, fixtures_dir: Path):
        """Test diag(-6) has A = Z/6."""
        result = invoke("disc", "--lattice", fixtures_dir / "diag_m6.lat")
        assert result.exit_code == 0
        assert report(result)["data"]["invariant_factors"] == [6]

    def test_similar_undecided(self, invoke, fixtures_dir: Path):
        """Test an open similarity question exits 2."""
        result = invoke(
            "similar", "--lattice", fixtures_dir / "U.lat", "--other", fixtures_dir / "diag2m2.lat"
        )
        assert result.exit_code == 2
        assert report(result)["data"]["similar"] is None


class TestGroupBehaviour:
    """Tests for usage errors and the version command."""

    def test_unknown_flag(self, invoke, fixtures_dir: Path):
        """Test click usage errors become failure reports."""
        result = invoke("disc", "--lattice", fixtures_dir / "U.lat", "--bogus")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "USAGE_ERROR"

    def test_unknown_command(self, invoke):
        """Test an unknown subcommand is a usage error."""
        result = invoke("nonsense")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "USAGE_ERROR"

    def test_version(self, invoke):
        """Test the version report lists the conventions."""
        result = invoke("version")
        assert result.exit_code == 0
        data = report(result)["data"]
        assert data["tool"] == "reflattice"
        assert data["conventions"]


class TestReflectionCommands:
    """Tests for reflect, decompose and the Vinberg commands."""

    def test_reflect(self, invoke, fixtures_dir: Path):
        """Test s_(1,-1) on U."""
        result = invoke("reflect", "--lattice", fixtures_dir / "U.lat", "--H", "1,-1")
        assert result.exit_code == 0
        assert report(result)["success"] is True

    def test_isotropic_mirror(self, invoke, fixtures_dir: Path):
        """Test isotropic mirrors exit 1."""
        result = invoke("reflect", "--lattice", fixtures_dir / "U.lat", "--H", "1,0")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "ISOTROPIC_MIRROR"

    def test_reflective_rank_two(self, invoke, fixtures_dir: Path):
        """Test U is reflective through an isotropic vector."""
        result = invoke("reflective", "--lattice", fixtures_dir / "U.lat")
        assert result.exit_code == 0
        data = report(result)["data"]
        assert data["verdict"] == "Reflective"
        assert data["method"] == "rank2"
        assert data["rank2"]["reason"] == "IsotropicVector"

    def test_vinberg_partial_exits_two(self, invoke, fixtures_dir: Path):
        """Test an exhausted wall budget gives a partial chamber and exit 2."""
        result = invoke("vinberg", "--lattice", fixtures_dir / "U_m2.lat", "--budget-walls", "0")
        assert result.exit_code == 2
        assert report(result)["data"]["status"] == "Partial"

    def test_zero_denominator_in_matrix(self, invoke, fixtures_dir: Path):
        """Test a "1/0" matrix entry is malformed input, not an internal error."""
        result = invoke(
            "decompose",
            "--lattice",
            fixtures_dir / "U.lat",
            "--action",
            fixtures_dir / "divide_by_zero.mat",
        )
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "MALFORMED_INPUT"

    @pytest.mark.parametrize("command", ["vinberg", "roots", "reflective"])
    @pytest.mark.parametrize("priority", ["1/0", "1/2/3", "x"])
    def test_bad_budget_priority(self, invoke, fixtures_dir: Path, command, priority):
        """Test an unparsable priority bound is an invalid argument."""
        result = invoke(
            command, "--lattice", fixtures_dir / "U_m2.lat", "--budget-priority", priority
        )
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "INVALID_ARGUMENT"

    def test_walk_budget_exits_two(self, invoke, fixtures_dir: Path):
        """Test a walk stopped by --max-steps exits 2."""
        result = invoke(
            "reduce-w2",
            "--lattice",
            fixtures_dir / "U_m2.lat",
            "--action",
            fixtures_dir / "U_m2_reflect_z.mat",
            "--point",
            "4,3,1",
            "--max-steps",
            "0",
        )
        assert result.exit_code == 2
        assert report(result)["data"]["budget_exceeded"] is True


class TestMukaiCommands:
    """Tests for the Mukai and correspondence commands."""

    def test_tyurin(self, invoke, fixtures_dir: Path):
        """Test the default sign follows H² and the vector is (1, H, -1)."""
        result = invoke("tyurin", "--lattice", fixtures_dir / "diag2m2.lat", "--H", "0,1")
        assert result.exit_code == 0
        data = report(result)["data"]
        assert data["vector"] == {"r": 1, "H": [0, 1], "s": -1}
        assert data["integral"] is True

    def test_corr_decompose_rejects_shear(self, invoke, fixtures_dir: Path):
        """Test a non-isometry exits 1."""
        result = invoke(
            "corr-decompose",
            "--lattice",
            fixtures_dir / "U.lat",
            "--action",
            fixtures_dir / "U_shear.mat",
        )
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "NOT_ISOMETRY"

    def test_mukai_moduli_bad_vector(self, invoke, fixtures_dir: Path):
        """Test a vector without three parts is malformed."""
        result = invoke("mukai-moduli", "--lattice", fixtures_dir / "diag2.lat", "--v", "1;0")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "MALFORMED_INPUT"

    def test_aut_orders_out_of_range(self, invoke):
        """Test rk T = 22 is refused."""
        result = invoke("aut-orders", "--rank-t", "22")
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "OUT_OF_RANGE"


CERTIFIED_COMMANDS = [
    ["lattice-info", "--lattice", "U_m2.lat"],
    ["disc", "--lattice", "diag2m2.lat"],
    ["similar", "--lattice", "U.lat", "--other", "U.lat"],
    ["roots", "--lattice", "U_m2.lat", "--budget-priority", "2"],
    ["reflect", "--lattice", "U.lat", "--H", "2,-1"],
    ["decompose", "--lattice", "U.lat", "--action", "U_stretch.mat"],
    ["vinberg", "--lattice", "U_m2.lat"],
    ["reflective", "--lattice", "U_m2.lat"],
    ["reflective", "--lattice", "diag2.lat"],
    ["reduce-w2", "--lattice", "U_m2.lat", "--action", "U_m2_flip.mat", "--point", "3,2,1"],
    ["generators", "--lattice", "U_m2.lat"],
    ["mukai-moduli", "--lattice", "diag2m2.lat", "--v", "1;0,0;0", "--compare"],
    ["tyurin", "--lattice", "diag2m2.lat", "--H", "0,1", "--reduce", "--point", "2,1"],
    ["corr-decompose", "--lattice", "U.lat", "--action", "U_stretch.mat", "--sign", "1"],
    ["aut-orders", "--rank-t", "2"],
]


class TestReproducibility:
    """Tests for identical reports from identical inputs."""

    @pytest.mark.parametrize("args", CERTIFIED_COMMANDS, ids=lambda args: " ".join(args[:3]))
    def test_stdout_is_byte_identical(self, invoke, fixtures_dir: Path, args: list[str]):
        """Test running a command twice prints the same bytes."""
        resolved = [
            fixtures_dir / arg if arg.endswith((".lat", ".mat")) else arg for arg in args
        ]
        first = invoke(*resolved)
        second = invoke(*resolved)
        assert first.exit_code == second.exit_code == 0
        assert first.stdout_bytes == second.stdout_bytes

    def test_certificates_are_byte_identical(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test two certificates for the same walk are the same file."""
        args = ["reduce-w2", "--lattice", fixtures_dir / "U_m2.lat", "--action"]
        args += [fixtures_dir / "U_m2_flip.mat"]
        assert invoke(*args, "--out", tmp_path / "a.cert").exit_code == 0
        assert invoke(*args, "--out", tmp_path / "b.cert").exit_code == 0
        assert (tmp_path / "a.cert").read_bytes() == (tmp_path / "b.cert").read_bytes()


class TestCertificates:
    """Tests for --out certificates and verify."""

    def _emit(self, invoke, fixtures_dir: Path, tmp_path: Path, args: list[str]) -> Path:
        out = tmp_path / "result.cert"
        resolved = [
            fixtures_dir / arg if arg.endswith((".lat", ".mat")) else arg for arg in args
        ]
        result = invoke(*resolved, "--out", out)
        assert result.exit_code == 0, result.stdout
        assert out.exists()
        return out

    @pytest.mark.parametrize("args", CERTIFIED_COMMANDS, ids=lambda args: " ".join(args[:3]))
    def test_round_trip(self, invoke, fixtures_dir: Path, tmp_path: Path, args: list[str]):
        """Test every certificate kind replays."""
        out = self._emit(invoke, fixtures_dir, tmp_path, args)
        result = invoke("verify", out)
        assert result.exit_code == 0, result.stdout
        data = report(result)["data"]
        assert data["ok"] is True
        assert data["kind"] == args[0]
        assert data["checks"]

    def test_tampered(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test an edited result is caught on replay."""
        out = self._emit(invoke, fixtures_dir, tmp_path, ["lattice-info", "--lattice", "U.lat"])
        certificate = json.loads(out.read_text())
        certificate["result"]["det"] = 3
        out.write_text(json.dumps(certificate))

        result = invoke("verify", out)
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "REPLAY_MISMATCH"

    def test_tampered_wall(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test a chamber with a wall that is not a root is rejected."""
        out = self._emit(invoke, fixtures_dir, tmp_path, ["vinberg", "--lattice", "U_m2.lat"])
        certificate = json.loads(out.read_text())
        certificate["result"]["walls"][0]["vector"] = [1, 0, 0]
        out.write_text(json.dumps(certificate))

        result = invoke("verify", out)
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "REPLAY_MISMATCH"

    def test_other_conventions(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test a certificate written under other conventions does not replay."""
        out = self._emit(invoke, fixtures_dir, tmp_path, ["disc", "--lattice", "U.lat"])
        certificate = json.loads(out.read_text())
        certificate["conventions"] = ["word-order:left-to-right"]
        out.write_text(json.dumps(certificate))

        result = invoke("verify", out)
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "REPLAY_MISMATCH"

    def test_truncated(self, invoke, fixtures_dir: Path, tmp_path: Path):
        """Test a truncated file is a malformed certificate."""
        out = self._emit(invoke, fixtures_dir, tmp_path, ["disc", "--lattice", "U.lat"])
        out.write_text(out.read_text()[:40])

        result = invoke("verify", out)
        assert result.exit_code == 1
        assert report(result)["error"]["code"] == "MALFORMED_CERTIFICATE"
