import json
import subprocess
import sys


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "basinlab.cli", *args],
                          cwd=cwd, capture_output=True, text=True)


class TestVectors:
    def test_quadratic_output(self, tmp_path):
        res = run_cli(["--out-dir", "o", "vectors", "--poly", "0,1,1"], tmp_path)
        assert res.returncode == 0
        payload = json.loads((tmp_path / "o" / "vectors.json").read_text())
        assert payload["m"] == 1
        assert payload["a"] == [1.0, 0.0]
        assert payload["attraction"] == [[-1.0, 0.0]]
        assert payload["repulsion"] == [[1.0, 0.0]]

    def test_linear_map_usage_error(self, tmp_path):
        res = run_cli(["verify", "--poly", "0,1", "--C", "1", "--q", "0.1"], tmp_path)
        assert res.returncode == 2

    def test_not_parabolic_usage_error(self, tmp_path):
        res = run_cli(["vectors", "--poly", "1,1,1"], tmp_path)
        assert res.returncode == 2


class TestOrbitAndPreimages:
    def test_orbit_csv(self, tmp_path):
        res = run_cli(["--out-dir", "o", "orbit", "--poly", "0,1,1",
                       "--z0", "-0.5", "--n", "3"], tmp_path)
        assert res.returncode == 0
        lines = (tmp_path / "o" / "orbit.csv").read_text().strip().splitlines()
        assert lines[0] == "step,re,im"
        assert len(lines) == 5
        assert lines[1].startswith("0,-0.5,")

    def test_preimages(self, tmp_path):
        res = run_cli(["--out-dir", "o", "preimages", "--poly", "0,1,1",
                       "--w", "-0.5"], tmp_path)
        assert res.returncode == 0
        payload = json.loads((tmp_path / "o" / "preimages.json").read_text())
        assert len(payload["roots"]) == 2


class TestVerify:
    def test_pass_and_exit_code(self, tmp_path):
        res = run_cli(["--out-dir", "o", "verify", "--poly", "0,1,1", "--C", "2",
                       "--q", "-0.5", "--kmax", "4", "--lmax", "3"], tmp_path)
        assert res.returncode == 0, res.stderr
        cert = json.loads((tmp_path / "o" / "certificate.json").read_text())
        assert cert["pass"] is True
        assert cert["global_min"] >= 2.0
        assert "pass=True" in res.stdout

    def test_closure_subcommand(self, tmp_path):
        res = run_cli(["--out-dir", "o", "closure", "--poly", "0,1,1", "--C", "2",
                       "--q", "-0.5", "--kmax", "3", "--lmax", "2",
                       "--depth", "2"], tmp_path)
        assert res.returncode == 0, res.stderr
        rep = json.loads((tmp_path / "o" / "closure.json").read_text())
        assert rep["status"] == "ok"
        assert rep["residual_failures"] == 0
        assert rep["image_misses"] == 0


class TestRenderAndProp3:
    def test_render_ppm(self, tmp_path):
        res = run_cli(["--out-dir", "o", "render", "--poly", "0,1,1",
                       "--center=-0.25,0", "--width", "1.5", "--res", "64",
                       "--nmax", "2000"], tmp_path)
        assert res.returncode == 0, res.stderr
        data = (tmp_path / "o" / "basin.ppm").read_bytes()
        assert data.startswith(b"P6\n64 64\n255\n")

    def test_prop3_report(self, tmp_path):
        res = run_cli(["--out-dir", "o", "prop3", "--poly", "0,1,1,1",
                       "--R", "0.3", "--theta0", "0.3", "--res", "96",
                       "--nmax", "4000"], tmp_path)
        assert res.returncode == 0, res.stderr
        rep = json.loads((tmp_path / "o" / "prop3.json").read_text())
        assert rep["disjoint"] is True


class TestDistanceCommand:
    def test_halfplane(self, tmp_path):
        res = run_cli(["--out-dir", "o", "distance", "--domain", "halfplane",
                       "--z1", "0,1", "--z2", "0,2"], tmp_path)
        assert res.returncode == 0
        payload = json.loads((tmp_path / "o" / "distance.json").read_text())
        assert abs(payload["distance"]["value"] - 0.6931471805599453) < 1e-12

    def test_path_option(self, tmp_path):
        res = run_cli(["--out-dir", "o", "distance", "--domain", "slit",
                       "--z1", "-1", "--z2", "-4", "--path=-1;-2;-4"], tmp_path)
        payload = json.loads((tmp_path / "o" / "distance.json").read_text())
        assert abs(payload["path_length"] - 0.6931471805599453) < 1e-9


class TestDeterminism:
    def test_identical_argv_identical_bytes(self, tmp_path):
        args = ["enumerate-q", "--poly", "0,1,1", "--q", "-0.5",
                "--kmax", "3", "--lmax", "3"]
        run_cli(["--out-dir", "a", *args], tmp_path)
        run_cli(["--out-dir", "b", *args], tmp_path)
        assert ((tmp_path / "a" / "q_points.csv").read_bytes()
                == (tmp_path / "b" / "q_points.csv").read_bytes())

    def test_certificate_bytes(self, tmp_path):
        args = ["verify", "--poly", "0,1,1", "--C", "2", "--q", "-0.5",
                "--kmax", "3", "--lmax", "2"]
        run_cli(["--out-dir", "a", *args], tmp_path)
        run_cli(["--out-dir", "b", *args], tmp_path)
        assert ((tmp_path / "a" / "certificate.json").read_bytes()
                == (tmp_path / "b" / "certificate.json").read_bytes())

    def test_render_bytes(self, tmp_path):
        args = ["render", "--poly", "0,1,1", "--center=-0.25,0",
                "--width", "1.5", "--res", "48", "--nmax", "1000"]
        run_cli(["--out-dir", "a", *args], tmp_path)
        run_cli(["--out-dir", "b", *args], tmp_path)
        assert ((tmp_path / "a" / "basin.ppm").read_bytes()
                == (tmp_path / "b" / "basin.ppm").read_bytes())

    def test_pacman_seeded_sampling(self, tmp_path):
        args = ["pacman", "--poly", "0,1,1", "--theta0", "0.1",
                "--check-invariance", "--samples", "1200", "--steps", "50",
                "--seed", "7"]
        run_cli(["--out-dir", "a", *args], tmp_path)
        run_cli(["--out-dir", "b", *args], tmp_path)
        assert ((tmp_path / "a" / "pacman.json").read_bytes()
                == (tmp_path / "b" / "pacman.json").read_bytes())


class TestUsageErrors:
    def test_unknown_command(self, tmp_path):
        assert run_cli(["frobnicate"], tmp_path).returncode == 2

    def test_bad_numeric(self, tmp_path):
        res = run_cli(["verify", "--poly", "0,1,1", "--C", "-1", "--q", "-0.5"],
                      tmp_path)
        assert res.returncode == 2

    def test_usage_prints_grammar(self, tmp_path):
        res = run_cli(["verify", "--poly", "0,1", "--C", "1", "--q", "0.1"], tmp_path)
        assert "usage" in res.stderr.lower()
