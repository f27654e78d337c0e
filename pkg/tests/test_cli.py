import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gromon import simplex_network
from gromon.randgen import random_cloud, random_isometry
from gromon import serialize
from gromon.euclidean import EuclideanCloud


def run_cli(args, cwd, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, "-m", "gromon", *args],
                          capture_output=True, cwd=cwd, env=full_env)


@pytest.fixture()
def workdir(tmp_path):
    serialize.save_network(str(tmp_path / "delta2.json"), simplex_network(2))
    serialize.save_network(str(tmp_path / "delta3.json"), simplex_network(3))
    serialize.save_network(str(tmp_path / "delta4.json"), simplex_network(4))
    return tmp_path


def test_gm_simplex_value(workdir):
    proc = run_cli(["gm", "delta4.json", "delta2.json", "--p", "1"], workdir)
    assert proc.returncode == 0, proc.stderr
    out = json.loads(proc.stdout)
    assert out["value"] == pytest.approx(0.25, abs=1e-9)
    assert out["method"] == "enumeration"
    assert out["meta"]["p"] == 1.0


def test_gm_infeasible_exit_code(workdir):
    proc = run_cli(["gm", "delta3.json", "delta2.json", "--p", "2"], workdir)
    assert proc.returncode == 2
    assert b"no measure-preserving map" in proc.stderr
    assert json.loads(proc.stdout)["value"] == "inf"


def test_gm_inf_exponent_reports_eps(workdir):
    proc = run_cli(["gm", "delta2.json", "delta2.json", "--p", "inf"], workdir)
    out = json.loads(proc.stdout)
    assert out["value"] == 0.0
    assert out["meta"]["p"] == "inf"
    assert out["meta"]["eps_supp"] == 1e-12


def test_gm_csv_and_plain_formats(workdir):
    proc = run_cli(["gm", "delta4.json", "delta2.json", "--p", "1",
                    "--format", "csv"], workdir)
    lines = proc.stdout.decode().strip().splitlines()
    assert lines[0] == "command,p,value,converged,iterations,seed"
    assert lines[1].startswith("gm,1.0,0.25,True,6,")
    proc = run_cli(["gm", "delta4.json", "delta2.json", "--p", "1",
                    "--format", "plain"], workdir)
    assert proc.stdout.decode().startswith("value 0.25 ")


def test_missing_file_exit_one(workdir):
    proc = run_cli(["gm", "nope.json", "delta2.json"], workdir)
    assert proc.returncode == 1
    assert b"error:" in proc.stderr


def test_bad_flag_exit_one(workdir):
    proc = run_cli(["rand", "--kind", "spd", "--n", "4", "--seed", "-3",
                    "--out", "x.json"], workdir)
    assert proc.returncode == 1
    assert b"unsigned 64-bit" in proc.stderr
    proc = run_cli(["gm", "delta2.json", "delta2.json", "--p", "0.5"], workdir)
    assert proc.returncode == 1


def test_malformed_file_diagnostics(workdir):
    (workdir / "bad.json").write_text('{"weights": [0.5,,]}')
    proc = run_cli(["gm", "bad.json", "delta2.json"], workdir)
    assert proc.returncode == 1
    assert b"line 1" in proc.stderr


def test_gw_command(workdir):
    # the product coupling is stationary for a self-comparison; a diagonal
    # start certifies the true zero
    diag = np.diag(simplex_network(4).weights)
    (workdir / "diag.json").write_text(json.dumps({"table": diag.tolist()}))
    proc = run_cli(["gw", "delta4.json", "delta4.json", "--init", "diag.json"],
                   workdir)
    out = json.loads(proc.stdout)
    assert proc.returncode == 0
    assert out["method"] == "frank_wolfe"
    assert out["value"] <= 1e-10
    plain = run_cli(["gw", "delta4.json", "delta2.json"], workdir)
    assert plain.returncode == 0
    assert json.loads(plain.stdout)["converged"]


def test_rand_round_trip_and_determinism(workdir):
    for kind, loader in (("spd", serialize.load_network),
                         ("metric", serialize.load_network),
                         ("cloud", serialize.load_cloud),
                         ("graph", serialize.load_graph)):
        a = run_cli(["rand", "--kind", kind, "--n", "5", "--seed", "9",
                     "--out", "a.json"], workdir)
        assert a.returncode == 0, a.stderr
        loader(str(workdir / "a.json"))  # every written file reads back
        run_cli(["rand", "--kind", kind, "--n", "5", "--seed", "9",
                 "--out", "b.json"], workdir)
        assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()


def test_rand_seed_from_environment(workdir):
    run_cli(["rand", "--kind", "metric", "--n", "4", "--out", "env.json"],
            workdir, env={"GROMON_SEED": "77"})
    run_cli(["rand", "--kind", "metric", "--n", "4", "--seed", "77",
             "--out", "flag.json"], workdir)
    assert (workdir / "env.json").read_bytes() == (workdir / "flag.json").read_bytes()


def test_spd_command(workdir):
    run_cli(["rand", "--kind", "spd", "--n", "5", "--seed", "1", "--out", "x.json"],
            workdir)
    run_cli(["rand", "--kind", "spd", "--n", "5", "--seed", "2", "--out", "y.json"],
            workdir)
    proc = run_cli(["spd", "x.json", "y.json", "--restarts", "10", "--seed", "0"],
                   workdir)
    out = json.loads(proc.stdout)
    assert proc.returncode == 0
    assert out["method"] == "vertex_ascent"
    assert sorted(out["witness"]["assignment"]) == list(range(5))


def test_heat_command_stdout_and_file(workdir):
    (workdir / "edge.txt").write_text("0 1\n")
    proc = run_cli(["heat", "edge.txt", "--t", "1.0"], workdir)
    out = json.loads(proc.stdout)
    assert out["weights"] == [0.5, 0.5]
    run_cli(["heat", "edge.txt", "--t", "1.0", "--out", "hk.json"], workdir)
    net = serialize.load_network(str(workdir / "hk.json"))
    assert net.n == 2
    proc2 = run_cli(["heat", "edge.txt", "--t", "-1"], workdir)
    assert proc2.returncode == 1


def test_split_command(workdir):
    table = {"table": [[0.5, 0.5]]}
    (workdir / "pi.json").write_text(json.dumps(table))
    serialize.save_network(str(workdir / "point.json"), simplex_network(1))
    proc = run_cli(["split", "point.json", "delta2.json", "pi.json", "--p", "2"],
                   workdir)
    out = json.loads(proc.stdout)
    assert proc.returncode == 0
    assert out["value"] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert out["phi"] == {"assignment": [0, 1]}
    assert out["z"]["weights"] == [0.5, 0.5]


def test_miso_command(workdir):
    cloud = random_cloud(6, 2, 3)
    moved = EuclideanCloud(random_isometry(2, 4).apply(cloud.points), cloud.weights)
    serialize.save_cloud(str(workdir / "x.json"), cloud)
    serialize.save_cloud(str(workdir / "y.json"), moved)
    proc = run_cli(["miso", "x.json", "y.json", "--restarts", "10", "--seed", "0"],
                   workdir)
    out = json.loads(proc.stdout)
    assert proc.returncode == 0
    assert out["value"] <= 1e-6
    assert "rotation" in out["transform"]


def test_deterministic_solver_output(workdir):
    args = ["gm", "delta4.json", "delta2.json", "--p", "2"]
    assert run_cli(args, workdir).stdout == run_cli(args, workdir).stdout
