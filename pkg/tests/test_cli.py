import json
import math

import numpy as np
import pytest

from unfolder import cli, solids
from unfolder.cut_tree import enumerate_monotone_trees
from unfolder.errors import InternalError
from unfolder.polyhedron import to_off
from unfolder.report import RunReport
from unfolder.simplicity import unfolding_is_simple
from unfolder.verify import run_suites


@pytest.fixture()
def mesh_file(tmp_path):
    def write(P, name="mesh.off"):
        f = tmp_path / name
        f.write_text(to_off(P))
        return str(f)
    return write


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_info_tetrahedron_and_cube(mesh_file, tmp_path, capsys):
    code, out, _ = run(["info", "--mesh", mesh_file(solids.tetrahedron()),
                        "--out-json", str(tmp_path / "r.json")], capsys)
    assert code == 0 and "V=4 E=6 F=4" in out
    rep = RunReport.from_json((tmp_path / "r.json").read_text())
    assert rep.info["gauss_bonnet_residual"] < 1e-12
    assert all(a == pytest.approx(math.pi) for a in rep.info["total_angles"])
    code, out, _ = run(["info", "--mesh", "builtin:cube"], capsys)
    assert code == 0 and "V=8 E=12 F=6" in out


def test_info_nonconvex_is_validation_error(tmp_path, capsys):
    f = tmp_path / "bad.off"
    pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0.1, 0.1, 0.1]]
    faces = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]
    f.write_text("OFF\n5 4 0\n" + "\n".join(" ".join(map(str, p)) for p in pts) + "\n"
                 + "\n".join("3 " + " ".join(map(str, q)) for q in faces) + "\n")
    code, _, err = run(["info", "--mesh", str(f)], capsys)
    assert code == 2 and "ConvexityError" in err


def test_obj_format(tmp_path, capsys):
    P = solids.tetrahedron()
    f = tmp_path / "t.obj"
    f.write_text("\n".join(f"v {x} {y} {z}" for x, y, z in P.vertices) + "\n"
                 + "\n".join("f " + " ".join(str(i + 1) for i in face) for face in P.faces) + "\n")
    code, out, _ = run(["info", "--mesh", str(f), "--format", "obj"], capsys)
    assert code == 0 and "V=4 E=6 F=4" in out


def test_missing_file_is_io_error(capsys):
    code, _, err = run(["info", "--mesh", "/nonexistent/mesh.off"], capsys)
    assert code == 4 and "I/O" in err


def test_unfold_cube_writes_simple_net(mesh_file, tmp_path, capsys):
    P = solids.generic_copy(solids.cube(), seed=7)
    svg, js = tmp_path / "net.svg", tmp_path / "net.json"
    code, out, _ = run(["unfold", "--mesh", mesh_file(P), "--out-svg", str(svg), "--out-json", str(js)], capsys)
    assert code == 0 and "simple" in out
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<polygon") == 6 and 'id="boundary"' in text
    rep = RunReport.from_json(js.read_text())
    assert rep.simplicity["simple"] and not rep.simplicity["oracle_overlap"]
    assert len(rep.tree["edges"]) == 7 and len(rep.tracing["vertices"]) == 14
    assert RunReport.from_json(rep.to_json()) == rep


def test_unfold_is_reproducible(mesh_file, tmp_path, capsys):
    P = solids.generic_copy(solids.cube(), seed=7)
    path = mesh_file(P)
    outs = []
    for name in ("a", "b"):
        js = tmp_path / f"{name}.json"
        svg = tmp_path / f"{name}.svg"
        assert cli.main(["unfold", "--mesh", path, "--tree", "steepest", "--out-json", str(js),
                         "--out-svg", str(svg)]) == 0
        d = json.loads(js.read_text())
        d.pop("timings")
        outs.append((d, svg.read_text()))
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_unfold_overlapping_tree_flagged(mesh_file, tmp_path, capsys):
    P = solids.squat_truncated_tetrahedron()
    T = next(T for T in enumerate_monotone_trees(P) if not unfolding_is_simple(P, T).simple)
    tree = tmp_path / "tree.txt"
    tree.write_text(T.to_text())
    js = tmp_path / "r.json"
    code, out, _ = run(["unfold", "--mesh", mesh_file(P), "--tree", str(tree), "--out-json", str(js),
                        "--out-svg", str(tmp_path / "n.svg")], capsys)
    assert code == 0 and "OVERLAPPING" in out
    rep = json.loads(js.read_text())
    assert not rep["simplicity"]["simple"] and rep["simplicity"]["oracle_overlap"]
    assert rep["simplicity"]["first_violation"] is not None

    code, out, _ = run(["stretch", "--mesh", mesh_file(P), "--tree", str(tree), "--out-json", str(js)], capsys)
    assert code == 0
    st = json.loads(js.read_text())["stretch"]
    assert st["simple"] and st["lambda"]["exponent"] > 0

    code, _, _ = run(["stretch", "--mesh", mesh_file(P), "--tree", str(tree), "--lambda-cap", "0"], capsys)
    assert code == 3


def test_stretch_already_simple(capsys, tmp_path, mesh_file):
    P = solids.generic_copy(solids.cube(), seed=7)
    js = tmp_path / "s.json"
    code, out, _ = run(["stretch", "--mesh", mesh_file(P), "--out-json", str(js)], capsys)
    assert code == 0 and "lambda = 1 " in out
    assert json.loads(js.read_text())["stretch"]["lambda"] == {"mantissa": 1, "exponent": 0}


def test_bad_tree_file(mesh_file, tmp_path, capsys):
    tree = tmp_path / "tree.txt"
    tree.write_text("root 0\n0 1\n")
    code, _, err = run(["unfold", "--mesh", mesh_file(solids.generic_copy(solids.cube(), seed=7)),
                        "--tree", str(tree)], capsys)
    assert code == 2 and "TreeError" in err


def test_non_general_position_and_bad_direction(capsys):
    code, _, err = run(["unfold", "--mesh", "builtin:cube"], capsys)
    assert code == 2 and "GeneralPositionError" in err
    code, _, err = run(["unfold", "--mesh", "builtin:tetrahedron", "--u", "1,2"], capsys)
    assert code == 2


def test_env_override(monkeypatch, capsys):
    monkeypatch.setenv("UNFOLDER_EPS", "0.5")
    code, _, err = run(["info", "--mesh", "builtin:cube"], capsys)
    assert code == 2 and "eps_len" in err
    monkeypatch.setenv("UNFOLDER_EPS", "1e-8")
    assert run(["info", "--mesh", "builtin:cube"], capsys)[0] == 0


def test_internal_error_exit_code(monkeypatch, capsys):
    def boom(args, tol):
        raise InternalError("synthetic")
    monkeypatch.setitem(cli.COMMANDS, "info", boom)
    code, _, err = run(["info", "--mesh", "builtin:cube"], capsys)
    assert code == 1 and "synthetic" in err


def test_sweep_counts(tmp_path, capsys):
    js = tmp_path / "s.json"
    code, out, _ = run(["sweep", "--mesh", "builtin:cube", "--oracle", "--out-json", str(js)], capsys)
    assert code == 0
    sw = json.loads(js.read_text())["sweep"]
    assert sw == {"trees": 384, "simple": 384, "overlapping": 0, "truncated": False, "oracle_disagreements": 0}
    code, _, _ = run(["sweep", "--mesh", "builtin:tetrahedron", "--out-json", str(js)], capsys)
    sw = json.loads(js.read_text())["sweep"]
    assert (sw["trees"], sw["overlapping"]) == (16, 0)
    code, out, _ = run(["sweep", "--mesh", "builtin:cube", "--limit", "10", "--out-json", str(js)], capsys)
    sw = json.loads(js.read_text())["sweep"]
    assert sw["trees"] == 10 and sw["truncated"] and "truncated" in out


def test_verify_default_corpus(tmp_path, capsys):
    js = tmp_path / "v.json"
    code, out, _ = run(["verify", "--trials", "8", "--seed", "3", "--out-json", str(js)], capsys)
    assert code == 0
    rep = json.loads(js.read_text())
    assert rep["seed"] == 3 and rep["verify"] and all(r["passed"] for r in rep["verify"].values())


def test_verify_zero_trials_and_fault_injection():
    assert run_suites(n_trials=0) == {}
    meshes = [solids.cube(), solids.octahedron()]

    def broken(P, a, o, b):
        return -P.left_angle(a, o, b)
    bad = run_suites(meshes, seed=1, n_trials=20, angle_fn=broken, suites=["angle_sum_identity"])
    assert not bad["angle_sum_identity"]["passed"]
    good = run_suites(meshes, seed=1, n_trials=20, suites=["angle_sum_identity", "angle_additivity"])
    assert all(r["passed"] for r in good.values())


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_suites", lambda *a, **k: {"x": {"passed": False, "trials": 1, "failures": 1}})
    assert run(["verify", "--trials", "1"], capsys)[0] == 2


def test_svg_layout_format():
    import re
    from unfolder.cut_tree import build_downhill_tree
    from unfolder.development import layout_faces
    from unfolder.svg import layout_svg
    P = solids.generic_copy(solids.cube(), seed=7)
    lay = layout_faces(P, build_downhill_tree(P))
    text = layout_svg(lay, overlapping=True)
    x0, y0, w, h = map(float, re.search(r'viewBox="([^"]+)"', text).group(1).split())
    pts = np.vstack(lay.polygons)
    span = (pts.max(0) - pts.min(0)).max()
    assert x0 == pytest.approx(pts[:, 0].min() - 0.05 * span, rel=1e-8)
    assert w == pytest.approx(np.ptp(pts[:, 0]) + 0.1 * span, rel=1e-8)
    nums = re.findall(r"-?\d+\.\d+(?:e-?\d+)?", text)
    assert all(len(n.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 9 for n in nums)
    assert [f"face-{i}" for i in range(6)] == re.findall(r'id="(face-\d+)"', text)
