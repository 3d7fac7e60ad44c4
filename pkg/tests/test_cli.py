import json

import pytest

from entcover import cli
from entcover.instances import parse_instance

MESC = "mesc 3 3\n0 1\n1 2\n2\n"
TRIANGLE = "graph 3 3\n0 1\n0 2\n1 2\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_greedy_json(tmp_path, capsys):
    f = write(tmp_path, "a.mesc", MESC)
    code, out, err = run(capsys, "greedy", f, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["order"] == [0, 1]
    assert rep["deltas"] == [2, 1]
    assert rep["cover"] == [2, 1, 0]
    assert rep["cover_valid"] is True
    assert rep["greedy_entropy_bits"] == pytest.approx(0.9182958340544896, abs=1e-10)
    assert "elapsed_seconds" in rep


def test_greedy_plain_output(tmp_path, capsys):
    f = write(tmp_path, "a.mesc", MESC)
    code, out, err = run(capsys, "greedy", f)
    assert code == 0
    assert "greedy_entropy_bits" in out


def test_greedy_single_set_zero_entropy(tmp_path, capsys):
    f = write(tmp_path, "one.mesc", "mesc 1 4\n0 1 2 3\n")
    code, out, _ = run(capsys, "greedy", f, "--json")
    assert code == 0
    assert json.loads(out)["greedy_entropy_bits"] == 0.0


def test_greedy_triangle_orientation(tmp_path, capsys):
    f = write(tmp_path, "t.graph", TRIANGLE)
    code, out, _ = run(capsys, "greedy", f, "--kind", "meo", "--json")
    assert code == 0
    assert json.loads(out)["greedy_entropy_bits"] == pytest.approx(
        0.9182958340544896, abs=1e-10)


def test_malformed_file(tmp_path, capsys):
    f = write(tmp_path, "bad.mesc", "mesc 2 2\n0 1\n")
    code, out, err = run(capsys, "greedy", f)
    assert code == 2
    assert "line" in err


def test_missing_file(tmp_path, capsys):
    code, out, err = run(capsys, "greedy", str(tmp_path / "nope.mesc"))
    assert code == 2
    assert "cannot read" in err


def test_verify_mesc(tmp_path, capsys):
    f = write(tmp_path, "a.mesc", MESC)
    code, out, _ = run(capsys, "verify", f, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] is True
    assert rep["alpha"] == {"num": 1, "den": 1}
    assert rep["alpha_bound_holds"] is True
    assert rep["unit_alpha_bound_holds"] is True
    assert rep["alpha_bound_slack_bits"] >= 0


def test_verify_mest_beta_fields(tmp_path, capsys):
    f = write(tmp_path, "t.graph", TRIANGLE)
    code, out, _ = run(capsys, "verify", f, "--kind", "mest", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["beta_witness"] == 1
    assert rep["beta_certified"] is True
    assert rep["beta_admissible"] is True
    assert rep["beta_bound_holds"] is True
    assert isinstance(rep["beta_moves"], int)
    assert isinstance(rep["beta_levels"], int)


BIG_MESC = "mesc 9 12\n0 9 10 11\n" + "\n".join(str(i) for i in range(1, 9)) + "\n"


def test_verify_guard_exit_3(tmp_path, capsys):
    f = write(tmp_path, "big.mesc", BIG_MESC)
    code, out, err = run(capsys, "verify", f)
    assert code == 3
    assert "hint" in err


def test_reduce(tmp_path, capsys):
    f = write(tmp_path, "r.mesc", "mesc 2 3\n0 1\n1 2\n")
    code, out, _ = run(capsys, "reduce", f, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["vertices"] == 10
    assert rep["gadget_file"].endswith(".gadget")
    g = parse_instance(open(rep["gadget_file"]).read())
    assert g.n_vertices == 10
    assert g.is_connected()
    assert rep["roles"]["hub"] == 0


def test_reduce_explicit_out(tmp_path, capsys):
    f = write(tmp_path, "r.mesc", "mesc 2 3\n0 1\n1 2\n")
    out_path = str(tmp_path / "gadget.graph")
    code, _, _ = run(capsys, "reduce", f, "--out", out_path, "--json")
    assert code == 0
    assert parse_instance(open(out_path).read()).n_vertices == 10


def test_reduce_rejects_graph_input(tmp_path, capsys):
    f = write(tmp_path, "t.graph", TRIANGLE)
    code, _, err = run(capsys, "reduce", f)
    assert code == 2


def test_gen_deterministic(tmp_path, capsys):
    a = str(tmp_path / "a.out")
    b = str(tmp_path / "b.out")
    for path in (a, b):
        code, _, _ = run(capsys, "gen", "--kind", "mest", "--seed", "5",
                         "--out", path)
        assert code == 0
    assert open(a).read() == open(b).read()
    g = parse_instance(open(a).read())
    assert g.is_connected()


def test_gen_mesc_covers_universe(tmp_path, capsys):
    p = str(tmp_path / "m.mesc")
    code, _, _ = run(capsys, "gen", "--kind", "mesc", "--seed", "9",
                     "--sets", "5", "--elements", "8", "--out", p)
    assert code == 0
    inst = parse_instance(open(p).read())
    covered = set()
    for s in inst.sets:
        covered |= s
    assert covered == set(range(8))


def test_gen_stdout(capsys):
    code, out, _ = run(capsys, "gen", "--kind", "meo", "--seed", "3")
    assert code == 0
    assert out.startswith("graph ")


def test_batch_seeds(capsys):
    code, out, _ = run(capsys, "batch", "--seeds", "1:3", "--kind", "meo",
                       "--json")
    assert code == 0
    lines = [json.loads(l) for l in out.strip().splitlines()]
    assert len(lines) == 3
    assert [l["id"] for l in lines] == sorted(l["id"] for l in lines)
    assert all(l["status"] == "ok" for l in lines)


def test_batch_seeds_need_kind(capsys):
    code, _, err = run(capsys, "batch", "--seeds", "1:3")
    assert code == 2


def test_batch_dir(tmp_path, capsys):
    write(tmp_path, "b.mesc", MESC)
    write(tmp_path, "a.mesc", "mesc 1 2\n0 1\n")
    code, out, _ = run(capsys, "batch", "--dir", str(tmp_path), "--json")
    assert code == 0
    ids = [json.loads(l)["id"] for l in out.strip().splitlines()]
    assert ids == sorted(ids)
    assert len(ids) == 2


def test_batch_dir_guard_skips(tmp_path, capsys):
    write(tmp_path, "big.mesc", BIG_MESC)
    write(tmp_path, "ok.mesc", MESC)
    code, out, _ = run(capsys, "batch", "--dir", str(tmp_path), "--json")
    assert code == 3
    rows = {json.loads(l)["id"]: json.loads(l) for l in out.strip().splitlines()}
    assert rows["big.mesc"]["status"] == "skipped"
    assert rows["ok.mesc"]["status"] == "ok"


def test_batch_empty_dir(tmp_path, capsys):
    code, out, _ = run(capsys, "batch", "--dir", str(tmp_path))
    assert code == 0
    assert out == ""


def strip_timing(out):
    rows = []
    for line in out.strip().splitlines():
        rep = json.loads(line)
        rep.pop("elapsed_seconds", None)
        rows.append(rep)
    return rows


def test_batch_threads_match(tmp_path, capsys, monkeypatch):
    args = ("batch", "--seeds", "1:6", "--kind", "mest", "--json")
    code1, out1, _ = run(capsys, *args)
    monkeypatch.setenv("ENTCOVER_THREADS", "4")
    code4, out4, _ = run(capsys, *args)
    assert code1 == code4
    assert strip_timing(out1) == strip_timing(out4)


def test_unknown_kind_for_mesc_file(tmp_path, capsys):
    f = write(tmp_path, "a.mesc", MESC)
    code, _, err = run(capsys, "greedy", f, "--kind", "mest")
    assert code == 2
