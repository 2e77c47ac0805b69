import json

import pytest

from logdr.cli import EXIT_CERT, EXIT_FIGURE, EXIT_OK, EXIT_USAGE, check_logdr133, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_figure_check_passes(capsys):
    code, out, _ = run(capsys, "compute", "logdr", "-g", "1", "-n", "2", "-A", "3,-3", "--check-figure", "logDR133")
    assert code == EXIT_OK
    assert json.loads(out)["figure"]["ok"]


@pytest.mark.parametrize("seed", ["2", "3"])
def test_figure_check_tolerates_refined_chambers(capsys, seed):
    # seed 2 gives a theta of the other sign, whose subdivision adds rays (1,3) and (3,1)
    code, out, _ = run(capsys, "compute", "logdr", "-g", "1", "-n", "2", "-A", "3,-3",
                       "--theta-seed", seed, "--check-figure", "logDR133")
    assert code == EXIT_OK and json.loads(out)["figure"]["ok"]


def test_figure_check_rejects_other_types(capsys):
    code, _, err = run(capsys, "compute", "logdr", "-g", "1", "-n", "2", "-A", "2,-2", "--check-figure", "logDR133")
    assert code == EXIT_USAGE


def test_figure_mismatch_detected():
    from logdr.pixton import p_theta_class
    from logdr.stability import default_theta
    c = p_theta_class(1, 2, (2, -2), 0, default_theta(1, 2, 1)).degree_part(1)
    assert check_logdr133(c)


def test_missing_A_is_usage_error(capsys):
    code, _, err = run(capsys, "subdivide", "-g", "1", "-n", "2")
    assert code == EXIT_USAGE and "-A" in err


def test_bad_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "subdivide", "-g", "1", "-n", "2", "-A", "x,y")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys)
    assert code == EXIT_USAGE


def test_degenerate_theta_is_certificate_failure(capsys):
    code, _, err = run(capsys, "compute", "logdr", "-g", "1", "-n", "2", "-A", "3,-3", "--theta-b", "0,0")
    assert code == EXIT_CERT and "degenerate" in err


def test_subdivide_banana(capsys):
    code, out, _ = run(capsys, "subdivide", "-g", "1", "-n", "2", "-A", "3,-3", "-k", "0", "--theta-seed", "1")
    assert code == EXIT_OK
    d = json.loads(out)
    banana = [c for c in d["counts"] if len(c["graph"]["edges"]) == 2 and c["graph"]["edges"][0] != [0, 0]
              and all(e[0] != e[1] for e in c["graph"]["edges"])][0]
    assert sorted(banana["new_rays"]) == [[1, 1], [1, 2], [2, 1]]


def test_subdivide_dollar(capsys):
    code, out, _ = run(capsys, "subdivide", "-g", "2", "-n", "2", "-A", "3,-3", "-k", "0", "--graph", "dollar")
    assert code == EXIT_OK
    assert json.loads(out)["counts"][0]["cones_by_dim"] == {"1": 4, "2": 12, "3": 9}


def test_ddr1(capsys):
    code, out, _ = run(capsys, "compute", "ddr1", "--a", "2", "--b", "3")
    assert code == EXIT_OK and json.loads(out)["double_edge_coefficient"] == "-1"


def test_relations(capsys):
    code, out, _ = run(capsys, "compute", "relations", "-g", "1", "-n", "2", "-A", "3,-3", "--h", "2")
    d = json.loads(out)
    assert code == EXIT_OK and d["relations"][0]["degree"] == 2 and d["relations"][0]["verified"] is False


def test_output_is_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["compute", "logdr", "-g", "1", "-n", "3", "-A", "2,-1,-1", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    text = paths[0].read_text()
    assert "." not in "".join(ch for ch in text if not ch.isalpha() and ch not in '"')  # no floats


def test_other_commands(capsys):
    assert run(capsys, "graphs", "-g", "1", "-n", "2")[0] == EXIT_OK
    assert run(capsys, "stability", "-g", "2", "-n", "2")[0] == EXIT_OK
    assert run(capsys, "compute", "genus1", "-n", "2", "-A", "3,-3")[0] == EXIT_OK
    assert run(capsys, "compute", "dr", "-g", "1", "-n", "2", "-A", "3,-3")[0] == EXIT_OK
    assert run(capsys, "validate", "-g", "1", "-n", "2", "-A", "3,-3")[0] == EXIT_OK


def test_cap_exit_code(capsys, monkeypatch):
    from logdr import graphs
    monkeypatch.setattr(graphs, "_CACHE", {})
    monkeypatch.setenv("LOGDR_CAP", "5")  # restored after the test; the flag sets it too
    code, _, _ = run(capsys, "graphs", "-g", "2", "-n", "3", "--cap", "5")
    assert code == 5
