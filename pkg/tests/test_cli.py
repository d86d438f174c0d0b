"""Command-line runs: exit codes, report shape, determinism and the worked examples."""
import json
import subprocess
import sys

import pytest

from globcat.cgroups import associated_category, simple_complex
from globcat.cli import main, run
from globcat.corpus import complex_corpus, named_category
from globcat.fincat import cyclic_group, simplex_category


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def functor_file(tmp_path, name, dom, cod, obj_map, mor_map=None):
    return write(tmp_path, name, {"domain": dom, "codomain": cod, "object_map": obj_map, "morphism_map": mor_map or {}})


def capture(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- worked examples --------------------------------------------------------------------------

def test_example_fiedorowicz(capsys):
    code, out, _ = capture(["example", "fiedorowicz"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["homology"]["groups"] == ["Z", "0", "Z", "0"]


def test_example_horn_counterexample(capsys):
    code, out, _ = capture(["example", "horn-counterexample"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["I=p[1]"]["isomorphism"] is False
    assert rep["result"]["I=BC2"]["isomorphism"] is True


# -- exit codes --------------------------------------------------------------------------------

def test_validate_bad_file_is_exit_2(tmp_path, capsys):
    bad = write(
        tmp_path,
        "bad.json",
        {"elements": ["e", "a", "b"], "unit": "e",
         "mult": [["e", "a", "b"], ["a", "a", "a"], ["b", "b", "a"]]},
    )
    code, out, err = capture(["validate", bad], capsys)
    rep = json.loads(out)
    assert code == 2 and rep["error"] == "NonAssociative"
    assert "error" in err


def test_validate_good_category(tmp_path, capsys):
    good = write(tmp_path, "p1.json", simplex_category(1).to_dict())
    code, out, _ = capture(["validate", good], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["morphisms"] == 3
    assert rep["inputs"][good] and rep["caps"]["max_degree"] == 4


def test_malformed_json_is_exit_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert capture(["validate", str(path)], capsys)[0] == 2


def test_unknown_builtin_is_exit_2(capsys):
    assert capture(["nerve", "nonsense"], capsys)[0] == 2


def test_usage_error_is_nonzero(capsys):
    assert main(["no-such-command"]) == 2
    assert "usage" in capsys.readouterr().err


def test_negative_verdict_is_exit_1(tmp_path, capsys):
    d0 = functor_file(tmp_path, "d0.json", "terminal", "p[1]", {"*": "1"})
    code, out, _ = capture(["dwyer-check", d0], capsys)
    assert code == 1 and json.loads(out)["result"]["reason"] == "NotSieve"


def test_group_cap_is_exit_2(capsys):
    assert capture(["orbit-hom", "C2", "S4", "--max-group-order", "6"], capsys)[0] == 2


# -- subcommands -----------------------------------------------------------------------------

def test_nerve_and_homology(capsys):
    code, out, _ = capture(["nerve", "BC2", "--degree", "3"], capsys)
    assert code == 0 and json.loads(out)["result"]["nondegenerate"] == [1, 1, 1, 1]
    code, out, _ = capture(["homology", "BC3", "--degree", "2"], capsys)
    assert json.loads(out)["result"]["groups"] == ["Z", "Z/3", "0"]
    code, out, _ = capture(["homology", "dDelta[2]", "--sset", "--degree", "1"], capsys)
    assert json.loads(out)["result"]["groups"] == ["Z", "Z"]


def test_max_degree_caps_the_request(capsys):
    code, out, _ = capture(["homology", "BC2", "--degree", "9", "--max-degree", "2"], capsys)
    assert len(json.loads(out)["result"]["groups"]) == 3


def test_funcat(capsys):
    code, out, _ = capture(["funcat", "p[1]", "p[1]"], capsys)
    assert code == 0 and json.loads(out)["result"]["objects"] == 3


def test_dwyer_pushout_with_universal_property(tmp_path, capsys):
    i = functor_file(tmp_path, "i.json", "terminal", "p[1]", {"*": "0"})
    k = functor_file(tmp_path, "k.json", "terminal", "BC2", {"*": "*"})
    code, out, _ = capture(["dwyer-pushout", i, k, "--universal", "p[2]"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["universal_property"]["holds"]


def test_fun_preserve(tmp_path, capsys):
    i = functor_file(tmp_path, "i.json", "terminal", "p[1]", {"*": "0"})
    k = functor_file(tmp_path, "k.json", "terminal", "p[1]", {"*": "1"})
    assert capture(["fun-preserve", "BC2", i, k], capsys)[0] == 0
    assert capture(["fun-preserve", "p[1]", i, k], capsys)[0] == 2
    assert capture(["fun-preserve", "p[1]", i, k, "--allow-non-strongly-connected"], capsys)[0] == 1


def test_orbit_hom_and_global_nerve(capsys):
    code, out, _ = capture(["orbit-hom", "C2", "S3"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["pi0"] == 2
    code, out, _ = capture(["global-nerve", "BC2", "C2", "--restrict", "C1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["restrictions"] == 1


def test_cell_and_gamma_cell(capsys):
    code, out, _ = capture(["cell", "1", "C2"], capsys)
    assert code == 0 and json.loads(out)["result"]["dwyer"]["dwyer"]
    code, out, _ = capture(["gamma-cell", "Delta[1]", "terminal"], capsys)
    assert code == 0 and json.loads(out)["result"]["is_poset"]


def test_cog_commands(tmp_path, capsys):
    cg = simple_complex(simplex_category(1), [cyclic_group(2)] * 2, {(0, 1): [0, 1]})
    path = write(tmp_path, "cg.json", cg.to_dict())
    assert capture(["cog-validate", path], capsys)[0] == 0
    code, out, _ = capture(["cog-assemble", path], capsys)
    cat = json.loads(out)["result"]["category"]
    assert code == 0 and len(cat["morphisms"]) == 6
    cpath = write(tmp_path, "cat.json", cat)
    code, out, _ = capture(["cog-reconstruct", cpath], capsys)
    assert code == 0 and json.loads(out)["result"]["kappa_isomorphism"]
    assert capture(["cog-reconstruct", "par"], capsys)[0] == 1


def test_cog_validate_rejects_broken_cocycle(tmp_path, capsys):
    _, cg = [c for c in complex_corpus() if c[0] == "twisted-p2-C2"][0]
    d = cg.to_dict()
    assert capture(["cog-validate", write(tmp_path, "ok.json", d)], capsys)[0] == 0
    # over a 3-chain of C2 with identity transitions any single nontrivial twist breaks the cocycle
    cg3 = simple_complex(simplex_category(3), [cyclic_group(2)] * 4, {(x, y): [0, 1] for x in range(4) for y in range(x + 1, 4)})
    d3 = cg3.to_dict()
    d3["twists"] = {"0<1<2": "1"}
    code, out, _ = capture(["cog-validate", write(tmp_path, "bad.json", d3)], capsys)
    assert code == 2 and json.loads(out)["error"] == "CocycleViolation"


def test_cog_reconstruct_opposite(tmp_path, capsys):
    from globcat.fincat import opposite_category

    _, cg = complex_corpus()[5]
    cat = opposite_category(associated_category(cg)).to_dict()
    path = write(tmp_path, "op.json", cat)
    assert capture(["cog-reconstruct", path, "--variant", "opposite"], capsys)[0] == 0


def test_grothendieck_command(tmp_path, capsys):
    diagram = {"base": "p[1]", "categories": {"0": "BC2", "1": "BC2"}, "functors": {"0->1": {"object_map": {"*": "*"}, "morphism_map": {"0": "0", "1": "1"}}}}
    path = write(tmp_path, "diag.json", diagram)
    code, out, _ = capture(["grothendieck", path, "--compare", "BC2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["hom_counts"] == [[2, 2], [0, 2]]
    assert rep["result"]["comparison"]["isomorphism"]


# -- determinism and output -------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [["example", "fiedorowicz"], ["orbit-hom", "C3", "S3"], ["nerve", "V"], ["funcat", "BC2", "BC3"]],
)
def test_reports_are_byte_identical(argv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_timings_only_on_request(capsys):
    _, rep = run(["nerve", "p[2]"])
    assert "timings" not in rep
    _, rep = run(["nerve", "p[2]", "--timings"])
    assert "nerve" in rep["timings"]
    capsys.readouterr()


def test_report_is_self_describing(capsys):
    _, rep = run(["orbit-hom", "C2", "C2"])
    assert set(rep) == {"command", "version", "inputs", "caps", "verdict", "result"}
    assert rep["inputs"] == {"C2": "builtin:C2"}
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "globcat", "nerve", "terminal"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["counts"] == [1, 1, 1, 1]


def test_named_categories_resolve():
    for name in ["terminal", "empty", "p[3]", "BC4", "BS3", "EC2", "BIdem2", "fiedorowicz", "V", "Lambda", "diamond", "par"]:
        assert named_category(name) is not None
    assert named_category("Q8") is None
