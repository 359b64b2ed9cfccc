import io
import subprocess
import sys

import pytest

from lmv.cli import dispatch

E1 = "(((u [x.v,y.w]) [r.p,s.q]) e)"
E2 = "(u [x. mu @a.(@a <x,(@a w)>), y. v])"


def run(argv, text=""):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(argv, io.StringIO(text), out, err)
    return code, out.getvalue(), err.getvalue()


def test_develop_example():
    code, out, _ = run(["develop", "-"], E1)
    assert code == 0
    assert out == "(u [x.(v [r.(p e), s.(q e)]), y.(w [r.(p e), s.(q e)])])\n"


def test_check_reports_type_errors():
    code, out, err = run(["check", "-"], r"\x:A.(x x)")
    assert code == 1 and out == ""
    assert "rule-mismatch" in err
    code, out, _ = run(["check", "--ctx", "y:B", "-"], r"\x:A.y")
    assert code == 0 and out.strip() == r"y:B ; |- \x:A.y : A -> B"


def test_normalize_out_of_fuel():
    code, out, err = run(["normalize", "--mode", "cbv", "--strategy", "lo", "--fuel", "0", "-"], r"(\x.x y)")
    assert code == 3 and "fuel" in err
    code, out, _ = run(["normalize", "--mode", "cbv", "-"], E1)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[0] == ".  delta  ((u [x.v, y.w]) [r.(p e), s.(q e)])"


def test_step_at_path_and_by_strategy():
    code, out, _ = run(["step", "--at", "1", "-"], r"(f (\x.x y))")
    assert (code, out) == (0, "1  beta_v  (f y)\n")
    code, out, _ = run(["step", "--mode", "cbn", "-"], r"(\x.x (f y))")
    assert (code, out) == (0, ".  beta  (f y)\n")
    code, _, err = run(["step", "--at", "0", "-"], r"(f (\x.x y))")
    assert code == 2 and "no cbv redex" in err
    code, _, _ = run(["step", "--at", "7.7", "-"], "x")
    assert code == 2


def test_reducts_and_budget():
    code, out, _ = run(["reducts", "-"], E1)
    assert code == 0 and len(out.splitlines()) == 4
    code, _, err = run(["reducts", "--max", "2", "-"], E1)
    assert code == 3


def test_segtrees_listing():
    code, out, _ = run(["segtrees", "-"], E2)
    assert code == 0
    assert out.splitlines() == [
        "root .  2 tree(s)",
        "  1. members [.]  acceptors [1.0, 1.1]",
        "  2. members [., 1.0]  acceptors [1.0.0.0, 1.0.0.0.1.0, 1.1]  maximal",
    ]
    code, _, _ = run(["segtrees", "--cap", "1", "-"], E2)
    assert code == 3


def test_parse_errors_and_flags():
    code, _, err = run(["parse", "-"], "(f x")
    assert code == 2 and err.startswith("1:5: ")
    assert run(["parse", "--annot", "-"], r"\x:A.x")[1] == "\\x:A.x\n"
    assert run(["step", "--mode", "xyz", "-"], "x")[0] == 2
    assert run(["normalize", "--fuel", "-1", "-"], "x")[0] == 2
    assert run(["frobnicate"])[0] == 2
    assert run([])[0] == 2
    assert run(["parse", "/no/such/file"])[0] == 2
    assert run(["check", "--ctx", "x:(A", "-"], "x")[0] == 2


def test_files_are_read(tmp_path):
    f = tmp_path / "t.lmv"
    f.write_text(E1)
    assert run(["develop", str(f)])[0] == 0


def test_deep_input_does_not_crash():
    code, _, _ = run(["parse", "-"], "(" * 5000 + "x")
    assert code == 2


def test_fuzz():
    code, out, _ = run(["fuzz", "--suite", "roundtrip", "--count", "20", "--size", "6", "--seed", "1"])
    assert code == 0
    assert out.splitlines()[-1] == "RESULT suite=roundtrip pass=20 fail=0 inconclusive=0 skip=0"


def test_output_is_byte_stable():
    for cmd in (["develop", "-"], ["normalize", "-"], ["segtrees", "-"]):
        assert run(cmd, E2) == run(cmd, E2)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lmv", "develop", "-"], input=E1, capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("(u [x.(v [r.(p e)")


@pytest.mark.parametrize("junk", ["", ")", "[x.x, y.y]", "mu @a:(A.x", "\\x.(x", "<x,>", "\x00"])
def test_malformed_input_maps_to_exit_two(junk):
    for cmd in ("parse", "check", "develop", "reducts", "segtrees", "step", "normalize"):
        assert run([cmd, "-"], junk)[0] == 2
