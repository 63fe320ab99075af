import random
import subprocess
import sys

import pytest

from flagstab.cli import ProblemFile, format_problem, parse_problem
from flagstab.errors import ParseError
from flagstab.instances import random_series, random_stabilizer_element, witness_instance
from flagstab.linalg import GF, QQ, Mat


def cli(*args, text_input=None):
    return subprocess.run(
        [sys.executable, "-m", "flagstab.cli", *args],
        capture_output=True,
        text=True,
        input=text_input,
    )


def test_parse_minimal():
    pf = parse_problem("field gf 2\ndim 2\nmatrix g\n1 0\n0 1\n")
    assert pf.matrices["g"].is_identity()
    pf = parse_problem("# comment\nfield q\ndim 1\nmatrix g\n2/4\n")
    from fractions import Fraction

    assert pf.matrices["g"].rows[0][0] == Fraction(1, 2)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as e:
        parse_problem("field gf 2\ndim 2\nmatrix g\n1 0\n0 x\n")
    assert e.value.line == 5
    with pytest.raises(ParseError):
        parse_problem("dim 2\nfield gf 2\n")
    with pytest.raises(ParseError) as e:
        parse_problem("field gf 2\ndim 3\nseries L 2\nsubspace 1\n1 0 0\nsubspace 1\n0 1 0\n")
    assert "series" in str(e.value)


def test_round_trip_random_files():
    rng = random.Random(1)
    for _ in range(25):
        field = rng.choice([GF(2), GF(7), QQ])
        n = rng.randint(2, 6)
        pf = ProblemFile(field, n)
        s = random_series(rng, field, n, rng.randint(0, n - 1))
        pf.series["L"] = s
        pf.matrices["g"] = random_stabilizer_element(rng, s)
        text = format_problem(pf)
        back = parse_problem(text)
        assert back == pf
        assert format_problem(back) == text


def test_check_stab_exit_codes(tmp_path):
    rng = random.Random(2)
    g, s = witness_instance(rng, GF(5), 6, 2)
    pf = ProblemFile(GF(5), s.ambient_dim)
    pf.matrices["g"] = g
    pf.series["L"] = s
    f = tmp_path / "p.txt"
    f.write_text(format_problem(pf))
    r = cli("check-stab", str(f))
    assert r.returncode == 0 and "result=true" in r.stdout
    pf.matrices["g"] = Mat(
        GF(5),
        [[2 if i == j else 0 for j in range(s.ambient_dim)] for i in range(s.ambient_dim)],
    )
    f.write_text(format_problem(pf))
    r = cli("check-stab", str(f))
    assert r.returncode == 1 and "result=false" in r.stdout
    r = cli("check-stab", str(tmp_path / "missing.txt"))
    assert r.returncode == 2


def test_witness_verify_cycle(tmp_path):
    rng = random.Random(3)
    g, s = witness_instance(rng, GF(5), 6, 2)
    pf = ProblemFile(GF(5), s.ambient_dim)
    pf.matrices["g"] = g
    pf.series["L"] = s
    f = tmp_path / "p.txt"
    cert = tmp_path / "c.txt"
    f.write_text(format_problem(pf))
    r = cli("witness", str(f), "--out", str(cert))
    assert r.returncode == 0 and "result=certified" in r.stdout
    r = cli("verify", str(cert))
    assert r.returncode == 0 and "result=verified" in r.stdout
    # tampered probe is rejected with exit 1
    text = cert.read_text().splitlines()
    i = text.index("probe")
    text[i + 1] = " ".join("0" for _ in text[i + 1].split())
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(text) + "\n")
    r = cli("verify", str(bad))
    assert r.returncode == 1 and "result=rejected" in r.stdout


def test_witness_identity_is_input_error(tmp_path):
    rng = random.Random(4)
    _, s = witness_instance(rng, GF(5), 6, 2)
    pf = ProblemFile(GF(5), s.ambient_dim)
    pf.matrices["g"] = Mat.identity(GF(5), s.ambient_dim)
    pf.series["L"] = s
    f = tmp_path / "p.txt"
    f.write_text(format_problem(pf))
    r = cli("witness", str(f))
    assert r.returncode == 2
    assert "coarsenable" in r.stderr


def test_gen_round_trips_and_certifies(tmp_path):
    r = cli("gen", "--seed", "11", "--length", "7", "--exponent", "2", "--field", "q")
    assert r.returncode == 0
    pf = parse_problem(r.stdout)
    assert format_problem(pf) == r.stdout
    f = tmp_path / "gen.txt"
    f.write_text(r.stdout)
    r2 = cli("witness", str(f), "--out", str(tmp_path / "c.txt"))
    assert r2.returncode == 0
    r3 = cli("verify", str(tmp_path / "c.txt"))
    assert r3.returncode == 0


def test_stdin_input():
    r = cli("gen", "--seed", "5", "--length", "6", "--exponent", "2", "--field", "gf3")
    out = cli("exponent", "-", text_input=r.stdout)
    assert out.returncode == 0 and "exponent=2" in out.stdout


def test_remaining_commands(tmp_path):
    rng = random.Random(6)
    g, s = witness_instance(rng, GF(5), 6, 2)
    pf = ProblemFile(GF(5), s.ambient_dim)
    pf.matrices["g"] = g
    pf.series["L"] = s
    f = tmp_path / "p.txt"
    f.write_text(format_problem(pf))
    assert cli("jordan", str(f)).returncode == 0
    assert cli("coarsen", str(f)).returncode == 0
    assert cli("split", str(f)).returncode == 0
    r = cli("lcs", str(f), "--gens", "g")
    assert r.returncode == 0 and "result=zero" in r.stdout
    r = cli("refine", str(f), "--gens", "g")
    assert r.returncode == 0
    r = cli("comm-check", str(f), "--t", "g", "--u", "2", "--k", "3")
    assert r.returncode == 0 and "result=ok" in r.stdout
    r = cli("extend-witness", str(f), "--n", "6", "--out", str(tmp_path / "c2.txt"))
    assert r.returncode == 0
    assert cli("verify", str(tmp_path / "c2.txt")).returncode == 0
    mc = "field q\ndim 1\nmclain x 2\n0 1/2 1\n1/2 1 1\n"
    mf = tmp_path / "m.txt"
    mf.write_text(mc)
    r = cli("mclain", str(mf), "--elems", "x")
    assert r.returncode == 0 and "support=3" in r.stdout


def test_patch_command(tmp_path):
    rng = random.Random(7)
    field = GF(7)
    s = random_series(rng, field, 5, 3)
    from flagstab.series import section_series

    pf = ProblemFile(field, 5)
    pf.series["L"] = s
    induced = section_series(s, s.members[0], s.members[2])
    pf.maps["h1"] = random_stabilizer_element(rng, induced, sparsity=2)
    f = tmp_path / "p.txt"
    f.write_text(format_problem(pf))
    r = cli("patch", str(f), "--section", "2:0:h1")
    assert r.returncode == 0 and "result=ok" in r.stdout
