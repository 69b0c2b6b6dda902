import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deimcur.cli import cli_main
from deimcur.mmio import read_indices, read_matrix_market, write_matrix_market
from deimcur.synthgen import rank_k_matrix
from oracles import two_norm


def run(*argv):
    return cli_main([str(a) for a in argv])


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "a.mtx"
    assert run("gen", "--preset", "eq61", "--m", 300, "--n", 60, "--seed", 2,
               "--density", 0.1, "--out", path) == 0
    return path


def test_growth_factor_picks_leading_rows(tmp_path, capsys):
    g = tmp_path / "g.mtx"
    assert run("gen", "--preset", "growth", "--m", 8, "--n", 3, "--seed", 0, "--out", g) == 0
    assert run("factor", "--in", g, "--rank", 3, "--method", "deim",
               "--out-prefix", tmp_path / "g") == 0
    assert read_indices(tmp_path / "g_p.txt") == [1, 2, 3]
    cert = json.loads(capsys.readouterr().out)
    assert 2.828 < cert["eta_p"] < 22.63


def test_sweep_exact_rank(tmp_path):
    A = rank_k_matrix(40, 25, 5, seed=1)
    write_matrix_market(A, tmp_path / "r.mtx")
    out = tmp_path / "s.csv"
    assert run("sweep", "--in", tmp_path / "r.mtx", "--kmax", 5, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["k"]) for r in rows] == [1, 2, 3, 4, 5]
    assert float(rows[-1]["observed_error"]) <= 1e-10 * two_norm(A)


def test_sample_factor_byte_identical(tmp_path, small):
    for tag in ("a", "b"):
        assert run("factor", "--in", small, "--rank", 6, "--method", "ls-sample", "--lev-r", 10,
                   "--seed", 7, "--out-prefix", tmp_path / tag) == 0
    for suffix in ("p.txt", "q.txt", "C.mtx", "U.mtx", "R.mtx"):
        assert (tmp_path / f"a_{suffix}").read_bytes() == (tmp_path / f"b_{suffix}").read_bytes()


def test_factor_outputs_consistent(tmp_path, small, capsys):
    assert run("factor", "--in", small, "--rank", 5, "--variant", "interpolatory",
               "--out-prefix", tmp_path / "f") == 0
    A = read_matrix_market(small)
    p = np.array(read_indices(tmp_path / "f_p.txt")) - 1
    q = np.array(read_indices(tmp_path / "f_q.txt")) - 1
    C = read_matrix_market(tmp_path / "f_C.mtx")
    U = read_matrix_market(tmp_path / "f_U.mtx")
    R = read_matrix_market(tmp_path / "f_R.mtx")
    np.testing.assert_array_equal(C, A[:, q])
    np.testing.assert_array_equal(R, A[p])
    cert = json.loads(capsys.readouterr().out)
    assert cert["observed_error"] == pytest.approx(two_norm(A - C @ U @ R), rel=1e-8)
    assert cert["bound"] == pytest.approx((cert["eta_p"] + cert["eta_q"]) * cert["sigma_next"])


def test_svd_engines(tmp_path, small, capsys):
    assert run("svd", "--in", small, "--rank", 4, "--out-prefix", tmp_path / "e") == 0
    exact = json.loads(capsys.readouterr().out)
    s = np.linalg.svd(read_matrix_market(small), compute_uv=False)
    got = np.loadtxt(tmp_path / "e_S.txt")
    np.testing.assert_allclose(got, s[:4], rtol=1e-12)
    assert exact["residual_estimate"] == pytest.approx(s[4])
    assert read_matrix_market(tmp_path / "e_V.mtx").shape == (300, 4)
    assert read_matrix_market(tmp_path / "e_W.mtx").shape == (60, 4)
    assert run("svd", "--in", small, "--rank", 4, "--engine", "incremental", "--tol", 1e-6,
               "--out-prefix", tmp_path / "i") == 0
    inc = json.loads(capsys.readouterr().out)
    assert inc["engine"] == "incremental" and inc["tol"] == 1e-6
    np.testing.assert_allclose(np.loadtxt(tmp_path / "i_S.txt"), s[:4], rtol=1e-4)


def test_sweep_methods_and_incremental(tmp_path, small):
    out = tmp_path / "s.csv"
    assert run("sweep", "--in", small, "--kmax", 4, "--methods", "qr,deim,ls-top",
               "--lev-r", 4, "--svd-engine", "incremental", "--no-timing", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["method"], int(r["k"])) for r in rows] == \
        [(m, k) for m in ("deim", "ls-top", "qr") for k in range(1, 5)]
    assert all(r["elapsed_ms"] == "0" for r in rows)


def test_deim_bound_column_dominates(tmp_path, small):
    out = tmp_path / "s.csv"
    assert run("sweep", "--in", small, "--kmax", 12, "--out", out) == 0
    A = read_matrix_market(small)
    for r in csv.DictReader(out.open()):
        assert float(r["observed_error"]) <= float(r["bound"]) + 1e-8 * two_norm(A)


@pytest.mark.parametrize("argv", [
    [],
    ["factor"],
    ["bogus"],
    ["gen", "--preset", "eq99", "--m", "3", "--n", "3", "--out", "x"],
    ["gen", "--preset", "growth", "--m", "3", "--n", "3", "--out", "x"],
    ["svd", "--in", "a.mtx", "--rank", "0", "--out-prefix", "x"],
    ["sweep", "--in", "a.mtx", "--kmax", "3", "--methods", "deim,nope", "--out", "x"],
])
def test_usage_errors(argv, capsys):
    assert cli_main(argv) == 1
    assert capsys.readouterr().err


def test_missing_lev_r_is_usage(small, tmp_path, capsys):
    assert run("factor", "--in", small, "--rank", 3, "--method", "ls-top",
               "--out-prefix", tmp_path / "x") == 1
    assert "--lev-r" in capsys.readouterr().err


def test_rank_too_large_is_usage(small, tmp_path):
    assert run("factor", "--in", small, "--rank", 61, "--out-prefix", tmp_path / "x") == 1


def test_data_error(tmp_path, capsys):
    A = np.zeros((4, 3))
    A[0, 0] = 1.0
    write_matrix_market(A, tmp_path / "d.mtx")
    assert run("factor", "--in", tmp_path / "d.mtx", "--rank", 2, "--method", "qr",
               "--out-prefix", tmp_path / "x") == 2
    assert "data error" in capsys.readouterr().err


def test_io_errors(tmp_path, capsys):
    assert run("factor", "--in", tmp_path / "missing.mtx", "--rank", 2,
               "--out-prefix", tmp_path / "x") == 3
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n")
    assert run("svd", "--in", bad, "--rank", 1, "--out-prefix", tmp_path / "x") == 3
    assert run("gen", "--preset", "eq61", "--m", 20, "--n", 10,
               "--out", tmp_path / "no" / "dir.mtx") == 3
    assert "I/O error" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert cli_main(["--help"]) == 0
    assert "factor" in capsys.readouterr().out


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "deimcur", "gen", "--preset", "eq62",
                          "--m", "30", "--n", "10", "--out", str(tmp_path / "x.mtx")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and (tmp_path / "x.mtx").exists()
    out = subprocess.run([sys.executable, "-m", "deimcur", "svd"], capture_output=True, text=True)
    assert out.returncode == 1 and out.stderr


@settings(max_examples=100)
@given(method=st.sampled_from(["deim", "qr", "ls-top", "ls-sample"]),
       variant=st.sampled_from(["orthogonal", "interpolatory"]),
       k=st.integers(1, 4), seed=st.integers(0, 2**31), gen_seed=st.integers(0, 50))
def test_cli_determinism(method, variant, k, seed, gen_seed):
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        A = rank_k_matrix(20, 12, 6, gen_seed) + 1e-3 * rank_k_matrix(20, 12, 12, gen_seed + 1)
        write_matrix_market(A, d / "a.mtx")
        argv = ["factor", "--in", d / "a.mtx", "--rank", k, "--method", method,
                "--variant", variant, "--lev-r", 6, "--seed", seed]
        codes = [run(*argv, "--out-prefix", d / tag) for tag in ("a", "b")]
        assert codes[0] == codes[1]
        for suffix in ("p.txt", "q.txt", "C.mtx", "U.mtx", "R.mtx"):
            fa, fb = d / f"a_{suffix}", d / f"b_{suffix}"
            assert fa.exists() == fb.exists()
            if fa.exists():
                assert fa.read_bytes() == fb.read_bytes()
        out = d / "s.csv"
        sweeps = []
        for _ in range(2):
            assert run("sweep", "--in", d / "a.mtx", "--kmax", k, "--methods", method,
                       "--lev-r", 6, "--seed", seed, "--no-timing", "--out", out) == 0
            sweeps.append(out.read_bytes())
        assert sweeps[0] == sweeps[1]
