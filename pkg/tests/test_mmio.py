import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from deimcur.cur import ErrorCertificate, SweepPoint
from deimcur.errors import (IndexOutOfRangeError, MalformedDataError, MalformedHeaderError,
                            UnsupportedFieldError, UnsupportedSymmetryError)
from deimcur.mmio import (CSV_HEADER, SweepRecord, iter_matrix_market_columns,
                          read_indices, read_matrix_market, read_sweep_csv, write_indices,
                          write_matrix_market, write_sweep_csv, write_vector)
from deimcur.selection import IndexSelection


def put(tmp_path, text, name="m.mtx"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_coordinate(tmp_path):
    A = read_matrix_market(put(tmp_path, "%%MatrixMarket matrix coordinate real general\n"
                                         "% comment\n2 2 1\n1 2 5.0\n"))
    np.testing.assert_array_equal(A, [[0, 5], [0, 0]])


def test_array_column_major(tmp_path):
    A = read_matrix_market(put(tmp_path, "%%MatrixMarket matrix array real general\n"
                                         "2 2\n1\n2\n3\n4\n"))
    np.testing.assert_array_equal(A, [[1, 3], [2, 4]])


def test_symmetric_coordinate(tmp_path):
    A = read_matrix_market(put(tmp_path, "%%MatrixMarket matrix coordinate integer symmetric\n"
                                         "2 2 2\n2 1 7\n1 1 1\n"))
    np.testing.assert_array_equal(A, [[1, 7], [7, 0]])


def test_symmetric_array(tmp_path):
    A = read_matrix_market(put(tmp_path, "%%MatrixMarket matrix array real symmetric\n"
                                         "2 2\n1 2\n3\n"))
    np.testing.assert_array_equal(A, [[1, 2], [2, 3]])


@pytest.mark.parametrize("text,exc", [
    ("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", UnsupportedFieldError),
    ("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n", UnsupportedFieldError),
    ("%%MatrixMarket matrix coordinate real skew-symmetric\n1 1 0\n", UnsupportedSymmetryError),
    ("%%MatrixMarket matrix coordinate real hermitian\n1 1 0\n", UnsupportedSymmetryError),
    ("MatrixMarket matrix coordinate real general\n1 1 0\n", MalformedHeaderError),
    ("%%MatrixMarket vector coordinate real general\n1 1 0\n", MalformedHeaderError),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", IndexOutOfRangeError),
    ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", MalformedDataError),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n", MalformedDataError),
    ("%%MatrixMarket matrix array real general\n2 2\n1 2 3\n", MalformedDataError),
    ("%%MatrixMarket matrix coordinate real general\n", MalformedDataError),
    ("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 nan\n", MalformedDataError),
])
def test_errors_are_named(tmp_path, text, exc):
    with pytest.raises(exc):
        read_matrix_market(put(tmp_path, text))


def test_write_special_cases(tmp_path):
    path = tmp_path / "z.mtx"
    write_matrix_market(np.zeros((3, 2)), path)
    assert path.read_text().splitlines()[1] == "3 2 0"
    np.testing.assert_array_equal(read_matrix_market(path), np.zeros((3, 2)))
    write_matrix_market([[2.5]], path)
    np.testing.assert_array_equal(read_matrix_market(path), [[2.5]])


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)), elements=finite))
def test_matrix_round_trip(tmp_path_factory, A):
    path = tmp_path_factory.mktemp("rt") / "a.mtx"
    write_matrix_market(A, path)
    B = read_matrix_market(path)
    assert np.array_equal(A, B)
    # the column stream sees the same matrix
    np.testing.assert_array_equal(np.column_stack(list(iter_matrix_market_columns(path))), A)


def test_array_stream_is_lazy(tmp_path):
    path = put(tmp_path, "%%MatrixMarket matrix array real general\n3 2\n1 2 3\n4 5 6\n")
    cols = iter_matrix_market_columns(path)
    np.testing.assert_array_equal(next(cols), [1, 2, 3])
    np.testing.assert_array_equal(next(cols), [4, 5, 6])
    bad = put(tmp_path, "%%MatrixMarket matrix array real general\n3 2\n1 2 3\n4\n", "b.mtx")
    with pytest.raises(MalformedDataError):
        list(iter_matrix_market_columns(bad))


def test_indices_and_vectors(tmp_path):
    write_indices(IndexSelection((3, 1, 2)), tmp_path / "p.txt")
    assert (tmp_path / "p.txt").read_text() == "3\n1\n2\n"
    assert read_indices(tmp_path / "p.txt") == [3, 1, 2]
    write_vector([0.1, 2.0], tmp_path / "s.txt")
    assert [float(x) for x in (tmp_path / "s.txt").read_text().split()] == [0.1, 2.0]


def rec(k, method, eta_p=1.0, eta_q=2.0, sigma=0.5, obs=0.7):
    return SweepRecord(k, method, obs, sigma, eta_p, eta_q, (eta_p + eta_q) * sigma, 1.0)


def test_csv_single_record(tmp_path):
    path = tmp_path / "s.csv"
    write_sweep_csv([rec(1, "deim")], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == ",".join(CSV_HEADER)


def test_csv_ordering(tmp_path):
    path = tmp_path / "s.csv"
    write_sweep_csv([rec(2, "qr"), rec(1, "deim"), rec(1, "qr"), rec(2, "deim")], path)
    got = [(r.method, r.k) for r in read_sweep_csv(path)]
    assert got == [("deim", 1), ("deim", 2), ("qr", 1), ("qr", 2)]


def test_csv_rejects_inconsistent_bound(tmp_path):
    bad = SweepRecord(1, "deim", 0.1, 1.0, 1.0, 1.0, 3.0, 0.0)
    with pytest.raises(ValueError):
        write_sweep_csv([bad], tmp_path / "s.csv")
    with pytest.raises(ValueError):
        write_sweep_csv([], tmp_path / "s.csv")


def test_record_from_point():
    cert = ErrorCertificate(1.5, 2.5, 0.25, 1.0, 0.5)
    r = SweepRecord.from_point(SweepPoint(3, "deim", cert, 12.5), timing=False)
    assert r.bound == 1.0 and r.elapsed_ms == 0.0
    r = SweepRecord.from_point(SweepPoint(4, "qr", None, 3.0, "boom"))
    assert math.isnan(r.bound) and r.elapsed_ms == 3.0


pos = st.floats(1e-300, 1e300)


@given(st.lists(st.tuples(st.integers(1, 50), st.sampled_from(["deim", "qr", "ls-top"]),
                          st.floats(1.0, 1e6), st.floats(1.0, 1e6), st.floats(0.0, 1e3), pos),
                min_size=1, max_size=10, unique_by=lambda t: (t[0], t[1])))
def test_csv_round_trip(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "s.csv"
    recs = [rec(k, m, ep, eq, sg, ob) for k, m, ep, eq, sg, ob in rows]
    write_sweep_csv(recs, path)
    back = read_sweep_csv(path)
    assert back == sorted(recs, key=lambda r: (r.method, r.k))
    for r in back:
        assert r.bound == pytest.approx((r.eta_p + r.eta_q) * r.sigma_next, rel=1e-12)
