"""Matrix Market (dense in memory), plain index lists and sweep CSV files."""
import csv
from dataclasses import dataclass

import numpy as np

from .densecore import as_matrix
from .errors import (IndexOutOfRangeError, MalformedDataError, MalformedHeaderError,
                     UnsupportedFieldError, UnsupportedSymmetryError)

FIELDS = ("real", "integer")
SYMMETRIES = ("general", "symmetric")


def _header(line):
    tok = line.strip().split()
    if len(tok) != 5 or tok[0].lower() != "%%matrixmarket":
        raise MalformedHeaderError(f"bad Matrix Market banner: {line.strip()!r}")
    obj, fmt, fld, sym = (t.lower() for t in tok[1:])
    if obj != "matrix":
        raise MalformedHeaderError(f"unsupported object {obj!r}")
    if fmt not in ("coordinate", "array"):
        raise MalformedHeaderError(f"unknown format {fmt!r}")
    if fld not in FIELDS:
        raise UnsupportedFieldError(f"field {fld!r} not supported (real or integer only)")
    if sym not in SYMMETRIES:
        raise UnsupportedSymmetryError(f"symmetry {sym!r} not supported")
    return fmt, sym


def _data_lines(fh):
    for line in fh:
        s = line.strip()
        if s and not s.startswith("%"):
            yield s


def _numbers(line, count, what):
    tok = line.split()
    if len(tok) != count:
        raise MalformedDataError(f"expected {count} fields in {what}, got {line!r}")
    return tok


def read_matrix_market(path):
    with open(path, "r") as fh:
        fmt, sym = _header(fh.readline())
        lines = _data_lines(fh)
        try:
            size = next(lines)
        except StopIteration:
            raise MalformedDataError("missing size line") from None
        try:
            if fmt == "coordinate":
                m, n, nnz = (int(t) for t in _numbers(size, 3, "size line"))
            else:
                m, n = (int(t) for t in _numbers(size, 2, "size line"))
        except ValueError:
            raise MalformedDataError(f"bad size line {size!r}") from None
        if m < 1 or n < 1:
            raise MalformedDataError(f"nonpositive dimensions {m} x {n}")
        if sym == "symmetric" and m != n:
            raise MalformedDataError("symmetric matrix must be square")
        A = np.zeros((m, n))
        if fmt == "coordinate":
            count = 0
            for line in lines:
                i, j, v = _numbers(line, 3, "entry")
                try:
                    i, j, v = int(i), int(j), float(v)
                except ValueError:
                    raise MalformedDataError(f"bad entry {line!r}") from None
                if not (1 <= i <= m and 1 <= j <= n):
                    raise IndexOutOfRangeError(f"entry ({i}, {j}) outside {m} x {n}")
                A[i - 1, j - 1] += v
                if sym == "symmetric" and i != j:
                    A[j - 1, i - 1] += v
                count += 1
            if count != nnz:
                raise MalformedDataError(f"header promises {nnz} entries, found {count}")
        else:
            if sym == "symmetric":
                slots = [(i, j) for j in range(n) for i in range(j, m)]
            else:
                slots = [(i, j) for j in range(n) for i in range(m)]
            vals = []
            for line in lines:
                for t in line.split():
                    try:
                        vals.append(float(t))
                    except ValueError:
                        raise MalformedDataError(f"bad value {t!r}") from None
            if len(vals) != len(slots):
                raise MalformedDataError(f"expected {len(slots)} values, found {len(vals)}")
            for (i, j), v in zip(slots, vals):
                A[i, j] = v
                if sym == "symmetric":
                    A[j, i] = v
    if not np.all(np.isfinite(A)):
        raise MalformedDataError("non-finite values")
    return A


def write_matrix_market(A, path):
    """Coordinate/real/general with 17 significant digits (exact round trip)."""
    A = as_matrix(A)
    m, n = A.shape
    # column-major entry order, like the array format
    jj, ii = np.nonzero(A.T)
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{m} {n} {ii.size}\n")
        for i, j in zip(ii, jj):
            fh.write(f"{i + 1} {j + 1} {A[i, j]:.17g}\n")


def write_indices(sel, path):
    with open(path, "w") as fh:
        for i in sel:
            fh.write(f"{i}\n")


def read_indices(path):
    with open(path) as fh:
        return [int(s) for s in (line.strip() for line in fh) if s]


def write_vector(x, path):
    with open(path, "w") as fh:
        for v in np.asarray(x, dtype=np.float64).ravel():
            fh.write(f"{v:.17g}\n")


CSV_HEADER = ("k", "method", "observed_error", "sigma_next", "eta_p", "eta_q",
              "bound", "elapsed_ms")


@dataclass(frozen=True)
class SweepRecord:
    k: int
    method: str
    observed_error: float
    sigma_next: float
    eta_p: float
    eta_q: float
    bound: float
    elapsed_ms: float

    @classmethod
    def from_point(cls, point, timing=True):
        """Build from a :class:`deimcur.cur.SweepPoint`; failed points become NaN rows."""
        c = point.certificate
        ms = point.elapsed_ms if timing else 0.0
        if c is None:
            nan = float("nan")
            return cls(point.k, point.method, nan, nan, nan, nan, nan, ms)
        return cls(point.k, point.method, c.observed_error, c.sigma_next,
                   c.eta_p, c.eta_q, c.bound, ms)


def _fmt(x):
    return f"{x:.17g}"


def write_sweep_csv(records, path):
    """One row per record, grouped by method then ascending ``k``."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    for r in records:
        if np.isfinite(r.bound):
            expect = (r.eta_p + r.eta_q) * r.sigma_next
            if abs(r.bound - expect) > 1e-12 * max(abs(expect), abs(r.bound)):
                raise ValueError(f"record k={r.k} {r.method}: bound != (eta_p+eta_q)*sigma_next")
    records.sort(key=lambda r: (r.method, r.k))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.k, r.method] + [_fmt(getattr(r, f)) for f in CSV_HEADER[2:]])


def read_sweep_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [SweepRecord(int(r["k"]), r["method"], *(float(r[f]) for f in CSV_HEADER[2:]))
            for r in rows]


def iter_matrix_market_columns(path):
    """Yield the columns of a Matrix Market file left to right.

    General ``array`` files are consumed column by column as they are read;
    other layouts have no column order on disk and are loaded whole first.
    """
    with open(path, "r") as fh:
        fmt, sym = _header(fh.readline())
        if fmt == "array" and sym == "general":
            lines = _data_lines(fh)
            try:
                m, n = (int(t) for t in _numbers(next(lines), 2, "size line"))
            except (StopIteration, ValueError):
                raise MalformedDataError("bad or missing size line") from None
            if m < 1 or n < 1:
                raise MalformedDataError(f"nonpositive dimensions {m} x {n}")
            buf = []
            emitted = 0
            for line in lines:
                for t in line.split():
                    try:
                        buf.append(float(t))
                    except ValueError:
                        raise MalformedDataError(f"bad value {t!r}") from None
                    if len(buf) == m:
                        if emitted == n:
                            raise MalformedDataError(f"more than {m * n} values")
                        col = np.array(buf)
                        if not np.all(np.isfinite(col)):
                            raise MalformedDataError("non-finite values")
                        yield col
                        emitted += 1
                        buf = []
            if buf or emitted != n:
                raise MalformedDataError(f"expected {m * n} values")
            return
    A = read_matrix_market(path)
    for j in range(A.shape[1]):
        yield A[:, j].copy()
