"""Exact rational arithmetic and sparse linear algebra.

Everything here works over ``fractions.Fraction``; there is no tolerance
parameter anywhere. Row reduction pivots on the first nonzero entry in
column order so results (and therefore reports) are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Raised when operands have incompatible shapes."""


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_scalar(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class SparseVec:
    """Finitely supported vector with natural-number indices."""

    __slots__ = ("entries", "dim")

    def __init__(self, entries: Mapping[int, object] | None = None, dim: int | None = None):
        clean: dict[int, Fraction] = {}
        for idx, val in (entries or {}).items():
            if not isinstance(idx, int) or idx < 0:
                raise DimensionError(f"bad index {idx!r}")
            if dim is not None and idx >= dim:
                raise DimensionError(f"index {idx} outside dimension {dim}")
            v = scalar(val)
            if v:
                clean[idx] = v
        self.entries = clean
        self.dim = dim

    @classmethod
    def from_dense(cls, values: Iterable[object]) -> "SparseVec":
        values = list(values)
        return cls({i: v for i, v in enumerate(values)}, len(values))

    def to_dense(self, dim: int | None = None) -> list[Fraction]:
        n = self.dim if dim is None else dim
        if n is None:
            raise DimensionError("vector has no declared dimension")
        return [self.entries.get(i, ZERO) for i in range(n)]

    def __getitem__(self, idx: int) -> Fraction:
        return self.entries.get(idx, ZERO)

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self.entries.items()))

    def __len__(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def _combine(self, other: "SparseVec", sign: int) -> "SparseVec":
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k, ZERO) + sign * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SparseVec(out, self.dim if self.dim is not None else other.dim)

    def __add__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, -1)

    def scale(self, c) -> "SparseVec":
        c = scalar(c)
        if not c:
            return SparseVec({}, self.dim)
        return SparseVec({k: c * v for k, v in self.entries.items()}, self.dim)

    def dot(self, other: "SparseVec") -> Fraction:
        a, b = self.entries, other.entries
        if len(a) > len(b):
            a, b = b, a
        return sum((v * b[k] for k, v in a.items() if k in b), ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self)
        return f"SparseVec({{{body}}}, dim={self.dim})"


class SparseMat:
    """Sparse matrix stored row-wise; zero entries are never kept."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative shape")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, Fraction]] = {}
        for (r, c), val in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = scalar(val)
            if v:
                data.setdefault(r, {})[c] = v
        self._data = data

    @classmethod
    def _from_rows(cls, rows: int, cols: int, data: dict[int, dict[int, Fraction]]) -> "SparseMat":
        m = cls(rows, cols)
        m._data = {r: row for r, row in data.items() if row}
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMat":
        return cls._from_rows(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMat":
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, rows: list[list[object]]) -> "SparseMat":
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != nc:
                raise DimensionError("ragged rows")
            for j, v in enumerate(row):
                entries[(i, j)] = v
        return cls(nr, nc, entries)

    @classmethod
    def from_columns(cls, columns: list[SparseVec], rows: int) -> "SparseMat":
        data: dict[int, dict[int, Fraction]] = {}
        for j, col in enumerate(columns):
            for i, v in col.entries.items():
                if i >= rows:
                    raise DimensionError(f"column {j} has index {i} >= {rows}")
                data.setdefault(i, {})[j] = v
        return cls._from_rows(rows, len(columns), data)

    @classmethod
    def from_rows(cls, row_vecs: list[SparseVec], cols: int) -> "SparseMat":
        data = {}
        for i, vec in enumerate(row_vecs):
            if any(j >= cols for j in vec.entries):
                raise DimensionError(f"row {i} exceeds {cols} columns")
            data[i] = dict(vec.entries)
        return cls._from_rows(len(row_vecs), cols, data)

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(r, c): v for r, row in self._data.items() for c, v in row.items()}

    def row(self, r: int) -> SparseVec:
        return SparseVec(self._data.get(r, {}), self.cols)

    def column(self, c: int) -> SparseVec:
        return SparseVec({r: row[c] for r, row in self._data.items() if c in row}, self.rows)

    def row_dicts(self) -> list[dict[int, Fraction]]:
        return [dict(self._data.get(r, {})) for r in range(self.rows)]

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        r, c = rc
        return self._data.get(r, {}).get(c, ZERO)

    def to_dense(self) -> list[list[Fraction]]:
        return [[self[r, c] for c in range(self.cols)] for r in range(self.rows)]

    def matvec(self, v: SparseVec) -> SparseVec:
        if v.dim is not None and v.dim != self.cols:
            raise DimensionError(f"vector of dim {v.dim} vs {self.cols} columns")
        out = {}
        ve = v.entries
        for r, row in self._data.items():
            s = sum((a * ve[c] for c, a in row.items() if c in ve), ZERO)
            if s:
                out[r] = s
        return SparseVec(out, self.rows)

    def transpose(self) -> "SparseMat":
        data: dict[int, dict[int, Fraction]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return SparseMat._from_rows(self.cols, self.rows, data)

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.cols != other.rows:
            raise DimensionError(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        data: dict[int, dict[int, Fraction]] = {}
        for r, row in self._data.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for c, b in other._data.get(k, {}).items():
                    acc[c] = acc.get(c, ZERO) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                data[r] = acc
        return SparseMat._from_rows(self.rows, other.cols, data)

    def __add__(self, other: "SparseMat") -> "SparseMat":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMat") -> "SparseMat":
        return self._combine(other, -1)

    def _combine(self, other: "SparseMat", sign: int) -> "SparseMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch")
        data = {r: dict(row) for r, row in self._data.items()}
        for r, row in other._data.items():
            target = data.setdefault(r, {})
            for c, v in row.items():
                s = target.get(c, ZERO) + sign * v
                if s:
                    target[c] = s
                else:
                    target.pop(c, None)
        return SparseMat._from_rows(self.rows, self.cols, data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMat):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._data == other._data

    def __repr__(self) -> str:
        return f"SparseMat({self.rows}x{self.cols}, nnz={sum(len(r) for r in self._data.values())})"


def _eliminate(rows: list[dict[int, Fraction]]) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form of the given rows.

    Pivot columns are taken in increasing order; within a column the first
    remaining row with a nonzero entry is used.
    """
    pending = [dict(r) for r in rows if r]
    reduced: list[dict[int, Fraction]] = []
    pivots: list[int] = []
    while pending:
        col = min(min(r) for r in pending)
        pick = next(i for i, r in enumerate(pending) if col in r)
        prow = pending.pop(pick)
        inv = ONE / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        nxt = []
        for r in pending:
            f = r.get(col)
            if f:
                for c, v in prow.items():
                    s = r.get(c, ZERO) - f * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
            if r:
                nxt.append(r)
        pending = nxt
        for r in reduced:
            f = r.get(col)
            if f:
                for c, v in prow.items():
                    s = r.get(c, ZERO) - f * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
        reduced.append(prow)
        pivots.append(col)
    return reduced, pivots


def rref(m: SparseMat) -> tuple[SparseMat, list[int]]:
    reduced, pivots = _eliminate(m.row_dicts())
    return SparseMat._from_rows(len(reduced), m.cols, dict(enumerate(reduced))), pivots


def rank(m: SparseMat) -> int:
    # eliminate along the shorter side
    if m.rows > m.cols:
        m = m.transpose()
    return len(_eliminate(m.row_dicts())[1])


def kernel_basis(m: SparseMat) -> list[SparseVec]:
    reduced, pivots = _eliminate(m.row_dicts())
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = {free: ONE}
        for row, p in zip(reduced, pivots):
            v = row.get(free)
            if v:
                vec[p] = -v
        basis.append(SparseVec(vec, m.cols))
    return basis


def solve(m: SparseMat, b: SparseVec) -> SparseVec | None:
    """Some x with m x = b, or None when the system is inconsistent."""
    if b.dim is not None and b.dim != m.rows:
        raise DimensionError(f"right-hand side of dim {b.dim} for {m.rows} rows")
    if any(i >= m.rows for i in b.entries):
        raise DimensionError("right-hand side index out of range")
    aug = m.cols
    rows = m.row_dicts()
    for i, v in b.entries.items():
        rows[i][aug] = v
    reduced, pivots = _eliminate(rows)
    if aug in pivots:
        return None
    x = {p: row.get(aug, ZERO) for row, p in zip(reduced, pivots)}
    sol = SparseVec(x, m.cols)
    if m.matvec(sol) != SparseVec(b.entries, m.rows):
        raise ArithmeticError("solution failed re-multiplication")
    return sol


def solve_many(m: SparseMat, rhs: list[SparseVec]) -> list[SparseVec | None]:
    """Solve m x = b for several right-hand sides with one elimination."""
    if not rhs:
        return []
    base = m.cols
    rows = m.row_dicts()
    for j, b in enumerate(rhs):
        if b.dim is not None and b.dim != m.rows:
            raise DimensionError("right-hand side dimension mismatch")
        for i, v in b.entries.items():
            rows[i][base + j] = v
    reduced, pivots = _eliminate(rows)
    out: list[SparseVec | None] = []
    # a row whose pivot lies past the coefficient block reads 0 = (entries there);
    # every right-hand side with a nonzero entry in such a row is inconsistent
    bad = {c - base for row, p in zip(reduced, pivots) if p >= base for c in row if c >= base}
    for j in range(len(rhs)):
        if j in bad:
            out.append(None)
            continue
        x = {}
        for row, p in zip(reduced, pivots):
            if p >= base:
                break
            v = row.get(base + j)
            if v:
                x[p] = v
        out.append(SparseVec(x, m.cols))
    return out


def tensor(m1: SparseMat, m2: SparseMat) -> SparseMat:
    """Kronecker product; (r1, r2) maps to r1 * rows(m2) + r2."""
    data: dict[int, dict[int, Fraction]] = {}
    for r1, row1 in m1._data.items():
        for r2, row2 in m2._data.items():
            out = {}
            for c1, a in row1.items():
                for c2, b in row2.items():
                    out[c1 * m2.cols + c2] = a * b
            data[r1 * m2.rows + r2] = out
    return SparseMat._from_rows(m1.rows * m2.rows, m1.cols * m2.cols, data)


def flip(dim_a: int) -> SparseMat:
    """Permutation matrix of the swap i*n + j -> j*n + i on A (x) A."""
    n = dim_a
    return SparseMat._from_rows(n * n, n * n, {j * n + i: {i * n + j: ONE} for i in range(n) for j in range(n)})


class Subspace:
    """Subspace of Q^dim held as a reduced echelon basis."""

    def __init__(self, dim: int, vectors: Iterable[SparseVec] = ()):
        self.dim = dim
        self._rows: list[dict[int, Fraction]] = []
        self._pivots: list[int] = []
        self.extend(vectors)

    def _reduce(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        v = dict(vec)
        for row, p in zip(self._rows, self._pivots):
            f = v.get(p)
            if f:
                for c, x in row.items():
                    s = v.get(c, ZERO) - f * x
                    if s:
                        v[c] = s
                    else:
                        v.pop(c, None)
        return v

    def add(self, vec: SparseVec) -> bool:
        """Add a vector; return True if it enlarged the span."""
        v = self._reduce(vec.entries)
        if not v:
            return False
        p = min(v)
        inv = ONE / v[p]
        v = {c: x * inv for c, x in v.items()}
        for row in self._rows:
            f = row.get(p)
            if f:
                for c, x in v.items():
                    s = row.get(c, ZERO) - f * x
                    if s:
                        row[c] = s
                    else:
                        row.pop(c, None)
        self._rows.append(v)
        self._pivots.append(p)
        return True

    def extend(self, vectors: Iterable[SparseVec]) -> None:
        for v in vectors:
            self.add(v)

    def contains(self, vec: SparseVec) -> bool:
        return not self._reduce(vec.entries)

    def __contains__(self, vec: SparseVec) -> bool:
        return self.contains(vec)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def basis(self) -> list[SparseVec]:
        order = sorted(range(len(self._rows)), key=lambda i: self._pivots[i])
        return [SparseVec(self._rows[i], self.dim) for i in order]

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rank == other.rank and self.is_subspace_of(other)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, rank={self.rank})"


class Indexer:
    """Stable bijection between hashable keys and 0..n-1 (insertion order)."""

    def __init__(self, keys: Iterable[Hashable] = ()):
        self._index: dict[Hashable, int] = {}
        self._keys: list[Hashable] = []
        for k in keys:
            self.index(k)

    def index(self, key: Hashable) -> int:
        i = self._index.get(key)
        if i is None:
            i = len(self._keys)
            self._index[key] = i
            self._keys.append(key)
        return i

    def key(self, i: int) -> Hashable:
        return self._keys[i]

    def __contains__(self, key) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self._keys)

    def keys(self) -> list[Hashable]:
        return list(self._keys)

    def vec(self, mapping: Mapping[Hashable, Fraction], grow: bool = True) -> SparseVec:
        if grow:
            return SparseVec({self.index(k): v for k, v in mapping.items()})
        return SparseVec({self._index[k]: v for k, v in mapping.items()}, len(self))

    def unvec(self, vec: SparseVec) -> dict[Hashable, Fraction]:
        return {self._keys[i]: v for i, v in vec.entries.items()}
