"""Exact linear algebra over a prime field F_p.

Everything downstream (annotations, zigzag decompositions, limits and
colimits) reduces to a handful of primitives implemented here: column
reduction with a deterministic pivot rule, rank, solving, kernels, and the
column-stacking linearization of a matrix into a vector.

Conventions, fixed once so that every computation in the package is
reproducible bit for bit:

* entries are canonical representatives in ``{0, ..., p-1}``;
* columns are processed left to right;
* the pivot of a column is its lowest nonzero row index;
* ties go to the leftmost column that claimed the pivot row first.

For p = 2 columns are packed into Python integers (one bit per row), which
makes the inner reduction loop a single big-int XOR.  For odd primes the
columns are kept as int64 numpy arrays.  Plain Gaussian elimination only:
the asymptotically faster matrix-multiplication-based variants are not
worth it at the scales this package targets.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

__all__ = [
    "FieldSpec",
    "FpVector",
    "FpMatrix",
    "rank",
    "column_reduce",
    "solve",
    "solve_multi",
    "kernel",
    "linearize",
    "matmul_mod",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FieldSpec:
    """A prime field, identified by its characteristic."""

    __slots__ = ("characteristic",)

    def __init__(self, characteristic: int = 2):
        characteristic = int(characteristic)
        if not _is_prime(characteristic):
            raise InputError(f"field characteristic must be prime, got {characteristic}")
        if characteristic >= 1 << 31:
            raise InputError("field characteristic too large for exact int64 arithmetic")
        self.characteristic = characteristic

    @property
    def p(self) -> int:
        return self.characteristic

    def inv(self, a: int) -> int:
        a %= self.characteristic
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a field")
        return pow(a, self.characteristic - 2, self.characteristic)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("FieldSpec", self.characteristic))

    def __repr__(self):
        return f"FieldSpec({self.characteristic})"


GF2 = FieldSpec(2)


def _as_array(data, p: int, ndim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=np.int64)
    if arr.ndim != ndim:
        raise InputError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    arr = np.mod(arr, p)
    arr.setflags(write=False)
    return arr


class FpVector:
    """An immutable vector with entries reduced mod the field characteristic."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        self.field = field
        self.data = _as_array(data, field.characteristic, 1)

    def __len__(self):
        return int(self.data.shape[0])

    def __getitem__(self, i) -> int:
        return int(self.data[i])

    def __iter__(self):
        return iter(int(x) for x in self.data)

    def __eq__(self, other):
        return (
            isinstance(other, FpVector)
            and other.field == self.field
            and other.data.shape == self.data.shape
            and bool(np.array_equal(other.data, self.data))
        )

    def is_zero(self) -> bool:
        return not self.data.any()

    def __repr__(self):
        return f"FpVector(p={self.field.p}, {self.data.tolist()})"


class FpMatrix:
    """An immutable matrix over F_p, stored densely in row-major numpy form.

    ``data[i, j]`` is the entry in row ``i``, column ``j``.  All algorithms in
    this module treat the matrix as a list of columns.
    """

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        self.field = field
        self.data = _as_array(data, field.characteristic, 2)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "FpMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FpMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_columns(cls, field: FieldSpec, columns, rows: int | None = None) -> "FpMatrix":
        columns = list(columns)
        if not columns:
            if rows is None:
                rows = 0
            return cls.zeros(field, rows, 0)
        arr = np.stack([np.asarray(c, dtype=np.int64) for c in columns], axis=1)
        return cls(field, arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def column(self, j: int) -> FpVector:
        return FpVector(self.field, self.data[:, j])

    def __eq__(self, other):
        return (
            isinstance(other, FpMatrix)
            and other.field == self.field
            and other.data.shape == self.data.shape
            and bool(np.array_equal(other.data, self.data))
        )

    def is_zero(self) -> bool:
        return not self.data.any()

    def __repr__(self):
        return f"FpMatrix(p={self.field.p}, {self.data.tolist()})"


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact product of two entrywise-reduced integer matrices, mod p.

    Uses BLAS in float64 when the intermediate sums provably fit into the
    53-bit mantissa, otherwise falls back to int64.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if (p - 1) * (p - 1) * inner < (1 << 52):
        prod = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    else:
        prod = a @ b
    return np.mod(prod, p)


# --- reduction engines -------------------------------------------------------
#
# A Reducer consumes columns one at a time, reducing each against the pivots
# claimed so far.  With track=True it also records, for every consumed
# column, its expression in terms of the original columns (the V matrix of
# the reduction R = A V).


class _ReducerF2:
    __slots__ = ("rows", "track", "reduced", "vcols", "pivot_owner", "n")

    def __init__(self, rows: int, track: bool):
        self.rows = rows
        self.track = track
        self.reduced = []       # packed bitset per consumed column
        self.vcols = []         # packed bitset over column indices
        self.pivot_owner = {}   # pivot row -> column index
        self.n = 0

    @staticmethod
    def _pivot(x: int) -> int:
        return (x & -x).bit_length() - 1

    def add(self, col: np.ndarray):
        """Consume one column; return (packed residue, packed V-column)."""
        x = _pack_bits(col)
        v = 1 << self.n if self.track else 0
        while x:
            piv = self._pivot(x)
            owner = self.pivot_owner.get(piv)
            if owner is None:
                self.pivot_owner[piv] = self.n
                break
            x ^= self.reduced[owner]
            if self.track:
                v ^= self.vcols[owner]
        self.reduced.append(x)
        self.vcols.append(v)
        self.n += 1
        return x, v

    def residue_vector(self, x: int) -> np.ndarray:
        return _unpack_bits(x, self.rows)

    def combo_vector(self, v: int, length: int) -> np.ndarray:
        return _unpack_bits(v, length)


class _ReducerFp:
    __slots__ = ("rows", "track", "field", "reduced", "vcols", "pivot_owner", "n")

    def __init__(self, rows: int, track: bool, field: FieldSpec):
        self.rows = rows
        self.track = track
        self.field = field
        self.reduced = []
        self.vcols = []
        self.pivot_owner = {}
        self.n = 0

    def add(self, col: np.ndarray):
        p = self.field.p
        x = np.mod(np.asarray(col, dtype=np.int64), p)
        v = {self.n: 1} if self.track else None
        while True:
            nz = np.nonzero(x)[0]
            if nz.size == 0:
                break
            piv = int(nz[0])
            owner = self.pivot_owner.get(piv)
            if owner is None:
                self.pivot_owner[piv] = self.n
                break
            coef = (int(x[piv]) * self.field.inv(int(self.reduced[owner][piv]))) % p
            x = np.mod(x - coef * self.reduced[owner], p)
            if self.track:
                for k, c in self.vcols[owner].items():
                    v[k] = (v.get(k, 0) - coef * c) % p
        self.reduced.append(x)
        self.vcols.append(v)
        self.n += 1
        return x, v

    def residue_vector(self, x) -> np.ndarray:
        return x

    def combo_vector(self, v, length: int) -> np.ndarray:
        out = np.zeros(length, dtype=np.int64)
        for k, c in v.items():
            if k < length:
                out[k] = c % self.field.p
        return out


def _pack_bits(col: np.ndarray) -> int:
    col = np.asarray(col, dtype=np.uint8)
    if col.size == 0:
        return 0
    return int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little")


def _unpack_bits(x: int, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros(0, dtype=np.int64)
    x &= (1 << length) - 1
    raw = x.to_bytes((length + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:length].astype(np.int64)


def make_reducer(field: FieldSpec, rows: int, track: bool = False):
    if field.p == 2:
        return _ReducerF2(rows, track)
    return _ReducerFp(rows, track, field)


def _residue_is_zero(field: FieldSpec, x) -> bool:
    if field.p == 2:
        return x == 0
    return not x.any()


# --- public operations -------------------------------------------------------


def rank(m: FpMatrix) -> int:
    """Dimension of the column space of ``m``."""
    red = make_reducer(m.field, m.rows)
    r = 0
    for j in range(m.cols):
        x, _ = red.add(m.data[:, j])
        if not _residue_is_zero(m.field, x):
            r += 1
    return r


def column_reduce(m: FpMatrix):
    """Reduce ``m`` by left-to-right column operations.

    Returns ``(reduced, ops)`` where every nonzero column of ``reduced`` has a
    distinct pivot row (its lowest nonzero row) and ``ops`` is the log of
    elementary operations ``(dst, src, coeff)``, meaning
    ``col[dst] += coeff * col[src]``, which replays the reduction on any
    matrix of the same shape.
    """
    p = m.field.p
    cols = [m.data[:, j].copy() for j in range(m.cols)]
    ops: list[tuple[int, int, int]] = []
    pivot_owner: dict[int, int] = {}
    for j in range(m.cols):
        while True:
            nz = np.nonzero(cols[j])[0]
            if nz.size == 0:
                break
            piv = int(nz[0])
            owner = pivot_owner.get(piv)
            if owner is None:
                pivot_owner[piv] = j
                break
            coef = (int(cols[j][piv]) * m.field.inv(int(cols[owner][piv]))) % p
            cols[j] = np.mod(cols[j] - coef * cols[owner], p)
            ops.append((j, owner, (-coef) % p))
    if m.cols == 0:
        return FpMatrix.zeros(m.field, m.rows, 0), ops
    return FpMatrix(m.field, np.stack(cols, axis=1)), ops


def solve(a: FpMatrix, v: FpVector):
    """Solve ``a @ x = v``; return an ``FpVector`` or ``None`` if unsolvable.

    When several solutions exist, the one determined by the left-to-right
    reduction (leftmost pivots first, free coordinates zero) is returned.
    """
    if len(v) != a.rows:
        raise InputError(f"dimension mismatch: matrix has {a.rows} rows, vector has {len(v)}")
    sols = solve_multi(a, np.asarray(v.data, dtype=np.int64).reshape(-1, 1))
    if sols is None:
        return None
    return FpVector(a.field, sols[:, 0])


def solve_multi(a: FpMatrix, rhs: np.ndarray):
    """Solve ``a @ X = rhs`` column-wise with one shared reduction.

    ``rhs`` is a raw ``(a.rows, k)`` integer array.  Returns a raw
    ``(a.cols, k)`` array, or ``None`` if any column is unsolvable.
    """
    field = a.field
    red = make_reducer(field, a.rows, track=True)
    for j in range(a.cols):
        red.add(a.data[:, j])
    ncols = a.cols
    out = np.zeros((ncols, rhs.shape[1]), dtype=np.int64)
    for j in range(rhs.shape[1]):
        x, v = red.add(np.mod(rhs[:, j], field.p))
        if not _residue_is_zero(field, x):
            return None
        combo = red.combo_vector(v, ncols)
        # residue = v_col + sum(combo * a_cols) = 0, so x = -combo.
        out[:, j] = np.mod(-combo, field.p)
    return out


def kernel(m: FpMatrix) -> FpMatrix:
    """A deterministic basis of ``{x : m @ x = 0}``, as matrix columns."""
    field = m.field
    red = make_reducer(field, m.rows, track=True)
    basis = []
    for j in range(m.cols):
        x, v = red.add(m.data[:, j])
        if _residue_is_zero(field, x):
            basis.append(red.combo_vector(v, m.cols))
    return FpMatrix.from_columns(field, basis, rows=m.cols)


def linearize(m: FpMatrix) -> FpVector:
    """Concatenate the columns of ``m`` in index order into one vector."""
    return FpVector(m.field, m.data.ravel(order="F"))
