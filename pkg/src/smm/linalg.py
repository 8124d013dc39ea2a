"""Dense matrices over a prime field, plus the block operations the
encoding schemes are built from: row/column partitioning, stacking, and
scaled accumulation.

Matrices are immutable values: entries live in a row-major tuple of
reduced ints.  All arithmetic is exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .errors import DimensionError, FieldMismatchError
from .field import PrimeField

ROW_WISE = "row"
COL_WISE = "col"


class FieldMatrix:
    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: PrimeField, rows: int, cols: int, entries: Iterable[int]):
        if rows <= 0 or cols <= 0:
            raise DimensionError(f"matrix dims must be positive, got {rows}x{cols}")
        q = field.modulus
        ents = tuple(int(e) % q for e in entries)
        if len(ents) != rows * cols:
            raise DimensionError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(ents)}"
            )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ents)

    def __setattr__(self, name, value):
        raise AttributeError("FieldMatrix is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]]) -> "FieldMatrix":
        if not rows or not rows[0]:
            raise DimensionError("from_rows needs a non-empty grid")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(field, len(rows), ncols, [v for r in rows for v in r])

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FieldMatrix":
        ents = [0] * (n * n)
        for i in range(n):
            ents[i * n + i] = 1
        return cls(field, n, n, ents)

    @classmethod
    def random(cls, field: PrimeField, rows: int, cols: int, rng) -> "FieldMatrix":
        return cls(
            field, rows, cols,
            [field.sample_uniform(rng) for _ in range(rows * cols)],
        )

    # -- accessors ---------------------------------------------------------

    def at(self, r: int, c: int) -> int:
        return self.entries[r * self.cols + c]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.field.modulus, self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.rows}x{self.cols} mod {self.field.modulus})"

    # -- arithmetic ----------------------------------------------------------

    def _check_same_field(self, other: "FieldMatrix"):
        if self.field != other.field:
            raise FieldMismatchError(
                f"matrices over {self.field!r} and {other.field!r}"
            )

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} + {other.shape}")
        q = self.field.modulus
        return FieldMatrix(
            self.field, self.rows, self.cols,
            [(a + b) % q for a, b in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} - {other.shape}")
        q = self.field.modulus
        return FieldMatrix(
            self.field, self.rows, self.cols,
            [(a - b) % q for a, b in zip(self.entries, other.entries)],
        )

    def scale(self, c) -> "FieldMatrix":
        c = self.field.coerce(c)
        q = self.field.modulus
        return FieldMatrix(
            self.field, self.rows, self.cols, [c * a % q for a in self.entries]
        )

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return matmul(self, other)


def matmul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Exact product over F_q; a.cols must equal b.rows."""
    a._check_same_field(b)
    if a.cols != b.rows:
        raise DimensionError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    q = a.field.modulus
    n, k, m = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = [0] * (n * m)
    for i in range(n):
        arow = ae[i * k:(i + 1) * k]
        base = i * m
        for j in range(m):
            s = 0
            for t in range(k):
                s += arow[t] * be[t * m + j]
            out[base + j] = s % q
    return FieldMatrix(a.field, n, m, out)


def scalar_axpy(acc: FieldMatrix, c, m: FieldMatrix) -> FieldMatrix:
    """acc + c*m entrywise."""
    acc._check_same_field(m)
    if acc.shape != m.shape:
        raise DimensionError(f"shape mismatch {acc.shape} vs {m.shape}")
    c = acc.field.coerce(c)
    q = acc.field.modulus
    return FieldMatrix(
        acc.field, acc.rows, acc.cols,
        [(a + c * b) % q for a, b in zip(acc.entries, m.entries)],
    )


@dataclass(frozen=True)
class PartitionSpec:
    """How to split a matrix into equal blocks along one axis."""

    axis: str  # ROW_WISE or COL_WISE
    parts: int

    def __post_init__(self):
        if self.axis not in (ROW_WISE, COL_WISE):
            raise ValueError(f"axis must be {ROW_WISE!r} or {COL_WISE!r}")
        if self.parts <= 0:
            raise ValueError("parts must be positive")


def partition(m: FieldMatrix, spec: PartitionSpec) -> list[FieldMatrix]:
    """Split into spec.parts equal blocks; the split dimension must divide.

    Use pad_rows/pad_cols first when it does not.
    """
    if spec.axis == ROW_WISE:
        if m.rows % spec.parts:
            raise DimensionError(
                f"{m.rows} rows not divisible into {spec.parts} parts"
            )
        h = m.rows // spec.parts
        return [
            FieldMatrix(m.field, h, m.cols,
                        m.entries[p * h * m.cols:(p + 1) * h * m.cols])
            for p in range(spec.parts)
        ]
    if m.cols % spec.parts:
        raise DimensionError(f"{m.cols} cols not divisible into {spec.parts} parts")
    w = m.cols // spec.parts
    blocks = []
    for p in range(spec.parts):
        ents = []
        for r in range(m.rows):
            base = r * m.cols + p * w
            ents.extend(m.entries[base:base + w])
        blocks.append(FieldMatrix(m.field, m.rows, w, ents))
    return blocks


def stack(blocks: Sequence[FieldMatrix], axis: str) -> FieldMatrix:
    """Inverse of partition: reassemble equal-shape blocks along axis."""
    if not blocks:
        raise DimensionError("cannot stack zero blocks")
    first = blocks[0]
    for b in blocks[1:]:
        first._check_same_field(b)
        if b.shape != first.shape:
            raise DimensionError("ragged blocks")
    if axis == ROW_WISE:
        ents = []
        for b in blocks:
            ents.extend(b.entries)
        return FieldMatrix(first.field, first.rows * len(blocks), first.cols, ents)
    if axis != COL_WISE:
        raise ValueError(f"axis must be {ROW_WISE!r} or {COL_WISE!r}")
    ents = []
    for r in range(first.rows):
        for b in blocks:
            ents.extend(b.entries[r * b.cols:(r + 1) * b.cols])
    return FieldMatrix(first.field, first.rows, first.cols * len(blocks), ents)


def pad_rows(m: FieldMatrix, multiple: int) -> FieldMatrix:
    """Zero-pad rows up to the next multiple; decode strips the padding."""
    extra = -m.rows % multiple
    if extra == 0:
        return m
    return FieldMatrix(
        m.field, m.rows + extra, m.cols,
        m.entries + (0,) * (extra * m.cols),
    )


def pad_cols(m: FieldMatrix, multiple: int) -> FieldMatrix:
    extra = -m.cols % multiple
    if extra == 0:
        return m
    ents = []
    for r in range(m.rows):
        ents.extend(m.entries[r * m.cols:(r + 1) * m.cols])
        ents.extend([0] * extra)
    return FieldMatrix(m.field, m.rows, m.cols + extra, ents)


def crop(m: FieldMatrix, rows: int, cols: int) -> FieldMatrix:
    """Top-left rows x cols submatrix (strips zero padding)."""
    if rows > m.rows or cols > m.cols:
        raise DimensionError(f"cannot crop {m.shape} to {(rows, cols)}")
    if (rows, cols) == m.shape:
        return m
    ents = []
    for r in range(rows):
        ents.extend(m.entries[r * m.cols:r * m.cols + cols])
    return FieldMatrix(m.field, rows, cols, ents)


# -- text format: line 1 "rows cols modulus", then one line per row ------


def write_text(m: FieldMatrix, fh: IO[str]) -> None:
    fh.write(f"{m.rows} {m.cols} {m.field.modulus}\n")
    c = m.cols
    for r in range(m.rows):
        fh.write(" ".join(str(v) for v in m.entries[r * c:(r + 1) * c]))
        fh.write("\n")


def read_text(fh: IO[str]) -> FieldMatrix:
    header = fh.readline().split()
    if len(header) != 3:
        raise ValueError("matrix header must be 'rows cols modulus'")
    rows, cols, modulus = (int(x) for x in header)
    field = PrimeField(modulus)
    ents: list[int] = []
    for _ in range(rows):
        line = fh.readline().split()
        if len(line) != cols:
            raise ValueError(f"expected {cols} entries per row, got {len(line)}")
        ents.extend(int(x) for x in line)
    return FieldMatrix(field, rows, cols, ents)


# -- binary format: u64 rows, u64 cols, u64 modulus, then rows*cols u64
#    values, all little-endian ------------------------------------------

_HEADER = struct.Struct("<QQQ")
_U64_MAX = (1 << 64) - 1


def to_bytes(m: FieldMatrix) -> bytes:
    if m.field.modulus > _U64_MAX:
        raise ValueError("binary format carries at most 64-bit moduli")
    return _HEADER.pack(m.rows, m.cols, m.field.modulus) + struct.pack(
        f"<{len(m.entries)}Q", *m.entries
    )


def from_bytes(buf: bytes, offset: int = 0) -> tuple[FieldMatrix, int]:
    """Parse one matrix; returns (matrix, offset past it)."""
    if len(buf) - offset < _HEADER.size:
        raise ValueError("truncated matrix header")
    rows, cols, modulus = _HEADER.unpack_from(buf, offset)
    offset += _HEADER.size
    count = rows * cols
    need = 8 * count
    if len(buf) - offset < need:
        raise ValueError("truncated matrix body")
    ents = struct.unpack_from(f"<{count}Q", buf, offset)
    field = PrimeField(modulus)
    return FieldMatrix(field, rows, cols, ents), offset + need
