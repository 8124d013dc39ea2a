import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smm.errors import DimensionError, FieldMismatchError
from smm.field import PrimeField
from smm.linalg import (
    COL_WISE,
    ROW_WISE,
    FieldMatrix,
    PartitionSpec,
    crop,
    from_bytes,
    matmul,
    pad_cols,
    pad_rows,
    partition,
    read_text,
    scalar_axpy,
    stack,
    to_bytes,
    write_text,
)

F7 = PrimeField(7)
F97 = PrimeField(97)


def naive_matmul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Oracle: multiply over the integers, reduce at the end."""
    q = a.field.modulus
    rows = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            row.append(sum(a.at(i, k) * b.at(k, j) for k in range(a.cols)) % q)
        rows.append(row)
    return FieldMatrix.from_rows(a.field, rows)


# ---------------------------------------------------------------------------
# matmul
# ---------------------------------------------------------------------------

def test_matmul_identity():
    rng = random.Random(0)
    b = FieldMatrix.random(F7, 3, 4, rng)
    assert FieldMatrix.identity(F7, 3) @ b == b


def test_matmul_hand_example():
    a = FieldMatrix.from_rows(F7, [[1, 2], [3, 4]])
    b = FieldMatrix.from_rows(F7, [[5, 6], [0, 1]])
    assert (a @ b).to_rows() == [[5, 1], [1, 1]]


def test_matmul_associative():
    rng = random.Random(1)
    a, b, c = (FieldMatrix.random(F7, 3, 3, rng) for _ in range(3))
    assert (a @ b) @ c == a @ (b @ c)


@pytest.mark.parametrize("q", [5, 97])
def test_matmul_matches_naive_oracle(q):
    f = PrimeField(q)
    rng = random.Random(q)
    for _ in range(20):
        n, k, m = rng.randint(1, 16), rng.randint(1, 16), rng.randint(1, 16)
        a = FieldMatrix.random(f, n, k, rng)
        b = FieldMatrix.random(f, k, m, rng)
        assert a @ b == naive_matmul(a, b)


def test_matmul_dimension_error():
    a = FieldMatrix.zeros(F7, 2, 3)
    b = FieldMatrix.zeros(F7, 2, 3)
    with pytest.raises(DimensionError):
        matmul(a, b)


def test_field_mismatch():
    a = FieldMatrix.zeros(F7, 2, 2)
    b = FieldMatrix.zeros(F97, 2, 2)
    with pytest.raises(FieldMismatchError):
        matmul(a, b)
    with pytest.raises(FieldMismatchError):
        _ = a + b


# ---------------------------------------------------------------------------
# partition / stack
# ---------------------------------------------------------------------------

def test_partition_identity():
    m = FieldMatrix.random(F7, 4, 3, random.Random(2))
    assert partition(m, PartitionSpec(ROW_WISE, 1)) == [m]


def test_partition_rows_roundtrip():
    m = FieldMatrix.random(F7, 4, 3, random.Random(3))
    blocks = partition(m, PartitionSpec(ROW_WISE, 2))
    assert [b.shape for b in blocks] == [(2, 3), (2, 3)]
    assert stack(blocks, ROW_WISE) == m


def test_partition_halves_rows():
    # an m x n matrix splits into two (m/2) x n blocks
    for m in (2, 4, 6):
        mat = FieldMatrix.random(F7, m, 5, random.Random(m))
        blocks = partition(mat, PartitionSpec(ROW_WISE, 2))
        assert all(b.shape == (m // 2, 5) for b in blocks)
        assert stack(blocks, ROW_WISE) == mat


def test_partition_requires_divisibility():
    m = FieldMatrix.zeros(F7, 3, 3)
    with pytest.raises(DimensionError):
        partition(m, PartitionSpec(ROW_WISE, 2))
    with pytest.raises(ValueError):
        PartitionSpec(ROW_WISE, 0)


def test_stack_single():
    m = FieldMatrix.random(F7, 2, 2, random.Random(4))
    assert stack([m], ROW_WISE) == m
    assert stack([m], COL_WISE) == m


def test_block_grid_reproduces_product():
    # the 2x2 grid of block products {A_i B_j} stacks back to AB
    rng = random.Random(5)
    a = FieldMatrix.random(F97, 4, 4, rng)
    b = FieldMatrix.random(F97, 4, 4, rng)
    a_blocks = partition(a, PartitionSpec(ROW_WISE, 2))
    b_blocks = partition(b, PartitionSpec(COL_WISE, 2))
    grid_rows = [
        stack([ai @ bj for bj in b_blocks], COL_WISE) for ai in a_blocks
    ]
    assert stack(grid_rows, ROW_WISE) == a @ b


def test_row_stack_of_half_products():
    rng = random.Random(6)
    a = FieldMatrix.random(F7, 4, 3, rng)
    b = FieldMatrix.random(F7, 3, 2, rng)
    a1, a2 = partition(a, PartitionSpec(ROW_WISE, 2))
    assert stack([a1 @ b, a2 @ b], ROW_WISE) == a @ b


@settings(max_examples=60)
@given(
    rows=st.integers(1, 4), cols=st.integers(1, 4),
    parts=st.integers(1, 4), row_axis=st.booleans(),
    seed=st.integers(0, 10**6),
)
def test_partition_stack_roundtrip_property(rows, cols, parts, row_axis, seed):
    axis = ROW_WISE if row_axis else COL_WISE
    shape = (rows * parts, cols) if row_axis else (rows, cols * parts)
    m = FieldMatrix.random(F7, *shape, random.Random(seed))
    assert stack(partition(m, PartitionSpec(axis, parts)), axis) == m


# ---------------------------------------------------------------------------
# scalar_axpy / padding / crop
# ---------------------------------------------------------------------------

def test_scalar_axpy_trivial():
    rng = random.Random(7)
    acc = FieldMatrix.random(F7, 3, 3, rng)
    m = FieldMatrix.random(F7, 3, 3, rng)
    assert scalar_axpy(acc, 0, m) == acc
    assert scalar_axpy(FieldMatrix.zeros(F7, 3, 3), 1, m) == m


def test_scalar_axpy_matches_naive():
    rng = random.Random(8)
    acc = FieldMatrix.random(F97, 5, 5, rng)
    m = FieldMatrix.random(F97, 5, 5, rng)
    c = 37
    got = scalar_axpy(acc, c, m)
    for i in range(5):
        for j in range(5):
            assert got.at(i, j) == (acc.at(i, j) + c * m.at(i, j)) % 97
    with pytest.raises(DimensionError):
        scalar_axpy(acc, c, FieldMatrix.zeros(F97, 4, 5))


def test_pad_and_crop():
    m = FieldMatrix.from_rows(F7, [[1, 2], [3, 4], [5, 6]])
    p = pad_rows(m, 2)
    assert p.shape == (4, 2) and p.to_rows()[3] == [0, 0]
    assert crop(p, 3, 2) == m
    assert pad_rows(m, 3) is m
    pc = pad_cols(m, 3)
    assert pc.shape == (3, 3) and [r[2] for r in pc.to_rows()] == [0, 0, 0]
    assert crop(pc, 3, 2) == m
    with pytest.raises(DimensionError):
        crop(m, 4, 2)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_text_roundtrip(tmp_path):
    m = FieldMatrix.random(PrimeField(101), 3, 4, random.Random(9))
    path = tmp_path / "m.txt"
    with path.open("w") as fh:
        write_text(m, fh)
    first = path.read_text().splitlines()[0]
    assert first == "3 4 101"
    with path.open() as fh:
        assert read_text(fh) == m


def test_binary_roundtrip():
    m = FieldMatrix.random(PrimeField(2**31 - 1), 2, 5, random.Random(10))
    blob = to_bytes(m)
    assert len(blob) == 24 + 8 * 10
    got, offset = from_bytes(blob)
    assert got == m and offset == len(blob)
    # two matrices back to back parse sequentially
    m2 = FieldMatrix.random(PrimeField(2**31 - 1), 1, 1, random.Random(11))
    buf = to_bytes(m) + to_bytes(m2)
    a, off = from_bytes(buf)
    b, off = from_bytes(buf, off)
    assert (a, b) == (m, m2) and off == len(buf)


def test_binary_errors():
    m = FieldMatrix.zeros(F7, 2, 2)
    blob = to_bytes(m)
    with pytest.raises(ValueError):
        from_bytes(blob[:10])
    with pytest.raises(ValueError):
        from_bytes(blob[:-1])
    big = PrimeField((1 << 89) - 1)  # Mersenne prime wider than 64 bits
    with pytest.raises(ValueError):
        to_bytes(FieldMatrix.zeros(big, 1, 1))


def test_entries_reduced_on_construction():
    m = FieldMatrix(F7, 2, 2, [7, 8, -1, 15])
    assert m.entries == (0, 1, 6, 1)
    with pytest.raises(DimensionError):
        FieldMatrix(F7, 2, 2, [1, 2, 3])
    with pytest.raises(DimensionError):
        FieldMatrix(F7, 0, 2, [])
