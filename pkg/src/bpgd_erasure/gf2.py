"""Bit-packed dense linear algebra over GF(2).

Rows are stored as little-endian ``uint64`` words: bit ``j`` of a row lives in
word ``j // 64`` at position ``j % 64``. Bits past ``cols`` are always zero.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "MAX_BITS",
    "BitMatrix",
    "BitVector",
    "mat_vec",
    "rref",
    "rank",
    "solve",
    "nullspace_basis",
    "in_rowspace",
    "kron",
    "circulant",
]

#: Upper bound on ``rows * cols`` for any matrix built by this module.
MAX_BITS = 1 << 26

_WORD = 64


def _nwords(cols: int) -> int:
    return (cols + _WORD - 1) // _WORD


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into rows of uint64 words."""
    rows, cols = dense.shape
    nw = _nwords(cols)
    packed = np.packbits(dense.astype(np.uint8, copy=False), axis=1, bitorder="little")
    out = np.zeros((rows, nw * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view(np.uint64).reshape(rows, nw)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little", count=cols)


def _check_size(rows: int, cols: int) -> None:
    if rows < 0 or cols < 0:
        raise ValueError(f"negative shape ({rows}, {cols})")
    if rows * cols > MAX_BITS:
        raise ValueError(
            f"matrix of shape ({rows}, {cols}) exceeds MAX_BITS={MAX_BITS}"
        )


class BitMatrix:
    """Immutable dense matrix over GF(2).

    Parameters
    ----------
    words : ndarray of uint64, shape (rows, ceil(cols / 64))
        Packed row storage. Trailing bits must be zero.
    cols : int
        Number of columns.

    Most callers should use :meth:`from_dense` instead.
    """

    __slots__ = ("words", "rows", "cols")

    def __init__(self, words: np.ndarray, cols: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != _nwords(cols):
            raise ValueError("word array does not match column count")
        _check_size(words.shape[0], cols)
        words.setflags(write=False)
        self.words = words
        self.rows = words.shape[0]
        self.cols = cols

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {a.shape}")
        _check_size(*a.shape)
        return cls(_pack(a & 1), a.shape[1])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        _check_size(rows, cols)
        return cls(np.zeros((rows, _nwords(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: list, cols: int) -> "BitMatrix":
        """Build from per-row lists of column indices (duplicates cancel)."""
        dense = np.zeros((len(rows), cols), dtype=np.uint8)
        for i, idx in enumerate(rows):
            for j in idx:
                if not 0 <= j < cols:
                    raise ValueError(f"column index {j} out of range in row {i}")
                dense[i, j] ^= 1
        return cls.from_dense(dense)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def row(self, i: int) -> "BitVector":
        return BitVector(self.words[i].copy(), self.cols)

    def row_supports(self) -> list[np.ndarray]:
        dense = self.to_dense()
        return [np.flatnonzero(r) for r in dense]

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def nnz(self) -> int:
        return int(np.bitwise_count(self.words).sum(dtype=np.int64))

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def select_columns(self, idx) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[:, np.asarray(idx, dtype=np.intp)])

    def is_zero(self) -> bool:
        return not self.words.any()

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return mat_vec(self, other)
        if isinstance(other, BitMatrix):
            if self.cols != other.rows:
                raise ValueError(
                    f"dimension mismatch: {self.shape} @ {other.shape}"
                )
            _check_size(self.rows, other.cols)
            # float64 sums of 0/1 are exact well past MAX_BITS
            prod = self.to_dense().astype(np.float64) @ other.to_dense().astype(np.float64)
            return BitMatrix.from_dense(prod.astype(np.int64) & 1)
        return NotImplemented

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} + {other.shape}")
        return BitMatrix(self.words ^ other.words, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix(rows={self.rows}, cols={self.cols}, nnz={self.nnz()})"

    @staticmethod
    def hstack(blocks: list["BitMatrix"]) -> "BitMatrix":
        return BitMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))

    @staticmethod
    def vstack(blocks: list["BitMatrix"]) -> "BitMatrix":
        cols = {b.cols for b in blocks}
        if len(cols) != 1:
            raise ValueError(f"column counts differ: {sorted(cols)}")
        return BitMatrix(np.vstack([b.words for b in blocks]), cols.pop())


class BitVector:
    """Immutable packed vector over GF(2)."""

    __slots__ = ("words", "len")

    def __init__(self, words: np.ndarray, length: int):
        words = np.ascontiguousarray(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != _nwords(length):
            raise ValueError("word array does not match vector length")
        words.setflags(write=False)
        self.words = words
        self.len = length

    @classmethod
    def from_array(cls, a) -> "BitVector":
        a = np.asarray(a).reshape(-1)
        return cls(_pack(a[None, :] & 1)[0], a.shape[0])

    @classmethod
    def from_indices(cls, idx, length: int) -> "BitVector":
        a = np.zeros(length, dtype=np.uint8)
        a[np.asarray(idx, dtype=np.intp)] = 1
        return cls.from_array(a)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros(_nwords(length), dtype=np.uint64), length)

    def to_array(self) -> np.ndarray:
        return _unpack(self.words[None, :], self.len)[0]

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.to_array())

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __len__(self) -> int:
        return self.len

    def __add__(self, other: "BitVector") -> "BitVector":
        if self.len != other.len:
            raise ValueError(f"length mismatch: {self.len} vs {other.len}")
        return BitVector(self.words ^ other.words, self.len)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.len == other.len and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.len, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector(len={self.len}, support={self.indices().tolist()})"


def _as_matrix(m) -> BitMatrix:
    return m if isinstance(m, BitMatrix) else BitMatrix.from_dense(m)


def _as_vector(v) -> BitVector:
    return v if isinstance(v, BitVector) else BitVector.from_array(v)


def mat_vec(m, v) -> BitVector:
    """Return ``m @ v`` over GF(2)."""
    m, v = _as_matrix(m), _as_vector(v)
    if m.cols != v.len:
        raise ValueError(f"dimension mismatch: {m.shape} @ ({v.len},)")
    parity = np.bitwise_count(m.words & v.words[None, :]).sum(axis=1) & 1
    return BitVector.from_array(parity.astype(np.uint8))


@njit(cache=True)
def _rref_inplace(w, cols):
    rows = w.shape[0]
    nw = w.shape[1]
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        wi = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if w[i, wi] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                t = w[p, k]
                w[p, k] = w[r, k]
                w[r, k] = t
        for i in range(rows):
            if i != r and (w[i, wi] & bit):
                for k in range(wi, nw):
                    w[i, k] ^= w[r, k]
        pivots[r] = c
        r += 1
    return pivots[:r]


def rref(m) -> tuple[BitMatrix, list[int], int]:
    """Reduced row echelon form.

    Returns
    -------
    R : BitMatrix
        Same shape as ``m``; zero rows sit at the bottom.
    pivots : list of int
        Pivot column of each nonzero row of ``R``.
    rank : int
    """
    m = _as_matrix(m)
    w = m.words.copy()
    piv = _rref_inplace(w, m.cols)
    return BitMatrix(w, m.cols), [int(p) for p in piv], int(piv.shape[0])


def rank(m) -> int:
    m = _as_matrix(m)
    return int(_rref_inplace(m.words.copy(), m.cols).shape[0])


def solve(a, b) -> BitVector | None:
    """One solution of ``a @ x = b``, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    a, b = _as_matrix(a), _as_vector(b)
    if a.rows != b.len:
        raise ValueError(f"dimension mismatch: {a.shape} vs rhs length {b.len}")
    aug = np.hstack([a.to_dense(), b.to_array()[:, None]])
    r, piv, rk = rref(aug)
    if rk and piv[-1] == a.cols:
        return None
    dense = r.to_dense()
    x = np.zeros(a.cols, dtype=np.uint8)
    for i, c in enumerate(piv):
        x[c] = dense[i, a.cols]
    return BitVector.from_array(x)


def nullspace_basis(a) -> BitMatrix:
    """Rows span ``{x : a @ x = 0}``; there are ``cols - rank`` of them."""
    a = _as_matrix(a)
    r, piv, rk = rref(a)
    dense = r.to_dense()[:rk]
    free = np.setdiff1d(np.arange(a.cols), piv)
    basis = np.zeros((free.size, a.cols), dtype=np.uint8)
    for j, f in enumerate(free):
        basis[j, f] = 1
        basis[j, piv] = dense[:, f]
    return BitMatrix.from_dense(basis.reshape(free.size, a.cols))


def in_rowspace(m, v) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``m``."""
    m, v = _as_matrix(m), _as_vector(v)
    if m.cols != v.len:
        raise ValueError(f"dimension mismatch: {m.shape} vs vector length {v.len}")
    if v.weight() == 0:
        return True
    return rank(BitMatrix.vstack([m, BitMatrix(v.words[None, :], v.len)])) == rank(m)


def kron(a, b) -> BitMatrix:
    """Kronecker product over GF(2)."""
    a, b = _as_matrix(a), _as_matrix(b)
    _check_size(a.rows * b.rows, a.cols * b.cols)
    return BitMatrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


def circulant(shift_exponents, size: int) -> BitMatrix:
    """Sum of ``size x size`` cyclic shift matrices.

    The shift by ``e`` has a one at ``(i, (i + e) mod size)``, so shifts by
    ``a`` and ``b`` multiply to the shift by ``a + b``.
    """
    dense = np.zeros((size, size), dtype=np.uint8)
    rows = np.arange(size)
    for e in shift_exponents:
        if not 0 <= e < size:
            raise ValueError(f"shift exponent {e} outside [0, {size})")
        dense[rows, (rows + e) % size] ^= 1
    return BitMatrix.from_dense(dense)
