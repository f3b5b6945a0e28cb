"""CSS code construction, validation and file I/O.

Two text formats are supported:

* MacKay alist for classical check matrices (1-indexed).
* A CSS pair format (``.css``)::

      # optional comment lines
      css <n> <m_x> <m_z>
      <column indices of H_X row 0, 0-indexed, space separated>
      ...
      <column indices of H_Z row m_z-1>

  An empty row is written as a single ``-``.

Lifted-product base matrices use a ``.lift`` grid format::

      lift <L> <rows> <cols>
      27 - - - - 0 54
      ...

  where each entry is ``-`` (zero block) or comma-separated shift exponents.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import cached_property
from importlib import resources

import numpy as np

from . import gf2
from .gf2 import BitMatrix

__all__ = [
    "Side",
    "CssCode",
    "CodeValidationError",
    "CodeFormatError",
    "TannerGraph",
    "LiftedBase",
    "hgp",
    "lifted_product",
    "validate",
    "read_alist",
    "write_alist",
    "load_classical",
    "save_code",
    "load_code",
    "read_lifted_base",
    "write_lifted_base",
    "random_regular_seed",
    "random_sparse_matrix",
    "steane_code",
    "hamming_7_4",
    "BUNDLED_CODES",
    "bundled_code",
    "resolve_code",
]


class Side(enum.Enum):
    """Which error type a decoder corrects.

    ``X`` means X-type errors, detected by the Z-stabilizers ``H_Z``;
    ``Z`` means Z-type errors, detected by ``H_X``.
    """

    X = "X"
    Z = "Z"

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


class CodeValidationError(ValueError):
    """Raised when a check-matrix pair violates the CSS invariants."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations[:5]) + (" ..." if len(violations) > 5 else ""))


class CodeFormatError(ValueError):
    """Parse error in a code file; ``lineno`` is 1-based."""

    def __init__(self, path, lineno: int, msg: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {msg}")


@dataclass(frozen=True)
class TannerGraph:
    """Sparse bipartite adjacency of one check matrix.

    Edges are numbered in check-major order: the neighbours of check ``c``
    are ``edge_var[chk_ptr[c]:chk_ptr[c+1]]``. ``var_edges[var_ptr[v]:var_ptr[v+1]]``
    lists the edge ids touching variable ``v`` in ascending check order.
    """

    n_checks: int
    n_vars: int
    chk_ptr: np.ndarray
    edge_var: np.ndarray
    edge_chk: np.ndarray
    var_ptr: np.ndarray
    var_edges: np.ndarray

    @classmethod
    def from_matrix(cls, h) -> "TannerGraph":
        dense = h.to_dense() if isinstance(h, BitMatrix) else np.asarray(h, dtype=np.uint8)
        m, n = dense.shape
        chk, var = np.nonzero(dense)
        chk_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(chk, minlength=m), out=chk_ptr[1:])
        order = np.lexsort((chk, var))
        var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(var, minlength=n), out=var_ptr[1:])
        arrays = dict(
            chk_ptr=chk_ptr,
            edge_var=var.astype(np.int64),
            edge_chk=chk.astype(np.int64),
            var_ptr=var_ptr,
            var_edges=order.astype(np.int64),
        )
        for a in arrays.values():
            a.setflags(write=False)
        return cls(n_checks=m, n_vars=n, **arrays)

    @property
    def n_edges(self) -> int:
        return int(self.edge_var.shape[0])

    def check_neighbors(self, c: int) -> np.ndarray:
        return self.edge_var[self.chk_ptr[c] : self.chk_ptr[c + 1]]

    def var_neighbors(self, v: int) -> np.ndarray:
        return self.edge_chk[self.var_edges[self.var_ptr[v] : self.var_ptr[v + 1]]]


class CssCode:
    """A pair of commuting check matrices ``(H_X, H_Z)``.

    ``k`` is always computed from ranks. Construction raises
    :class:`CodeValidationError` unless ``check=False``.
    """

    def __init__(self, h_x, h_z, name: str = "", check: bool = True):
        self.h_x = h_x if isinstance(h_x, BitMatrix) else BitMatrix.from_dense(h_x)
        self.h_z = h_z if isinstance(h_z, BitMatrix) else BitMatrix.from_dense(h_z)
        self.name = name
        if check:
            violations = validate(self)
            if violations:
                raise CodeValidationError(violations)

    @property
    def n(self) -> int:
        return self.h_x.cols

    @cached_property
    def rank_x(self) -> int:
        return gf2.rank(self.h_x)

    @cached_property
    def rank_z(self) -> int:
        return gf2.rank(self.h_z)

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    def check_matrix(self, side) -> BitMatrix:
        """Matrix whose syndrome reveals errors of type ``side``."""
        return self.h_z if Side.parse(side) is Side.X else self.h_x

    def stabilizer_matrix(self, side) -> BitMatrix:
        """Same-type stabilizers: differences by these rows are harmless."""
        return self.h_x if Side.parse(side) is Side.X else self.h_z

    def tanner_graph(self, side) -> TannerGraph:
        side = Side.parse(side)
        cache = self.__dict__.setdefault("_graphs", {})
        if side not in cache:
            cache[side] = TannerGraph.from_matrix(self.check_matrix(side))
        return cache[side]

    def stabilizer_graph(self, side) -> TannerGraph:
        """Adjacency of the same-type stabilizer generators (for pruned peeling)."""
        side = Side.parse(side)
        return self.tanner_graph(Side.Z if side is Side.X else Side.X)

    def logical_detectors(self, side) -> np.ndarray:
        """Rows ``L`` (dense, k x n) such that a zero-syndrome residual ``r``
        is a stabilizer iff ``L @ r == 0``.

        They span ``ker(S)`` modulo ``rowspace(H)``, where ``H`` is the check
        matrix and ``S`` the same-type stabilizer matrix of ``side``.
        """
        side = Side.parse(side)
        cache = self.__dict__.setdefault("_logicals", {})
        if side not in cache:
            h = self.check_matrix(side)
            kernel = gf2.nullspace_basis(self.stabilizer_matrix(side))
            stacked = BitMatrix.vstack([h, kernel])
            _, piv, _ = gf2.rref(BitMatrix.from_dense(stacked.to_dense().T))
            # pivots past h.rows mark kernel vectors independent of rowspace(h)
            picks = [p - h.rows for p in piv if p >= h.rows]
            dense = kernel.to_dense()[picks] if picks else np.zeros((0, self.n), np.uint8)
            dense.setflags(write=False)
            cache[side] = dense
        return cache[side]

    def describe(self) -> dict:
        def degrees(m: BitMatrix):
            rw, cw = m.row_weights(), m.col_weights()
            return {
                "rows": m.rows,
                "rank": gf2.rank(m),
                "row_weight": [int(rw.min()) if rw.size else 0, int(rw.max()) if rw.size else 0],
                "col_weight": [int(cw.min()) if cw.size else 0, int(cw.max()) if cw.size else 0],
            }

        return {"name": self.name, "n": self.n, "k": self.k,
                "h_x": degrees(self.h_x), "h_z": degrees(self.h_z)}

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<CssCode{label} [[{self.n},{self.k}]]>"


def validate(code: CssCode, max_pairs: int = 20) -> list[str]:
    """List every violated CSS invariant; empty means valid."""
    out = []
    hx, hz = code.h_x, code.h_z
    if hx.cols != hz.cols:
        out.append(f"column mismatch: H_X has {hx.cols} columns, H_Z has {hz.cols}")
        return out
    overlap = (hx.to_dense().astype(np.float64) @ hz.to_dense().T.astype(np.float64)).astype(np.int64) & 1
    bad = np.argwhere(overlap)
    for i, j in bad[:max_pairs]:
        out.append(f"H_X row {i} and H_Z row {j} have odd overlap")
    if len(bad) > max_pairs:
        out.append(f"... {len(bad) - max_pairs} more non-commuting row pairs")
    if not len(bad):
        k = hx.cols - gf2.rank(hx) - gf2.rank(hz)
        if k < 0:
            out.append(f"negative logical count k={k}")
    return out


def hgp(h1, h2, name: str = "") -> CssCode:
    """Hypergraph product of two classical check matrices."""
    h1 = h1 if isinstance(h1, BitMatrix) else BitMatrix.from_dense(h1)
    h2 = h2 if isinstance(h2, BitMatrix) else BitMatrix.from_dense(h2)
    if 0 in h1.shape or 0 in h2.shape:
        raise ValueError("hypergraph product needs non-empty seed matrices")
    (m1, n1), (m2, n2) = h1.shape, h2.shape
    eye = BitMatrix.identity
    h_x = BitMatrix.hstack([gf2.kron(h1, eye(n2)), gf2.kron(eye(m1), h2.T)])
    h_z = BitMatrix.hstack([gf2.kron(eye(n1), h2), gf2.kron(h1.T, eye(m2))])
    return CssCode(h_x, h_z, name=name)


# --- lifted product -------------------------------------------------------


def _poly_mul(a: frozenset, b: frozenset, size: int) -> frozenset:
    out: set = set()
    for i in a:
        for j in b:
            out ^= {(i + j) % size}
    return frozenset(out)


@dataclass(frozen=True)
class LiftedBase:
    """Matrix over ``GF(2)[x]/(x^L - 1)``.

    ``entries[i][j]`` is the set of shift exponents of block ``(i, j)``;
    an empty set is the zero block.
    """

    entries: tuple
    lift: int

    def __post_init__(self):
        rows = tuple(tuple(frozenset(e) for e in row) for row in self.entries)
        if len({len(r) for r in rows}) > 1:
            raise ValueError("ragged base matrix")
        for row in rows:
            for e in row:
                for x in e:
                    if not 0 <= x < self.lift:
                        raise ValueError(f"shift exponent {x} outside [0, {self.lift})")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_binary(cls, a) -> "LiftedBase":
        a = np.asarray(a.to_dense() if isinstance(a, BitMatrix) else a)
        return cls(tuple(tuple({0} if x else set() for x in row) for row in a), 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def transpose(self) -> "LiftedBase":
        """Conjugate transpose: the binary expansion of the result is the
        transpose of the binary expansion of ``self``."""
        r, c = self.shape
        size = self.lift
        return LiftedBase(
            tuple(tuple(frozenset((-x) % size for x in self.entries[i][j]) for i in range(r))
                  for j in range(c)),
            size,
        )

    def kron(self, other: "LiftedBase") -> "LiftedBase":
        if self.lift != other.lift:
            raise ValueError(f"lift sizes differ: {self.lift} vs {other.lift}")
        (ra, ca), (rb, cb) = self.shape, other.shape
        return LiftedBase(
            tuple(
                tuple(
                    _poly_mul(self.entries[i1][j1], other.entries[i2][j2], self.lift)
                    for j1 in range(ca) for j2 in range(cb)
                )
                for i1 in range(ra) for i2 in range(rb)
            ),
            self.lift,
        )

    @classmethod
    def identity(cls, n: int, lift: int) -> "LiftedBase":
        return cls(tuple(tuple({0} if i == j else set() for j in range(n)) for i in range(n)), lift)

    def expand(self) -> BitMatrix:
        r, c = self.shape
        size = self.lift
        dense = np.zeros((r * size, c * size), dtype=np.uint8)
        for i in range(r):
            for j in range(c):
                if self.entries[i][j]:
                    dense[i * size : (i + 1) * size, j * size : (j + 1) * size] = gf2.circulant(
                        self.entries[i][j], size
                    ).to_dense()
        return BitMatrix.from_dense(dense)

    def collapse(self) -> BitMatrix:
        """0/1 protograph: a one wherever the block is non-zero."""
        return BitMatrix.from_dense(
            np.array([[1 if e else 0 for e in row] for row in self.entries], dtype=np.uint8)
        )


def lifted_product(a: LiftedBase, b: LiftedBase, name: str = "") -> CssCode:
    """Lifted product code; reduces to :func:`hgp` when ``L == 1``."""
    if a.lift != b.lift:
        raise ValueError(f"lift sizes differ: {a.lift} vs {b.lift}")
    (m1, n1), (m2, n2) = a.shape, b.shape
    size = a.lift
    eye = LiftedBase.identity
    h_x = BitMatrix.hstack([a.kron(eye(n2, size)).expand(), eye(m1, size).kron(b.transpose()).expand()])
    h_z = BitMatrix.hstack([eye(n1, size).kron(b).expand(), a.transpose().kron(eye(m2, size)).expand()])
    return CssCode(h_x, h_z, name=name)


# --- file formats -------------------------------------------------------------


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def _ints(path, lineno, line):
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise CodeFormatError(path, lineno, f"expected integers, got {line!r}") from None


def read_alist(path) -> BitMatrix:
    """Read a MacKay alist file; degree lists are cross-checked."""
    lines = list(_data_lines(path))
    if len(lines) < 4:
        raise CodeFormatError(path, lines[-1][0] if lines else 1, "truncated alist header")
    it = iter(lines)

    def take():
        try:
            lineno, line = next(it)
        except StopIteration:
            raise CodeFormatError(path, lines[-1][0], "unexpected end of file") from None
        return lineno, _ints(path, lineno, line)

    lineno, head = take()
    if len(head) != 2:
        raise CodeFormatError(path, lineno, "first line must be 'n m'")
    n, m = head
    take()  # max degrees, recomputed below
    lineno, col_deg = take()
    if len(col_deg) != n:
        raise CodeFormatError(path, lineno, f"expected {n} column degrees")
    lineno, row_deg = take()
    if len(row_deg) != m:
        raise CodeFormatError(path, lineno, f"expected {m} row degrees")
    dense = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        lineno, idx = take()
        idx = [i for i in idx if i != 0]
        if len(idx) != col_deg[j]:
            raise CodeFormatError(path, lineno, f"column {j + 1}: degree {len(idx)} != {col_deg[j]}")
        for i in idx:
            if not 1 <= i <= m:
                raise CodeFormatError(path, lineno, f"row index {i} out of range")
            dense[i - 1, j] = 1
    for i in range(m):
        lineno, idx = take()
        idx = [j for j in idx if j != 0]
        if len(idx) != row_deg[i]:
            raise CodeFormatError(path, lineno, f"row {i + 1}: degree {len(idx)} != {row_deg[i]}")
        if sorted(idx) != sorted(int(j) + 1 for j in np.flatnonzero(dense[i])):
            raise CodeFormatError(path, lineno, f"row {i + 1} disagrees with column lists")
    return BitMatrix.from_dense(dense)


def write_alist(h, path) -> None:
    dense = h.to_dense() if isinstance(h, BitMatrix) else np.asarray(h, dtype=np.uint8)
    m, n = dense.shape
    cols = [np.flatnonzero(dense[:, j]) + 1 for j in range(n)]
    rows = [np.flatnonzero(dense[i]) + 1 for i in range(m)]
    cmax = max((len(c) for c in cols), default=0)
    rmax = max((len(r) for r in rows), default=0)
    with open(path, "w") as fh:
        fh.write(f"{n} {m}\n{cmax} {rmax}\n")
        fh.write(" ".join(str(len(c)) for c in cols) + "\n")
        fh.write(" ".join(str(len(r)) for r in rows) + "\n")
        for c in cols:
            fh.write(" ".join(map(str, list(c) + [0] * (cmax - len(c)))) + "\n")
        for r in rows:
            fh.write(" ".join(map(str, list(r) + [0] * (rmax - len(r)))) + "\n")


load_classical = read_alist


def save_code(code: CssCode, path, comment: str = "") -> None:
    with open(path, "w") as fh:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
        fh.write(f"css {code.n} {code.h_x.rows} {code.h_z.rows}\n")
        for m in (code.h_x, code.h_z):
            for supp in m.row_supports():
                fh.write((" ".join(map(str, supp)) or "-") + "\n")


def load_code(path, format: str | None = None, name: str | None = None) -> CssCode:
    """Load a CSS code from a ``.css`` file.

    A classical ``.alist`` seed is accepted too and yields its hypergraph
    product with itself.
    """
    fmt = format or os.path.splitext(str(path))[1].lstrip(".") or "css"
    label = name or os.path.splitext(os.path.basename(str(path)))[0]
    if fmt == "alist":
        seed = read_alist(path)
        return hgp(seed, seed, name=label)
    if fmt != "css":
        raise ValueError(f"unknown code format {fmt!r}")
    lines = list(_data_lines(path))
    if not lines:
        raise CodeFormatError(path, 1, "empty file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "css":
        raise CodeFormatError(path, lineno, "header must be 'css <n> <m_x> <m_z>'")
    n, mx, mz = _ints(path, lineno, " ".join(parts[1:]))
    body = lines[1:]
    if len(body) != mx + mz:
        where = body[-1][0] if body else lineno
        raise CodeFormatError(path, where, f"expected {mx + mz} rows, found {len(body)}")
    dense = np.zeros((mx + mz, n), dtype=np.uint8)
    for r, (ln, line) in enumerate(body):
        if line == "-":
            continue
        for j in _ints(path, ln, line):
            if not 0 <= j < n:
                raise CodeFormatError(path, ln, f"column index {j} out of range [0, {n})")
            dense[r, j] = 1
    return CssCode(dense[:mx], dense[mx:], name=label)


def read_lifted_base(path) -> LiftedBase:
    lines = list(_data_lines(path))
    if not lines:
        raise CodeFormatError(path, 1, "empty file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "lift":
        raise CodeFormatError(path, lineno, "header must be 'lift <L> <rows> <cols>'")
    size, rows, cols = _ints(path, lineno, " ".join(parts[1:]))
    if len(lines) - 1 != rows:
        raise CodeFormatError(path, lines[-1][0], f"expected {rows} rows")
    grid = []
    for ln, line in lines[1:]:
        toks = line.split()
        if len(toks) != cols:
            raise CodeFormatError(path, ln, f"expected {cols} entries, found {len(toks)}")
        row = []
        for t in toks:
            if t == "-":
                row.append(set())
            else:
                try:
                    row.append({int(x) for x in t.split(",")})
                except ValueError:
                    raise CodeFormatError(path, ln, f"bad entry {t!r}") from None
        grid.append(row)
    try:
        return LiftedBase(tuple(map(tuple, grid)), size)
    except ValueError as exc:
        raise CodeFormatError(path, lineno, str(exc)) from None


def write_lifted_base(base: LiftedBase, path, comment: str = "") -> None:
    r, c = base.shape
    with open(path, "w") as fh:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
        fh.write(f"lift {base.lift} {r} {c}\n")
        for row in base.entries:
            fh.write(" ".join(",".join(map(str, sorted(e))) if e else "-" for e in row) + "\n")


# --- generators and small reference codes ------------------------------------------


def _has_4cycle(dense: np.ndarray) -> bool:
    overlap = dense.astype(np.int64) @ dense.T.astype(np.int64)
    np.fill_diagonal(overlap, 0)
    return bool((overlap > 1).any())


def random_regular_seed(n: int, m: int, col_weight: int = 3, row_weight: int = 4,
                        rng=None, girth6: bool = True, full_rank: bool = True,
                        max_tries: int = 10_000) -> BitMatrix:
    """Random (col_weight, row_weight)-regular ``m x n`` check matrix.

    Edges are placed variable by variable, each time choosing uniformly among
    checks with spare capacity that create neither a double edge nor (with
    ``girth6``) a 4-cycle. Dead ends and rank-deficient draws restart.
    """
    if n * col_weight != m * row_weight:
        raise ValueError("n * col_weight must equal m * row_weight")
    rng = np.random.default_rng(rng)
    for _ in range(max_tries):
        dense = np.zeros((m, n), dtype=np.uint8)
        spare = np.full(m, row_weight)
        ok = True
        for v in rng.permutation(n):
            for _ in range(col_weight):
                cand = spare > 0
                cand &= dense[:, v] == 0
                if girth6:
                    mine = np.flatnonzero(dense[:, v])
                    if mine.size:
                        peers = np.flatnonzero(dense[mine].any(axis=0))
                        cand &= ~dense[:, peers].any(axis=1)
                choices = np.flatnonzero(cand)
                if not choices.size:
                    ok = False
                    break
                c = rng.choice(choices)
                dense[c, v] = 1
                spare[c] -= 1
            if not ok:
                break
        if not ok:
            continue
        if girth6 and _has_4cycle(dense):
            continue
        if full_rank and gf2.rank(dense) != m:
            continue
        return BitMatrix.from_dense(dense)
    raise RuntimeError(f"no ({col_weight},{row_weight})-regular {m}x{n} matrix found")


def random_sparse_matrix(m: int, n: int, density: float = 0.3, rng=None) -> BitMatrix:
    """Bernoulli(density) matrix with every row and column non-empty."""
    rng = np.random.default_rng(rng)
    dense = (rng.random((m, n)) < density).astype(np.uint8)
    for i in np.flatnonzero(dense.sum(axis=1) == 0):
        dense[i, rng.integers(n)] = 1
    for j in np.flatnonzero(dense.sum(axis=0) == 0):
        dense[rng.integers(m), j] = 1
    return BitMatrix.from_dense(dense)


def hamming_7_4() -> BitMatrix:
    """Check matrix of the [7,4] Hamming code; column j is j+1 in binary."""
    cols = np.arange(1, 8)
    return BitMatrix.from_dense(np.array([(cols >> b) & 1 for b in range(3)], dtype=np.uint8))


def steane_code() -> CssCode:
    h = hamming_7_4()
    return CssCode(h, h, name="steane")


# --- bundled codes -------------------------------------------------------


BUNDLED_CODES = {
    "hgp1600": "hgp1600.css",
    "hgp2025": "hgp2025.css",
    "b1": "b1.css",
}

_ALIASES = {
    "[[1600,64]]": "hgp1600",
    "[[2025,81]]": "hgp2025",
    "[[882,24]]": "b1",
    "steane": "steane",
}


def bundled_path(filename: str):
    return resources.files("bpgd_erasure").joinpath("data", filename)


def bundled_code(name: str) -> CssCode:
    key = _ALIASES.get(name.replace(" ", ""), name).lower()
    if key == "steane":
        return steane_code()
    if key not in BUNDLED_CODES:
        raise KeyError(f"unknown bundled code {name!r}; choose from {sorted(BUNDLED_CODES)}")
    with resources.as_file(bundled_path(BUNDLED_CODES[key])) as p:
        return load_code(p, name=key)


def resolve_code(ref) -> CssCode:
    """Accept a CssCode, a bundled name, or a path to a code file."""
    if isinstance(ref, CssCode):
        return ref
    ref = str(ref)
    if os.path.exists(ref):
        return load_code(ref)
    return bundled_code(ref)

