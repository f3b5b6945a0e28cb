"""Peeling, pruned peeling, maximum-likelihood erasure decoding, and the
four-way outcome classification shared by every decoder."""

from __future__ import annotations

import enum
from itertools import combinations

import numpy as np

from . import _kernels, gf2
from .bp import DecodeResult, Status
from .codes import CssCode, Side
from .gf2 import BitMatrix

__all__ = [
    "Outcome",
    "classify",
    "peel_decode",
    "pruned_peel_decode",
    "find_covered_stabilizer",
    "ml_decodable",
    "ml_erasure_outcome",
]


class Outcome(enum.Enum):
    EXACT_MATCH = "exact"
    DEGENERATE_MATCH = "degenerate"
    LOGICAL_ERROR = "logical"
    DECODER_FAILURE = "nonconv"

    @property
    def is_failure(self) -> bool:
        return self in (Outcome.LOGICAL_ERROR, Outcome.DECODER_FAILURE)


def _syndrome(code: CssCode, side, v: np.ndarray) -> np.ndarray:
    g = code.tanner_graph(side)
    sums = np.bincount(g.edge_chk, weights=v[g.edge_var], minlength=g.n_checks)
    return (sums.astype(np.int64) & 1).astype(np.uint8)


def classify(error, estimate, code: CssCode, side) -> Outcome:
    """Compare a syndrome-matching estimate with the true error.

    Raises ValueError if the two vectors have different syndromes; a decoder
    that did not converge should be reported as ``DECODER_FAILURE`` by the
    caller instead.
    """
    side = Side.parse(side)
    error = np.asarray(error, dtype=np.uint8)
    estimate = np.asarray(estimate, dtype=np.uint8)
    if error.shape != (code.n,) or estimate.shape != (code.n,):
        raise ValueError("error and estimate must both have length n")
    residual = error ^ estimate
    if not residual.any():
        return Outcome.EXACT_MATCH
    if _syndrome(code, side, residual).any():
        raise ValueError("estimate does not reproduce the syndrome of the error")
    detectors = code.logical_detectors(side)
    if (detectors.astype(np.int64) @ residual.astype(np.int64) & 1).any():
        return Outcome.LOGICAL_ERROR
    return Outcome.DEGENERATE_MATCH


# --- peeling ---------------------------------------------------------------


def _peel(graph, syndrome: np.ndarray, value: np.ndarray) -> tuple[int, bool]:
    left, ok = _kernels.peel(graph.chk_ptr, graph.edge_var, graph.var_ptr, graph.var_edges,
                             graph.edge_chk, syndrome, value)
    return int(left), bool(ok)


def _result(code, side, syndrome, value, rounds) -> DecodeResult:
    if (value < 0).any():
        return DecodeResult(Status.NONCONVERGENCE, np.maximum(value, 0).astype(np.uint8), rounds)
    est = value.astype(np.uint8)
    if not np.array_equal(_syndrome(code, side, est), syndrome):
        return DecodeResult(Status.NONCONVERGENCE, est, rounds)
    return DecodeResult(Status.CONVERGED, est, rounds)


def peel_decode(code: CssCode, instance, side=None) -> DecodeResult:
    """Solve checks with a single unknown bit until none is left.

    Converges iff every erased bit gets determined; otherwise the residual
    erasure is a stopping set. The estimate of a failed decode has the
    undetermined bits set to 0.
    """
    return pruned_peel_decode(code, instance, 0, side)


def find_covered_stabilizer(stab_graph, unknown: np.ndarray, depth: int,
                            keys: np.ndarray | None = None):
    """Smallest combination of at most ``depth`` stabilizer generators whose
    sum is non-zero and supported inside ``unknown``.

    Combinations are searched by size, then lexicographically by row index.
    Returns ``(rows, support)`` or None.
    """
    ptr, ev = stab_graph.chk_ptr, stab_graph.edge_var
    deg = np.diff(ptr)
    inside = np.bincount(stab_graph.edge_chk, weights=unknown[ev].astype(np.float64),
                         minlength=stab_graph.n_checks).astype(np.int64)
    if depth >= 1:
        hits = np.flatnonzero((inside == deg) & (deg > 0))
        if hits.size:
            r = int(hits[0])
            return (r,), np.sort(ev[ptr[r] : ptr[r + 1]])
    if depth >= 2:
        # two rows cancel outside the erasure iff their outside supports agree
        if keys is None:
            keys = np.random.default_rng(0).integers(0, 2**63, size=stab_graph.n_vars,
                                                     dtype=np.uint64)
        hashes = np.empty(stab_graph.n_checks, dtype=np.uint64)
        _kernels.row_outside_hash(ptr, ev, unknown.astype(np.bool_), keys, hashes)
        order = np.lexsort((np.arange(stab_graph.n_checks), hashes))
        best = None
        start = 0
        while start < order.size:
            stop = start + 1
            while stop < order.size and hashes[order[stop]] == hashes[order[start]]:
                stop += 1
            group = order[start:stop]
            for i, j in combinations(group.tolist(), 2):
                if best is not None and (i, j) >= best[0]:
                    break
                si = set(ev[ptr[i] : ptr[i + 1]].tolist())
                sj = set(ev[ptr[j] : ptr[j + 1]].tolist())
                supp = si ^ sj
                if supp and all(unknown[v] for v in supp):
                    best = ((i, j), np.array(sorted(supp), dtype=np.int64))
                    break
            start = stop
        if best is not None:
            return best
    for size in range(3, depth + 1):
        rows = [set(ev[ptr[r] : ptr[r + 1]].tolist()) for r in range(stab_graph.n_checks)]
        for combo in combinations(range(stab_graph.n_checks), size):
            supp: set = set()
            for r in combo:
                supp ^= rows[r]
            if supp and all(unknown[v] for v in supp):
                return combo, np.array(sorted(supp), dtype=np.int64)
    return None


def pruned_peel_decode(code: CssCode, instance, depth: int = 1, side=None) -> DecodeResult:
    """Peeling that breaks stopping sets with covered stabilizers.

    Whenever peeling stalls, look for a sum of at most ``depth`` same-type
    stabilizer generators lying entirely on still-unknown bits; fix its
    lowest-index bit to 0 and resume. Once a bit is fixed the combination no
    longer lies on unknown bits, so it cannot be used twice. ``depth=0`` is
    plain peeling. ``rounds_used`` counts peeling passes.
    """
    side = Side.parse(side if side is not None else instance.side)
    graph = code.tanner_graph(side)
    syndrome = np.ascontiguousarray(instance.syndrome, dtype=np.uint8)
    value = np.where(np.asarray(instance.mask, dtype=bool), -1, 0).astype(np.int64)
    stab_graph = code.stabilizer_graph(side) if depth > 0 else None
    keys = None
    rounds = 0
    while True:
        rounds += 1
        left, _ = _peel(graph, syndrome, value)
        if left == 0 or depth <= 0:
            break
        if keys is None:
            keys = np.random.default_rng(0).integers(0, 2**63, size=code.n, dtype=np.uint64)
        found = find_covered_stabilizer(stab_graph, value < 0, depth, keys)
        if found is None:
            break
        value[found[1][0]] = 0
    return _result(code, side, syndrome, value, rounds)


# --- maximum likelihood -------------------------------------------------------


def ml_decodable(code: CssCode, side, mask) -> bool:
    """True iff no logical operator of this side is supported on ``mask``.

    Equivalently, every vector in the kernel of the check matrix restricted
    to the erased columns is a stabilizer.
    """
    side = Side.parse(side)
    erased = np.flatnonzero(np.asarray(mask))
    if erased.size == 0:
        return True
    h = code.check_matrix(side).to_dense()[:, erased]
    det = code.logical_detectors(side)[:, erased]
    if det.shape[0] == 0:
        return True
    return gf2.rank(h) == gf2.rank(np.vstack([h, det]))


def ml_erasure_outcome(code: CssCode, side, instance, ties: str = "fail",
                       rng=None) -> tuple[Outcome, np.ndarray | None]:
    """Optimal erasure decoding.

    When the erasure supports no logical operator, any syndrome-consistent
    pattern on the erasure is in the right coset; the one returned by
    :func:`gf2.solve` is classified. Otherwise all cosets are equally likely:
    with ``ties="fail"`` this is a ``LOGICAL_ERROR``, with ``ties="guess"``
    a uniformly random consistent pattern is classified instead.

    ``side`` may be None to use the instance's side. Returns
    ``(outcome, estimate)``; the estimate is None for a counted tie.
    """
    if ties not in ("fail", "guess"):
        raise ValueError("ties must be 'fail' or 'guess'")
    side = Side.parse(side if side is not None else instance.side)
    n = code.n
    erased = np.flatnonzero(instance.mask)
    if erased.size == 0:
        est = np.zeros(n, np.uint8)
        return classify(instance.error, est, code, side), est
    h = BitMatrix.from_dense(code.check_matrix(side).to_dense()[:, erased])
    x = gf2.solve(h, instance.syndrome)
    if x is None:
        raise ValueError("syndrome is inconsistent with the erasure")
    est = np.zeros(n, np.uint8)
    est[erased] = x.to_array()
    if not ml_decodable(code, side, instance.mask):
        if ties == "fail":
            return Outcome.LOGICAL_ERROR, None
        kernel = gf2.nullspace_basis(h).to_dense()
        coeffs = np.random.default_rng(rng).integers(0, 2, size=kernel.shape[0])
        est[erased] ^= (coeffs @ kernel.astype(np.int64) & 1).astype(np.uint8)
    return classify(instance.error, est, code, side), est
