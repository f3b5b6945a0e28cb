"""Quantum erasure channel, one CSS side at a time.

Every qubit is erased independently with probability ``p``; an erased qubit
suffers a uniformly random Pauli, which for a CSS code means an independent
fair coin for the X part and for the Z part. Only one side is simulated per
instance.

Randomness comes from per-trial Philox streams keyed by
``(master_seed, trial_index)``, so an instance does not depend on how trials
are spread over workers. The mask uses one uniform per qubit (``u < p``) and
the error one fair coin per qubit for each of the X and Z parts. This couples
instances across erasure rates: the mask at a smaller ``p`` is a subset of the
mask at a larger ``p`` for the same trial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CssCode, Side

__all__ = [
    "Side",
    "ErasureInstance",
    "trial_rng",
    "sample_instance",
    "syndrome_of",
    "dump_instances",
    "load_instances",
]


@dataclass(frozen=True)
class ErasureInstance:
    """One sampled trial.

    ``mask``, ``error`` and ``syndrome`` are uint8 0/1 arrays; ``error`` is
    zero outside ``mask`` and ``syndrome`` is the side's check matrix times
    ``error``.
    """

    mask: np.ndarray
    error: np.ndarray
    syndrome: np.ndarray
    erasure_rate: float
    side: Side = Side.X
    seed: tuple[int, int] | None = None

    def __post_init__(self):
        for name in ("mask", "error", "syndrome"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.uint8)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if np.any(self.error & (1 - self.mask)):
            raise ValueError("error has support outside the erasure mask")

    @property
    def n_erased(self) -> int:
        return int(self.mask.sum())


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent Philox stream for one trial."""
    ss = np.random.SeedSequence([int(master_seed), int(trial_index)])
    return np.random.Generator(np.random.Philox(ss))


def syndrome_of(code: CssCode, side, error) -> np.ndarray:
    """Syndrome of ``error`` under the side's check matrix (``H_Z`` for X errors)."""
    h = code.check_matrix(side)
    error = np.asarray(error, dtype=np.uint8).reshape(-1)
    if error.shape[0] != h.cols:
        raise ValueError(f"error has length {error.shape[0]}, code has n={h.cols}")
    return _graph_syndrome(code.tanner_graph(side), error)


def _graph_syndrome(graph, error: np.ndarray) -> np.ndarray:
    sums = np.bincount(graph.edge_chk, weights=error[graph.edge_var], minlength=graph.n_checks)
    return (sums.astype(np.int64) & 1).astype(np.uint8)


def sample_instance(code: CssCode, side, p: float, rng=None, *,
                    seed: tuple[int, int] | None = None) -> ErasureInstance:
    """Draw one erasure instance.

    ``rng`` may be a Generator, an int seed, or None. Passing
    ``seed=(master_seed, trial_index)`` instead uses :func:`trial_rng`.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"erasure rate {p} outside [0, 1]")
    side = Side.parse(side)
    if seed is not None:
        rng = trial_rng(*seed)
    elif not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    n = code.n
    mask = (rng.random(n) < p).astype(np.uint8)
    # both parts are always drawn so the X and Z instances of one trial
    # share the mask and carry independent coins
    coins = rng.integers(0, 2, size=(2, n), dtype=np.uint8)
    error = coins[0 if side is Side.X else 1] & mask
    syndrome = _graph_syndrome(code.tanner_graph(side), error)
    return ErasureInstance(mask, error, syndrome, float(p), side, seed)


def _fmt(idx) -> str:
    idx = list(map(int, idx))
    return ",".join(map(str, idx)) if idx else "-"


def _parse(tok: str) -> list[int]:
    return [] if tok == "-" else [int(t) for t in tok.split(",")]


def dump_instances(instances, path, code: CssCode | None = None) -> None:
    """Write one tab-separated line per instance:
    ``master:trial  p  side  mask  error  syndrome`` (index lists)."""
    with open(path, "w") as fh:
        if code is not None:
            fh.write(f"# code={code.name} n={code.n}\n")
        for inst in instances:
            seed = "-" if inst.seed is None else f"{inst.seed[0]}:{inst.seed[1]}"
            fh.write("\t".join([
                seed, repr(inst.erasure_rate), inst.side.value,
                _fmt(np.flatnonzero(inst.mask)), _fmt(np.flatnonzero(inst.error)),
                _fmt(np.flatnonzero(inst.syndrome)),
            ]) + "\n")


def load_instances(path, code: CssCode) -> list[ErasureInstance]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 tab-separated fields")
            seed_tok, p_tok, side_tok, m_tok, e_tok, s_tok = parts
            side = Side.parse(side_tok)
            n = code.n
            mask = np.zeros(n, np.uint8)
            mask[_parse(m_tok)] = 1
            error = np.zeros(n, np.uint8)
            error[_parse(e_tok)] = 1
            syn = np.zeros(code.check_matrix(side).rows, np.uint8)
            syn[_parse(s_tok)] = 1
            seed = None if seed_tok == "-" else tuple(int(x) for x in seed_tok.split(":"))
            inst = ErasureInstance(mask, error, syn, float(p_tok), side, seed)
            if not np.array_equal(syndrome_of(code, side, error), syn):
                raise ValueError(f"{path}:{lineno}: syndrome does not match error")
            out.append(inst)
    return out
