"""Syndrome belief propagation and BP with guided decimation (BPGD) for erasures.

Messages are log-likelihood ratios, positive meaning "no error". Erased
bits start at ``llr_min`` and the rest at ``c_opt * llr_max``. Every
message is clamped to ``[-llr_max, llr_max]`` after each update. One
iteration updates all checks, then all variables.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .codes import CssCode, Side, TannerGraph

__all__ = [
    "BpConfig",
    "BpState",
    "Status",
    "DecodeResult",
    "channel_llr",
    "init_priors",
    "check_update",
    "var_update",
    "bp_run",
    "bp_decode",
    "bpgd_decode",
]


@dataclass(frozen=True)
class BpConfig:
    """Parameters shared by BP and BPGD.

    Attributes
    ----------
    iterations : int
        BP iterations per round (``T``).
    llr_max : float
        Saturation magnitude, also the decimated prior magnitude.
    llr_min : float
        Prior of an erased bit.
    c_opt : float
        Scale applied to the prior of non-erased bits.
    gamma : float
        Damping factor; 1 disables damping.
    tie_break : {"index", "random"}
        How equal reliabilities are resolved during decimation.
    """

    iterations: int = 32
    llr_max: float = 25.0
    llr_min: float = 0.0
    c_opt: float = 1.0
    gamma: float = 1.0
    tie_break: str = "index"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.llr_max > 0:
            raise ValueError("llr_max must be positive")
        if not 0 <= self.llr_min < self.llr_max:
            raise ValueError("need 0 <= llr_min < llr_max")
        if not 0 < self.c_opt <= 1:
            raise ValueError("c_opt must lie in (0, 1]")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.tie_break not in ("index", "random"):
            raise ValueError("tie_break must be 'index' or 'random'")

    def replace(self, **changes) -> "BpConfig":
        return BpConfig(**{**self.__dict__, **changes})


class Status(enum.Enum):
    CONVERGED = "converged"
    NONCONVERGENCE = "nonconvergence"


@dataclass(frozen=True)
class DecodeResult:
    """Decoder output.

    ``estimate`` is only meaningful when converged. ``bp_iterations_total``
    counts ``T`` per round; rounds that start at an exact fixed point are
    not re-simulated but still counted.
    """

    status: Status
    estimate: np.ndarray
    rounds_used: int = 1
    bp_iterations_total: int = 0
    decimated: np.ndarray | None = field(default=None, compare=False, repr=False)
    trace_beliefs: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def same_as(self, other: "DecodeResult") -> bool:
        return (self.status is other.status
                and self.rounds_used == other.rounds_used
                and self.bp_iterations_total == other.bp_iterations_total
                and np.array_equal(self.estimate, other.estimate))


def channel_llr(p: float, llr_max: float = 25.0) -> float:
    """``ln((1 - p) / p)``; saturates to ``+-llr_max`` outside (0, 1)."""
    if p <= 0.0 or p >= 1.0:
        warnings.warn(f"channel_llr: p={p} outside (0, 1), saturating", RuntimeWarning)
        return llr_max if p <= 0.0 else -llr_max
    return math.log((1.0 - p) / p)


def init_priors(mask, cfg: BpConfig = BpConfig()) -> np.ndarray:
    mask = np.asarray(mask).astype(bool)
    return np.where(mask, cfg.llr_min, cfg.c_opt * cfg.llr_max).astype(np.float64)


@dataclass
class BpState:
    """Mutable per-decode message state, indexed by edge id."""

    graph: TannerGraph
    prior: np.ndarray
    v2c: np.ndarray
    c2v: np.ndarray
    beliefs: np.ndarray
    iteration: int = 0

    @classmethod
    def start(cls, graph: TannerGraph, prior) -> "BpState":
        prior = np.array(prior, dtype=np.float64)
        if prior.shape != (graph.n_vars,):
            raise ValueError(f"prior has shape {prior.shape}, expected ({graph.n_vars},)")
        return cls(graph, prior, prior[graph.edge_var].copy(),
                   np.zeros(graph.n_edges), prior.copy())


def check_update(state: BpState, syndrome, cfg: BpConfig = BpConfig()) -> np.ndarray:
    """Refresh check-to-variable messages in place and return them."""
    syndrome = np.ascontiguousarray(syndrome, dtype=np.uint8)
    _kernels.check_pass(state.graph.chk_ptr, state.v2c, state.c2v, syndrome, float(cfg.llr_max))
    return state.c2v


def var_update(state: BpState, cfg: BpConfig = BpConfig()) -> bool:
    """Refresh variable-to-check messages and beliefs in place.

    Returns True if any message changed.
    """
    g = state.graph
    changed = _kernels.var_pass(g.var_ptr, g.var_edges, state.c2v, state.v2c, state.prior,
                                state.beliefs, float(cfg.gamma), float(cfg.llr_max))
    state.iteration += 1
    return bool(changed)


def bp_run(graph: TannerGraph, priors, syndrome, cfg: BpConfig = BpConfig(),
           state: BpState | None = None):
    """Run ``cfg.iterations`` flooding iterations.

    Returns ``(beliefs, xhat, matched)``; ``xhat[i] = 1`` iff the belief is
    negative and ``matched`` tells whether ``xhat`` reproduces ``syndrome``.
    Pass ``state`` to continue from earlier messages.
    """
    if state is None:
        state = BpState.start(graph, priors)
    syndrome = np.ascontiguousarray(syndrome, dtype=np.uint8)
    _kernels.run_iterations(graph.chk_ptr, graph.edge_var, graph.edge_chk, graph.var_ptr,
                            graph.var_edges, syndrome, state.prior, state.v2c, state.c2v,
                            state.beliefs, np.ones(graph.n_checks, np.bool_),
                            np.ones(graph.n_vars, np.bool_), int(cfg.iterations),
                            float(cfg.gamma), float(cfg.llr_max))
    state.iteration += cfg.iterations
    xhat = np.empty(graph.n_vars, dtype=np.uint8)
    matched = _kernels.hard_decision_matches(graph.chk_ptr, graph.edge_var, state.beliefs,
                                             syndrome, xhat)
    return state.beliefs.copy(), xhat, bool(matched)


def _graph_and_inputs(code_or_graph, instance, side):
    if isinstance(code_or_graph, CssCode):
        side = Side.parse(side if side is not None else instance.side)
        graph = code_or_graph.tanner_graph(side)
    else:
        graph = code_or_graph
    return graph, np.ascontiguousarray(instance.mask), np.ascontiguousarray(instance.syndrome)


def bp_decode(code_or_graph, instance, cfg: BpConfig = BpConfig(), side=None) -> DecodeResult:
    """Plain BP: one round of ``cfg.iterations`` iterations."""
    graph, mask, syndrome = _graph_and_inputs(code_or_graph, instance, side)
    _, xhat, matched = bp_run(graph, init_priors(mask, cfg), syndrome, cfg)
    status = Status.CONVERGED if matched else Status.NONCONVERGENCE
    return DecodeResult(status, xhat, 1, cfg.iterations)


def bpgd_decode(code_or_graph, instance, cfg: BpConfig = BpConfig(), side=None,
                rng=None, trace: bool = False) -> DecodeResult:
    """BPGD over erasures.

    Each round runs ``cfg.iterations`` BP iterations (messages persist across
    rounds), stops if the hard decision matches the syndrome, and otherwise
    fixes the not-yet-decimated variable with the largest ``|belief|`` to
    ``+llr_max`` (belief >= 0) or ``-llr_max``. At most ``n`` rounds.

    With ``trace=True`` the result carries ``trace_beliefs`` (rounds x n).
    """
    graph, mask, syndrome = _graph_and_inputs(code_or_graph, instance, side)
    n = graph.n_vars
    prior = init_priors(mask, cfg)
    if cfg.tie_break == "random":
        tie_key = np.random.default_rng(rng).permutation(n).astype(np.int64)
    else:
        tie_key = np.arange(n, dtype=np.int64)
    xhat = np.zeros(n, dtype=np.uint8)
    decimated = np.empty(n, dtype=np.int64)
    trace_arr = np.zeros((n if trace else 0, n))
    status, rounds, nominal, _ = _kernels.bpgd(
        graph.chk_ptr, graph.edge_var, graph.edge_chk, graph.var_ptr, graph.var_edges,
        syndrome, prior,
        int(cfg.iterations), float(cfg.gamma), float(cfg.llr_max), tie_key, n, xhat,
        decimated, trace_arr)
    converged = status == _kernels.CONVERGED
    return DecodeResult(
        Status.CONVERGED if converged else Status.NONCONVERGENCE,
        xhat, int(rounds), int(nominal), decimated[: int(rounds) - converged],
        trace_arr[: int(rounds)] if trace else None,
    )
