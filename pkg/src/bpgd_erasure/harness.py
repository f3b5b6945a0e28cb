"""Monte Carlo sweeps over erasure rates.

Trial ``i`` of every point uses the stream ``(seed, i)``, so decoders and
rates see paired instances and results do not depend on the worker count.
Trials are cut into fixed chunks, farmed out to a process pool, and merged
back in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from statistics import NormalDist

import numpy as np

from .bp import BpConfig, bp_decode, bpgd_decode
from .channel import sample_instance
from .codes import CssCode, Side, resolve_code
from .combinatorial import Outcome, classify, ml_erasure_outcome, pruned_peel_decode
from .params import BP_DECODERS, DECODERS, bp_config_for

__all__ = [
    "DecoderConfig",
    "SweepSpec",
    "PointStats",
    "SoundnessError",
    "run_trial",
    "run_trials",
    "run_sweep",
    "confidence_interval",
    "inverse_binomial_estimate",
    "emit",
    "read_results",
    "default_workers",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("rate", "trials", "exact", "degenerate", "logical", "nonconv",
               "failure_rate", "ci_low", "ci_high", "seconds")
OUTCOMES = (Outcome.EXACT_MATCH, Outcome.DEGENERATE_MATCH, Outcome.LOGICAL_ERROR,
            Outcome.DECODER_FAILURE)
_CODE = {o: i for i, o in enumerate(OUTCOMES)}
CHUNK = 256
WORKERS_ENV = "BPGD_WORKERS"


class SoundnessError(AssertionError):
    """A decoder reported convergence with an estimate that misses the syndrome."""


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder kind plus its knobs.

    ``gamma`` / ``c_opt`` left as None are looked up from the bundled tables
    for the decoders that use them. ``depth`` is the pruned-peeling search
    depth; ``ml_ties`` is ``"fail"`` or ``"guess"``.
    """

    kind: str = "bpgd"
    bp: BpConfig = BpConfig()
    gamma: float | None = None
    c_opt: float | None = None
    depth: int = 1
    ml_ties: str = "fail"

    def __post_init__(self):
        if self.kind not in DECODERS:
            raise ValueError(f"unknown decoder {self.kind!r}; choose from {DECODERS}")
        if self.kind == "pruned-peeling" and self.depth < 0:
            raise ValueError("prune depth must be >= 0")
        if self.ml_ties not in ("fail", "guess"):
            raise ValueError("ml_ties must be 'fail' or 'guess'")

    def resolve(self, code_name: str | None, p: float) -> "DecoderConfig":
        """Fix table-driven parameters for one erasure rate."""
        if self.kind not in BP_DECODERS:
            return self
        bp = bp_config_for(self.kind, code_name, p, self.bp, self.gamma, self.c_opt)
        return replace(self, bp=bp, gamma=bp.gamma, c_opt=bp.c_opt)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bp"] = asdict(self.bp)
        return d


@dataclass(frozen=True)
class SweepSpec:
    code: object
    side: str = "X"
    decoder: DecoderConfig = DecoderConfig()
    rates: tuple = ()
    trials: int = 1000
    min_failures: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(p) for p in self.rates))
        for p in self.rates:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"erasure rate {p} outside [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.min_failures is not None and self.min_failures < 1:
            raise ValueError("min_failures must be >= 1")
        if str(self.side).lower() != "both":
            Side.parse(self.side)

    def sides(self) -> list[Side]:
        if str(self.side).lower() == "both":
            return [Side.X, Side.Z]
        return [Side.parse(self.side)]

    def echo(self) -> dict:
        code = self.code.name if isinstance(self.code, CssCode) else str(self.code)
        return {
            "code": code,
            "side": str(self.side),
            "decoder": self.decoder.to_dict(),
            "rates": list(self.rates),
            "trials": self.trials,
            "min_failures": self.min_failures,
            "seed": self.seed,
        }


@dataclass
class PointStats:
    rate: float
    trials: int
    exact: int = 0
    degenerate: int = 0
    logical: int = 0
    nonconv: int = 0
    seconds: float | None = None
    side: str = "X"
    stopped_early: bool = False
    config: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return self.logical + self.nonconv

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return confidence_interval(self.failures, self.trials)

    @property
    def unbiased_rate(self) -> float | None:
        """Inverse-binomial estimate when the point stopped at its failure target."""
        if not self.stopped_early:
            return None
        return inverse_binomial_estimate(self.failures, self.trials)

    def counts(self) -> dict:
        return {"exact": self.exact, "degenerate": self.degenerate, "logical": self.logical,
                "nonconv": self.nonconv}


def confidence_interval(failures: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= failures <= trials:
        raise ValueError("need 0 <= failures <= trials")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    phat = failures / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == trials else min(1.0, centre + half)
    return lo, hi


def inverse_binomial_estimate(failures: int, trials: int) -> float:
    """Unbiased rate when sampling stopped at the ``failures``-th failure,
    which happened on trial ``trials``: ``(failures - 1) / (trials - 1)``."""
    if failures < 1 or trials < failures:
        raise ValueError("need 1 <= failures <= trials")
    if trials == 1:
        return 1.0
    return (failures - 1) / (trials - 1)


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ValueError(f"{WORKERS_ENV}={value!r} is not an integer") from None
    return 1


# --- single trials -----------------------------------------------------------------


def run_trial(code: CssCode, side, cfg: DecoderConfig, p: float, seed: int,
              trial: int) -> Outcome:
    """Sample trial ``trial`` and decode it with an already resolved config."""
    side = Side.parse(side)
    inst = sample_instance(code, side, p, seed=(seed, trial))
    if cfg.kind == "ml":
        return ml_erasure_outcome(code, side, inst, cfg.ml_ties, rng=(seed, trial))[0]
    if cfg.kind == "peeling":
        res = pruned_peel_decode(code, inst, 0, side)
    elif cfg.kind == "pruned-peeling":
        res = pruned_peel_decode(code, inst, cfg.depth, side)
    elif cfg.kind == "bp":
        res = bp_decode(code, inst, cfg.bp, side)
    else:
        res = bpgd_decode(code, inst, cfg.bp, side, rng=(seed, trial))
    if not res.converged:
        return Outcome.DECODER_FAILURE
    try:
        return classify(inst.error, res.estimate, code, side)
    except ValueError as exc:
        raise SoundnessError(f"trial {trial} at p={p}: converged estimate misses the "
                             f"syndrome ({cfg.kind})") from exc


def run_trials(code: CssCode, side, cfg: DecoderConfig, p: float, seed: int, start: int,
               stop: int) -> np.ndarray:
    """Outcome indices (into ``OUTCOMES``) for trials ``start..stop-1``."""
    out = np.empty(stop - start, dtype=np.uint8)
    for i, t in enumerate(range(start, stop)):
        out[i] = _CODE[run_trial(code, side, cfg, p, seed, t)]
    return out


_worker_code: CssCode | None = None


def _init_worker(code: CssCode) -> None:
    global _worker_code
    _worker_code = code


def _chunk_job(args) -> np.ndarray:
    side, cfg, p, seed, start, stop = args
    return run_trials(_worker_code, side, cfg, p, seed, start, stop)


# --- sweeps ------------------------------------------------------------------------


def _tally(outcomes: np.ndarray, p: float, side: Side, cfg: DecoderConfig, seconds: float,
           stopped: bool) -> PointStats:
    c = np.bincount(outcomes, minlength=4) if outcomes.size else np.zeros(4, np.int64)
    return PointStats(p, int(outcomes.size), int(c[0]), int(c[1]), int(c[2]), int(c[3]),
                      seconds, side.value, stopped, cfg.to_dict())


def _truncate(outcomes: np.ndarray, target: int | None) -> tuple[np.ndarray, bool]:
    if target is None:
        return outcomes, False
    fails = np.flatnonzero(outcomes >= _CODE[Outcome.LOGICAL_ERROR])
    if fails.size >= target:
        return outcomes[: fails[target - 1] + 1], True
    return outcomes, False


def _run_point(code, side, cfg, p, spec: SweepSpec, pool) -> np.ndarray:
    chunks = [(s, min(s + CHUNK, spec.trials)) for s in range(0, spec.trials, CHUNK)]
    target = spec.min_failures
    parts: list[np.ndarray] = []
    fails = 0
    if pool is None:
        for s, e in chunks:
            part = run_trials(code, side, cfg, p, spec.seed, s, e)
            parts.append(part)
            fails += int((part >= 2).sum())
            if target is not None and fails >= target:
                break
        return np.concatenate(parts) if parts else np.empty(0, np.uint8)
    # keep a bounded number of chunks in flight and consume them in order
    window = max(2, 2 * pool._max_workers)
    pending = []
    it = iter(chunks)
    for s, e in it:
        pending.append(pool.submit(_chunk_job, (side, cfg, p, spec.seed, s, e)))
        if len(pending) >= window:
            break
    while pending:
        part = pending.pop(0).result()
        parts.append(part)
        fails += int((part >= 2).sum())
        if target is not None and fails >= target:
            for f in pending:
                f.cancel()
            break
        nxt = next(it, None)
        if nxt is not None:
            pending.append(pool.submit(_chunk_job, (side, cfg, p, spec.seed, *nxt)))
    return np.concatenate(parts)


def run_sweep(spec: SweepSpec, workers: int | None = None, progress=None) -> list[PointStats]:
    """Run every rate (and side) of ``spec``.

    With ``min_failures`` set, each point stops right after its
    ``min_failures``-th failing trial or after ``trials`` trials, whichever
    comes first. ``progress`` is called with each finished PointStats.
    """
    code = resolve_code(spec.code)
    workers = default_workers() if workers is None else max(1, int(workers))
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(code,))
    try:
        results = []
        for side in spec.sides():
            for p in spec.rates:
                cfg = spec.decoder.resolve(code.name or None, p)
                t0 = time.perf_counter()
                outcomes = _run_point(code, side, cfg, p, spec, pool)
                outcomes, stopped = _truncate(outcomes, spec.min_failures)
                stats = _tally(outcomes, p, side, cfg, time.perf_counter() - t0, stopped)
                results.append(stats)
                if progress is not None:
                    progress(stats)
        return results
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


# --- output ------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(results, timing: bool, with_side: bool):
    for r in results:
        lo, hi = r.ci if r.trials else (0.0, 0.0)
        row = [_fmt(r.rate), str(r.trials), str(r.exact), str(r.degenerate), str(r.logical),
               str(r.nonconv), _fmt(r.failure_rate), _fmt(lo), _fmt(hi),
               f"{r.seconds:.3f}" if timing and r.seconds is not None else ""]
        if with_side:
            row.append(r.side)
        yield row


def to_csv(results, spec: SweepSpec | None = None, timing: bool = False) -> str:
    """CSV text. The ``seconds`` column is left blank unless ``timing`` is set,
    so that identical sweeps give identical bytes."""
    results = list(results)
    with_side = len({r.side for r in results}) > 1
    buf = io.StringIO()
    if spec is not None:
        for key, value in spec.echo().items():
            buf.write(f"# {key}={json.dumps(value, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + (("side",) if with_side else ()))
    w.writerows(_rows(results, timing, with_side))
    return buf.getvalue()


def to_json(results, spec: SweepSpec | None = None, timing: bool = False) -> str:
    points = []
    for r in results:
        lo, hi = r.ci if r.trials else (0.0, 0.0)
        points.append({
            "rate": r.rate, "side": r.side, "trials": r.trials, **r.counts(),
            "failure_rate": r.failure_rate, "ci_low": lo, "ci_high": hi,
            "seconds": r.seconds if timing else None,
            "stopped_early": r.stopped_early,
            "failure_rate_unbiased": r.unbiased_rate,
            "config": r.config,
        })
    doc = {"spec": spec.echo() if spec is not None else None, "points": points}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(results, format: str = "csv", path=None, spec: SweepSpec | None = None,
         timing: bool = False) -> str:
    """Serialize results; write them to ``path`` if given. Returns the text."""
    if format == "csv":
        text = to_csv(results, spec, timing)
    elif format == "json":
        text = to_json(results, spec, timing)
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write results: {exc.strerror}", str(path)) from exc
    return text


def read_results(path) -> list[PointStats]:
    """Parse a CSV or JSON file written by :func:`emit`."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return [PointStats(pt["rate"], pt["trials"], pt["exact"], pt["degenerate"],
                           pt["logical"], pt["nonconv"], pt["seconds"], pt["side"],
                           pt["stopped_early"], pt["config"]) for pt in doc["points"]]
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(PointStats(float(row["rate"]), int(row["trials"]), int(row["exact"]),
                              int(row["degenerate"]), int(row["logical"]), int(row["nonconv"]),
                              float(row["seconds"]) if row["seconds"] else None,
                              row.get("side") or "X"))
    return out
