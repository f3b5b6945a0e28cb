"""Command line interface.

Exit codes: 0 success, 1 validation error (bad code, bad arguments or
parameters, unsound decoder output), 2 I/O error (missing or malformed
files, unwritable output).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bp import BpConfig, bp_decode, bpgd_decode
from .channel import dump_instances, load_instances, sample_instance
from .codes import CodeFormatError, CodeValidationError, resolve_code, validate
from .combinatorial import classify, ml_erasure_outcome, pruned_peel_decode
from .harness import (
    DecoderConfig,
    SoundnessError,
    SweepSpec,
    default_workers,
    emit,
    run_sweep,
)
from .params import DECODERS, read_config

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class _IOFailure(Exception):
    pass


def _rates(text: str) -> list[float]:
    """``0.1,0.2`` or ``start:stop:step`` (stop included)."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise argparse.ArgumentTypeError(f"bad rate range {part!r}")
            start, stop, step = map(float, bits)
            if step <= 0:
                raise argparse.ArgumentTypeError("rate step must be positive")
            count = int(round((stop - start) / step))
            out.extend(round(start + i * step, 10) for i in range(count + 1))
        else:
            out.append(float(part))
    if not out:
        raise argparse.ArgumentTypeError("no erasure rates given")
    return out


def _code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", required=True,
                   help="bundled name (hgp1600, hgp2025, b1, steane) or a .css/.alist path")


def _decoder_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--decoder", choices=DECODERS, default="bpgd")
    p.add_argument("--bp-iters", type=int, help="BP iterations per round (default 32)")
    p.add_argument("--gamma", type=float, help="damping factor (default: table or 1)")
    p.add_argument("--c-opt", type=float, help="prior scale (default: table or 1)")
    p.add_argument("--llr-max", type=float, help="saturation magnitude (default 25)")
    p.add_argument("--llr-min", type=float, help="prior of erased bits (default 0)")
    p.add_argument("--tie-break", choices=("index", "random"), help="decimation ties")
    p.add_argument("--prune-depth", type=int, default=1,
                   help="stabilizer combination size for pruned peeling (default 1)")
    p.add_argument("--ml-ties", choices=("fail", "guess"), default="fail",
                   help="count an erased logical as a failure or guess a coset")
    p.add_argument("--config", help="key = value file with BpConfig fields")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bpgd-erasure",
                                 description="Erasure decoding simulator for quantum LDPC codes.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="Monte Carlo failure rates over erasure rates")
    _code_args(sw)
    sw.add_argument("--side", default="X", help="X, Z or both (default X)")
    _decoder_args(sw)
    sw.add_argument("--rates", type=_rates, required=True,
                    help="comma list and/or start:stop:step ranges")
    sw.add_argument("--trials", type=int, default=1000,
                    help="trials per point (a cap when --min-failures is set)")
    sw.add_argument("--min-failures", type=int, help="stop a point at this many failures")
    sw.add_argument("--seed", type=int, default=0, help="master seed")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", help="output file (default stdout)")
    sw.add_argument("--workers", type=int, help="worker processes (default $BPGD_WORKERS or 1)")
    sw.add_argument("--timing", action="store_true",
                    help="fill the seconds column (makes output run-dependent)")
    sw.add_argument("--quiet", action="store_true", help="no progress lines on stderr")

    va = sub.add_parser("validate", help="check the CSS invariants of a code")
    _code_args(va)

    de = sub.add_parser("describe-code", help="print n, k, ranks and degrees")
    _code_args(de)

    dm = sub.add_parser("dump", help="write sampled instances for replay")
    _code_args(dm)
    dm.add_argument("--side", default="X")
    dm.add_argument("--rate", type=float, required=True)
    dm.add_argument("--trials", type=int, default=10)
    dm.add_argument("--seed", type=int, default=0)
    dm.add_argument("--out", required=True)

    rp = sub.add_parser("replay", help="re-run dumped instances with verbose traces")
    _code_args(rp)
    rp.add_argument("--instances", required=True, help="file written by 'dump'")
    rp.add_argument("--index", type=int, help="only this line (0-based); default all")
    _decoder_args(rp)
    return ap


def _bp_config(args) -> BpConfig:
    kw = read_config(args.config) if args.config else {}
    for flag, key in (("bp_iters", "iterations"), ("llr_max", "llr_max"),
                      ("llr_min", "llr_min"), ("tie_break", "tie_break")):
        value = getattr(args, flag)
        if value is not None:
            kw[key] = value
    return BpConfig(**kw)


def _decoder(args) -> DecoderConfig:
    kw = read_config(args.config) if args.config else {}
    gamma = args.gamma if args.gamma is not None else kw.get("gamma")
    c_opt = args.c_opt if args.c_opt is not None else kw.get("c_opt")
    return DecoderConfig(args.decoder, _bp_config(args), gamma, c_opt, args.prune_depth,
                         args.ml_ties)


def _load(ref):
    try:
        return resolve_code(ref)
    except CodeValidationError:
        raise
    except (OSError, CodeFormatError, KeyError) as exc:
        raise _IOFailure(f"cannot load code {ref!r}: {exc}") from exc


def _cmd_sweep(args) -> int:
    code = _load(args.code)
    spec = SweepSpec(code, args.side, _decoder(args), args.rates, args.trials,
                     args.min_failures, args.seed)
    workers = args.workers if args.workers is not None else default_workers()

    def progress(s):
        if not args.quiet:
            lo, hi = s.ci
            print(f"[{args.decoder} {code.name} side {s.side}] p={s.rate:g} trials={s.trials} "
                  f"fail={s.failure_rate:.6g} [{lo:.3g}, {hi:.3g}] {s.seconds:.1f}s",
                  file=sys.stderr)

    results = run_sweep(spec, workers, progress)
    try:
        text = emit(results, args.format, args.out, spec, args.timing)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        code = _load(args.code)
    except CodeValidationError as exc:
        print(f"INVALID {args.code}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    problems = validate(code)
    if problems:
        for v in problems:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    print(f"OK {code.name} [[{code.n},{code.k}]]")
    return EXIT_OK


def _cmd_describe(args) -> int:
    code = _load(args.code)
    print(json.dumps(code.describe(), indent=2))
    return EXIT_OK


def _cmd_dump(args) -> int:
    code = _load(args.code)
    insts = [sample_instance(code, args.side, args.rate, seed=(args.seed, t))
             for t in range(args.trials)]
    try:
        dump_instances(insts, args.out, code)
    except OSError as exc:
        raise _IOFailure(f"cannot write {args.out}: {exc.strerror}") from exc
    print(f"wrote {len(insts)} instances to {args.out}", file=sys.stderr)
    return EXIT_OK


def _replay_one(code, inst, cfg: DecoderConfig, out) -> None:
    side = inst.side
    erased = np.flatnonzero(inst.mask)
    out.write(f"instance seed={inst.seed} p={inst.erasure_rate} side={side.value} "
              f"erased={erased.size} error_weight={int(inst.error.sum())} "
              f"syndrome_weight={int(inst.syndrome.sum())}\n")
    if cfg.kind == "ml":
        outcome, _ = ml_erasure_outcome(code, side, inst, cfg.ml_ties,
                                        rng=inst.seed if inst.seed else 0)
        out.write(f"  outcome {outcome.value}\n")
        return
    if cfg.kind in ("peeling", "pruned-peeling"):
        depth = 0 if cfg.kind == "peeling" else cfg.depth
        res = pruned_peel_decode(code, inst, depth, side)
        out.write(f"  peeling passes {res.rounds_used}, status {res.status.value}\n")
    elif cfg.kind == "bp":
        res = bp_decode(code, inst, cfg.bp, side)
        out.write(f"  {cfg.bp}\n  status {res.status.value}\n")
    else:
        res = bpgd_decode(code, inst, cfg.bp, side, rng=inst.seed, trace=True)
        out.write(f"  {cfg.bp}\n")
        for r, beliefs in enumerate(res.trace_beliefs):
            neg = int((beliefs < 0).sum())
            eb = beliefs[erased] if erased.size else np.zeros(1)
            line = (f"  round {r + 1}: erased |belief| min {np.abs(eb).min():.4g} "
                    f"max {np.abs(eb).max():.4g}, negative beliefs {neg}")
            if r < len(res.decimated):
                v = int(res.decimated[r])
                sign = "+" if beliefs[v] >= 0 else "-"
                line += f"; decimate v{v} ({beliefs[v]:.4g}) to {sign}llr_max"
            out.write(line + "\n")
        out.write(f"  status {res.status.value} after {res.rounds_used} rounds, "
                  f"{res.bp_iterations_total} BP iterations\n")
    if res.converged:
        out.write(f"  outcome {classify(inst.error, res.estimate, code, side).value}\n")
    else:
        out.write("  outcome nonconv\n")


def _cmd_replay(args) -> int:
    code = _load(args.code)
    try:
        insts = load_instances(args.instances, code)
    except OSError as exc:
        raise _IOFailure(f"cannot read {args.instances}: {exc}") from exc
    if args.index is not None:
        if not 0 <= args.index < len(insts):
            raise ValueError(f"index {args.index} out of range (0..{len(insts) - 1})")
        insts = [insts[args.index]]
    base = _decoder(args)
    for inst in insts:
        _replay_one(code, inst, base.resolve(code.name or None, inst.erasure_rate), sys.stdout)
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "describe-code": _cmd_describe,
    "dump": _cmd_dump,
    "replay": _cmd_replay,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CodeValidationError as exc:
        print(f"error: invalid code: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SoundnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
