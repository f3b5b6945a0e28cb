"""Short failure-rate sweep: peeling, pruned peeling and BPGD on one code.

Writes one CSV per decoder into the current directory. Run:
python3 notebooks/small_sweep.py [code] [trials]
"""
import sys

from bpgd_erasure import DecoderConfig, SweepSpec, emit, run_sweep

code = sys.argv[1] if len(sys.argv) > 1 else "hgp1600"
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 500
rates = [0.20, 0.24, 0.28, 0.32]

for label, cfg in [("peeling", DecoderConfig("peeling")),
                   ("pruned1", DecoderConfig("pruned-peeling", depth=1)),
                   ("bpgd", DecoderConfig("bpgd"))]:
    spec = SweepSpec(code, "X", cfg, rates, trials=trials, min_failures=50, seed=1)
    results = run_sweep(spec)
    emit(results, "csv", f"{code}_{label}.csv", spec=spec)
    for r in results:
        lo, hi = r.ci
        print(f"{label:<8} p={r.rate:.2f}  {r.failure_rate:.4f}  [{lo:.4f}, {hi:.4f}]  n={r.trials}")
