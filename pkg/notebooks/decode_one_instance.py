"""Decode a single erasure instance on the [[1600,64]] code with every decoder.

Run: python3 notebooks/decode_one_instance.py [rate] [seed]
"""
import sys

from bpgd_erasure import (BpConfig, bp_decode, bpgd_decode, bundled_code, classify,
                          ml_erasure_outcome, peel_decode, pruned_peel_decode, sample_instance)
from bpgd_erasure.params import bp_config_for

rate = float(sys.argv[1]) if len(sys.argv) > 1 else 0.30
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 12

code = bundled_code("hgp1600")
inst = sample_instance(code, "X", rate, seed=(seed, 0))
print(f"{code.name}: [[{code.n},{code.k}]], {int(inst.mask.sum())} erased qubits at p={rate}")


def report(name, res):
    verdict = classify(inst.error, res.estimate, code, "X").value if res.converged else "nonconv"
    print(f"  {name:<22} {verdict:<10} rounds={res.rounds_used}")


report("peeling", peel_decode(code, inst))
report("pruned peeling M=1", pruned_peel_decode(code, inst, 1))
report("pruned peeling M=2", pruned_peel_decode(code, inst, 2))
report("bp", bp_decode(code, inst, BpConfig()))
report("bpgd", bpgd_decode(code, inst, BpConfig(), rng=(seed, 0)))
damped = bp_config_for("bpgd-damped", code.name, rate)
report(f"bpgd gamma={damped.gamma}", bpgd_decode(code, inst, damped, rng=(seed, 0)))
outcome, _ = ml_erasure_outcome(code, "X", inst)
print(f"  {'ml':<22} {outcome.value}")
