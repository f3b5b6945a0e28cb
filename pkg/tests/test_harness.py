import json

import numpy as np
import pytest

from bpgd_erasure.codes import hamming_7_4, hgp
from bpgd_erasure.harness import (
    CSV_COLUMNS,
    DecoderConfig,
    PointStats,
    SweepSpec,
    confidence_interval,
    default_workers,
    emit,
    inverse_binomial_estimate,
    read_results,
    run_sweep,
)


@pytest.fixture(scope="module")
def toy():
    return hgp(hamming_7_4(), hamming_7_4(), name="toy")


def test_wilson_examples():
    lo, hi = confidence_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.04
    lo, hi = confidence_interval(50, 100)
    assert 0.5 - lo == pytest.approx(hi - 0.5)
    lo, hi = confidence_interval(10, 1000)
    assert lo == pytest.approx(0.0054, abs=5e-5)
    assert hi == pytest.approx(0.0183, abs=5e-5)
    with pytest.raises(ValueError):
        confidence_interval(0, 0)
    with pytest.raises(ValueError):
        confidence_interval(5, 4)


def test_wilson_against_high_precision():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    z = mpmath.sqrt(2) * mpmath.erfinv(mpmath.mpf("0.95"))
    for k, n in [(10, 1000), (3, 17), (250, 400)]:
        ph = mpmath.mpf(k) / n
        d = 1 + z**2 / n
        c = (ph + z**2 / (2 * n)) / d
        h = z * mpmath.sqrt(ph * (1 - ph) / n + z**2 / (4 * n * n)) / d
        lo, hi = confidence_interval(k, n)
        assert lo == pytest.approx(float(c - h), abs=1e-12)
        assert hi == pytest.approx(float(c + h), abs=1e-12)


def test_inverse_binomial():
    assert inverse_binomial_estimate(1, 1) == 1.0
    assert inverse_binomial_estimate(10, 91) == pytest.approx(9 / 90)
    with pytest.raises(ValueError):
        inverse_binomial_estimate(0, 10)


def test_inverse_binomial_is_unbiased_on_simulated_streams():
    rng = np.random.default_rng(0)
    p, target = 0.2, 5
    est = []
    for _ in range(20000):
        fails = trials = 0
        while fails < target:
            trials += 1
            fails += rng.random() < p
        est.append(inverse_binomial_estimate(fails, trials))
    assert np.mean(est) == pytest.approx(p, abs=3 * np.std(est) / np.sqrt(len(est)))


def test_zero_rate_never_fails(toy):
    spec = SweepSpec(toy, "X", DecoderConfig("bpgd"), [0.0], trials=1000)
    (r,) = run_sweep(spec, 1)
    assert r.trials == 1000 and r.failure_rate == 0 and r.exact == 1000


@pytest.mark.parametrize("kind", ["bp", "bpgd", "bpgd-damped", "peeling", "pruned-peeling", "ml"])
def test_counts_conserved(toy, kind):
    spec = SweepSpec(toy, "both", DecoderConfig(kind, depth=2), [0.2, 0.4], trials=300, seed=3)
    res = run_sweep(spec, 1)
    assert [r.side for r in res] == ["X", "X", "Z", "Z"]
    for r in res:
        assert r.exact + r.degenerate + r.logical + r.nonconv == r.trials == 300
        lo, hi = r.ci
        assert lo <= r.failure_rate <= hi


def test_worker_count_does_not_change_bytes(toy):
    spec = SweepSpec(toy, "X", DecoderConfig("bpgd"), [0.3, 0.45], trials=700, seed=9)
    one = emit(run_sweep(spec, 1), "csv", spec=spec)
    two = emit(run_sweep(spec, 2), "csv", spec=spec)
    assert one == two


def test_min_failures_truncates_at_target(toy):
    spec = SweepSpec(toy, "X", DecoderConfig("peeling"), [0.5], trials=5000, min_failures=25,
                     seed=2)
    (r,) = run_sweep(spec, 1)
    assert r.failures == 25 and r.stopped_early
    full = run_sweep(SweepSpec(toy, "X", DecoderConfig("peeling"), [0.5], trials=r.trials,
                               seed=2), 1)[0]
    assert full.counts() == r.counts()
    par = run_sweep(spec, 2)[0]
    assert par.counts() == r.counts() and par.trials == r.trials
    assert r.unbiased_rate == pytest.approx(24 / (r.trials - 1))


def test_min_failures_cap(toy):
    spec = SweepSpec(toy, "X", DecoderConfig("ml"), [0.05], trials=200, min_failures=10)
    (r,) = run_sweep(spec, 1)
    assert r.trials == 200 and not r.stopped_early and r.unbiased_rate is None


def test_table_parameters_resolved_per_rate():
    spec = SweepSpec("hgp2025", "X", DecoderConfig("bpgd-damped"), [0.2, 0.24], trials=2)
    res = run_sweep(spec, 1)
    assert [r.config["bp"]["gamma"] for r in res] == [0.88, 0.90]


def test_emit_csv_roundtrip(toy, tmp_path):
    spec = SweepSpec(toy, "X", DecoderConfig("peeling"), [0.1, 0.3], trials=200)
    res = run_sweep(spec, 1)
    path = tmp_path / "r.csv"
    text = emit(res, "csv", path, spec=spec)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == ",".join(CSV_COLUMNS)
    back = read_results(path)
    assert [(b.rate, b.trials, b.counts()) for b in back] == [(r.rate, r.trials, r.counts()) for r in res]
    assert all(b.seconds is None for b in back)
    timed = emit(res, "csv", timing=True)
    assert timed.splitlines()[1].split(",")[-1] != ""


def test_emit_empty_is_header_only():
    assert emit([], "csv") == ",".join(CSV_COLUMNS) + "\n"


def test_emit_json_roundtrip(toy, tmp_path):
    spec = SweepSpec(toy, "X", DecoderConfig("bpgd"), [0.3], trials=100)
    res = run_sweep(spec, 1)
    path = tmp_path / "r.json"
    emit(res, "json", path, spec=spec)
    doc = json.loads(path.read_text())
    assert doc["spec"]["trials"] == 100 and doc["spec"]["decoder"]["kind"] == "bpgd"
    back = read_results(path)
    assert back[0].counts() == res[0].counts() and back[0].config == res[0].config
    assert emit(back, "json", spec=spec) == path.read_text()


def test_emit_bad_path():
    with pytest.raises(OSError, match="cannot write"):
        emit([PointStats(0.1, 1, 1)], "csv", "/nonexistent-dir/x.csv")
    with pytest.raises(ValueError):
        emit([], "xml")


def test_spec_validation(toy):
    with pytest.raises(ValueError):
        SweepSpec(toy, rates=[1.2])
    with pytest.raises(ValueError):
        SweepSpec(toy, rates=[0.1], trials=0)
    with pytest.raises(ValueError):
        SweepSpec(toy, side="Y", rates=[0.1])
    with pytest.raises(ValueError):
        DecoderConfig("osd")


def test_default_workers(monkeypatch):
    monkeypatch.delenv("BPGD_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("BPGD_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("BPGD_WORKERS", "many")
    with pytest.raises(ValueError):
        default_workers()
