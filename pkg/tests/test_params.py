import pytest

from bpgd_erasure.bp import BpConfig
from bpgd_erasure.params import bp_config_for, load_tables, lookup, read_config


def test_table_values_exact_ranges():
    assert lookup("c_opt", "hgp1600", 0.06) == 0.1
    assert lookup("c_opt", "hgp1600", 0.10) == 0.2
    assert lookup("c_opt", "hgp1600", 0.20) == 0.2
    assert lookup("c_opt", "hgp1600", 0.34) == 0.5
    assert lookup("c_opt", "b1", 0.48) == 0.8
    assert lookup("gamma", "hgp2025", 0.24) == 0.90
    assert lookup("gamma", "hgp2025", 0.20) == 0.88
    assert lookup("gamma", "b1", 0.44) == 0.94
    assert lookup("c_opt_joint", "hgp2025", 0.26) == 0.14


def test_nearest_rate_fallback():
    # 0.09 sits between 0.08 and 0.10; both are 0.01 away, the lower range wins
    assert lookup("c_opt", "hgp1600", 0.09) == 0.1
    assert lookup("c_opt", "hgp1600", 0.11) == 0.2
    assert lookup("gamma", "hgp1600", 0.40) == 0.96
    assert lookup("c_opt_joint", "hgp2025", 0.05) == 0.065


def test_unknown_code_has_no_table():
    assert lookup("gamma", "steane", 0.2) is None


def test_every_table_value_is_valid():
    for e in load_tables():
        assert 0 < e.value <= 1
        assert 0 <= e.lo <= e.hi <= 1


def test_presets():
    base = BpConfig()
    assert bp_config_for("bpgd", "hgp2025", 0.24) == base
    assert bp_config_for("bpgd-damped", "hgp2025", 0.24) == base.replace(gamma=0.90)
    assert bp_config_for("bpgd-adjllr", "hgp2025", 0.24) == base.replace(c_opt=0.3)
    assert bp_config_for("bpgd-combined", "hgp2025", 0.24) == base.replace(gamma=0.9, c_opt=0.135)
    # no joint table for this code: fall back to the plain prior-scale table
    assert bp_config_for("bpgd-combined", "b1", 0.44) == base.replace(gamma=0.94, c_opt=0.5)
    assert bp_config_for("bpgd-damped", "steane", 0.2) == base
    assert bp_config_for("bpgd-damped", "hgp2025", 0.24, gamma=1.0) == base
    with pytest.raises(ValueError):
        bp_config_for("peeling", "hgp2025", 0.24)


def test_read_config(tmp_path):
    p = tmp_path / "bp.conf"
    p.write_text("# comment\nT = 64\nllr_max = 20  # inline\ngamma=0.9\ntie-break = random\n")
    kw = read_config(p)
    assert kw == {"iterations": 64, "llr_max": 20.0, "gamma": 0.9, "tie_break": "random"}
    assert BpConfig(**kw).iterations == 64
    p.write_text("beta = 1\n")
    with pytest.raises(ValueError, match="unknown key"):
        read_config(p)
