import json
import math

import numpy as np
import pytest

import qpmix


def test_gamma_default_sums_to_one():
    g = qpmix.gamma_default(0.1)
    assert g.gamma1 + g.gamma2 + g.gamma3 == pytest.approx(1, abs=1e-12)
    assert g.one_norm == pytest.approx(qpmix.one_norm_closed_form(0.1), abs=1e-12)
    assert g.gamma2 == pytest.approx(math.sqrt(2) * math.sin(0.1), abs=1e-12)
    with pytest.raises(qpmix.OutOfRegimeError):
        qpmix.gamma_default(0.5)


def test_pauli_string():
    p = qpmix.PauliString("XYZ")
    assert str(p) == "XYZ"
    assert p.weight() == 3
    assert not qpmix.PauliString("XI").commutes(qpmix.PauliString("ZI"))
    with pytest.raises(ValueError):
        qpmix.PauliString("XQ")


def test_scan_ab_shape():
    norms, cell, (a, b, best) = qpmix.scan_ab(0.05, 20)
    assert norms.shape == (20, 20)
    assert cell == pytest.approx(2 * math.pi / 20)
    assert best >= 1
    assert best == pytest.approx(np.nanmin(norms))


def test_mitigated_estimate_matches_exact():
    c = qpmix.trotter_circuit(3, 3, error="constant", epsilon=0.05, policy="mix")
    o = qpmix.PauliString.all_z(3)
    ideal = qpmix.exact_ideal_expectation(c, o)
    noisy = qpmix.exact_noisy_expectation(c, o)
    assert abs(noisy - ideal) > 0.01
    r = qpmix.estimate(c, o, shots=20000, s=1, seed=3)
    assert r["weighted_samples"].shape == (20000,)
    assert np.mean(r["weighted_samples"]) == pytest.approx(r["mean"], abs=1e-12)
    assert abs(r["mean"] - ideal) < 5 * r["instance_standard_error"]


def test_small_circuit_enumeration():
    c = qpmix.trotter_circuit(2, 1, error="constant", epsilon=0.05, policy="mix")
    o = qpmix.PauliString.all_z(2)
    enumerated, density = qpmix.exact_mixture_expectation(c, o)
    assert enumerated == pytest.approx(qpmix.exact_ideal_expectation(c, o), abs=1e-10)
    assert density == pytest.approx(enumerated, abs=1e-10)


def test_run_config(tmp_path):
    cfg = {"experiment": "constant_overrotation", "N": 2, "L": 2, "error": {"epsilon": 0.01},
           "S": 1000, "s": 100, "histogram": False}
    out = qpmix.run_config(json.dumps(cfg), str(tmp_path / "run"))
    results = json.loads((tmp_path / "run" / "results.json").read_text())
    assert str(out).endswith("run")
    assert set(results["points"][0]["arms"]) == {"exact", "noisy", "mixture"}
    with pytest.raises(qpmix.ConfigError, match="s:"):
        qpmix.run_config(json.dumps({**cfg, "s": 7}))
