import json
import math
import os

import numpy as np
import pytest

import starnet


def test_star_spectrum_matches_hamiltonian():
    h = starnet.star_hamiltonian(3)
    numeric = np.linalg.eigvalsh(h)
    analytic = sorted(e for _, _, energy, mult in starnet.star_spectrum(3) for e in [energy] * mult)
    assert np.allclose(numeric, analytic, atol=1e-9)


def test_w_state_outcomes():
    p0, amps0 = starnet.w_state(3, 0)
    p1, amps1 = starnet.w_state(3, 1)
    assert p0 == pytest.approx(0.5, abs=1e-10)
    assert p1 == pytest.approx(0.5, abs=1e-10)
    assert abs(np.vdot(starnet.dicke_state(3, 2), amps0)) ** 2 == pytest.approx(1.0, abs=1e-10)
    assert abs(np.vdot(starnet.dicke_state(3, 1), amps1)) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_entanglement_measures():
    bell = np.zeros((4, 4), dtype=complex)
    bell[1, 1] = bell[2, 2] = bell[1, 2] = bell[2, 1] = 0.5
    assert starnet.concurrence(bell) == pytest.approx(1.0)
    assert starnet.eof(bell) == pytest.approx(1.0)
    assert starnet.eof_from_concurrence(0.0) == 0.0
    assert np.allclose(starnet.ideal_pair(), bell)
    reduced = starnet.partial_trace(np.kron(bell, np.diag([1.0, 0.0])), [0, 1])
    assert np.allclose(reduced, bell)


def test_scan_and_loss_helpers():
    r = starnet.max_entanglement_scan(3, 1.0, samples=401)
    assert 0.0 < r["e_m"] < 0.36
    assert starnet.loss_configurations(5, 2)[2] == [1, 5]
    hop, sites = starnet.chain_hopping(5, [1, 5])
    assert sites == [0, 2, 3, 4, 6]
    assert hop.shape == (5, 5)


def test_exceptions_map_to_python_types():
    with pytest.raises(ValueError):
        starnet.max_entanglement_scan(0)
    with pytest.raises(starnet.PhysicsRejection):
        starnet.max_entanglement_scan(5, lost=[2, 3])
    with pytest.raises(starnet.NumericalFailure):
        t = np.linspace(0.0, 1e-6, 4)
        starnet.estimate_gradient(t, np.cos(t))


def test_fit_and_gradient():
    rows = [(m, t2, math.exp(-2e-4 * m / t2)) for m in (3, 5, 7, 9, 11) for t2 in (0.5e-3, 1e-3, 2e-3)]
    f = starnet.fit_exponential(rows)
    assert f["a"] == pytest.approx(2e-4, rel=1e-4)
    assert f["b"] == pytest.approx(1.0, rel=1e-4)
    gamma = 2 * math.pi * 28.024951e9
    w = gamma * 10.0 * 50e-9
    t = np.linspace(0.0, 8 * math.pi / w, 401)
    c = np.array(starnet.gradient_coherence(starnet.ideal_pair(), t, 10.0))
    assert np.max(np.abs(c - np.cos(w * t))) < 1e-10
    assert starnet.estimate_gradient(t, c)["gradient"] == pytest.approx(10.0, rel=1e-6)


def test_run_writes_outputs(tmp_path):
    code, err = starnet.run("spectrum", {"n": "3", "out": str(tmp_path)})
    assert code == 0, err
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "spectrum"
    for name in manifest["outputs"]:
        assert (tmp_path / name).exists()
    code, err = starnet.run("sweep", {"m": "3,38", "n": "38", "out": str(tmp_path / "bad")})
    assert code == 3
    assert json.loads(err.splitlines()[0])["exit_code"] == 3
