import math
import os
import pathlib

import numpy as np
import pytest

import spde

CONFIG_DIR = pathlib.Path(os.environ.get("SPDE_CONFIG_DIR", pathlib.Path(__file__).resolve().parents[2] / "configs"))


def test_mass_matrix_is_symmetric_positive_definite():
    b = spde.mass_matrix(16)
    assert b.shape == (15, 15)
    assert np.allclose(b, b.T)
    assert np.all(np.linalg.eigvalsh(b) > 0)


def test_stiffness_is_scaled_identity():
    a = spde.stiffness_matrix(10, diffusivity=0.25)
    assert np.allclose(a, 0.125 * np.eye(9), atol=1e-14)


def test_smallest_eigenvalue_matches_laplacian():
    lam = spde.eigenvalues(32, diffusivity=1.0)
    assert math.isclose(lam.max(), 1.0 / math.pi**2, rel_tol=1e-10)


def test_noise_spectrum():
    q = spde.noise_eigenvalues(1, 4, 2.0)
    assert np.allclose(q, [1.0, 0.25, 1.0 / 9.0, 1.0 / 16.0])
    with pytest.raises(ValueError):
        spde.noise_eigenvalues(1, 4, -1.0)


def test_rejected_config_lists_problems():
    bad = "[problem]\nreaction = 0, 1, 0, 1\n[discretization]\nN = 8\nM = 10\nT = 1\n"
    assert spde.check_config(bad)
    with pytest.raises(ValueError, match="config rejected"):
        spde.run(bad)


def test_single_heat_run_decays():
    out = spde.run((CONFIG_DIR / "heat_single.ini").read_text())
    assert out["axis_kind"] == "time"
    t, _, norm, _ = out["rows"][-1]
    assert t == 1.0
    assert math.isclose(norm, math.exp(-1.0) / math.sqrt(2.0), rel_tol=2e-3)


def test_spatial_study_is_reproducible():
    text = (CONFIG_DIR / "smoke_spatial.ini").read_text()
    a = spde.run(text, workers=1)
    b = spde.run(text, workers=2)
    assert a["csv_rows"] == b["csv_rows"]
    assert len(a["rows"]) == 5
    assert a["fitted_slope"] > 2.0
    c = spde.run(text, seed=12)
    assert c["seed"] == 12
    assert c["csv_rows"] != a["csv_rows"]
