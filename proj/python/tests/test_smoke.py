import math
import os
import subprocess

import numpy as np
import pytest

import conemag as cm


@pytest.fixture
def cone():
    return cm.ConeConfig(1.5, 1.0, 0.4)


def test_config_validation():
    with pytest.raises(cm.ConfigError):
        cm.ConeConfig(0.5, 1.0, 0.2)
    with pytest.raises(cm.ConeMagError):
        cm.ConeConfig(1.0, 1.0, 1.5)
    assert issubclass(cm.SingularTimeError, cm.ConeMagError)


def test_eigenvalues(cone):
    # Lowest Landau-type level for k with k/sigma + alpha > 0 sits at (2m + 1 + 2(k/sigma + alpha)) b0.
    lam = cm.eigenvalue(1, 2, cone)
    assert lam == pytest.approx((5 + 2 * (1 / 1.5 + 0.4)) * 1.0, rel=1e-14)
    assert cm.eigenvalue(-3, 0, cone) == pytest.approx(1.0, rel=1e-14)


def test_geometry(cone):
    assert cm.angular_difference(0.0, cone.period - 0.1, cone) == pytest.approx(0.1)
    assert cm.cone_distance((1.0, 0.0), (1.0, math.pi * cone.sigma), cone) == pytest.approx(2.0)


def test_heat_representations_agree(cone):
    p, q = (0.8, 0.3), (1.3, 2.0)
    series = cm.heat_kernel(cone, 0.7, p, q, "series").value
    closed = cm.heat_kernel(cone, 0.7, p, q, "closed").value
    spectral = cm.heat_kernel(cone, 0.7, p, q, "spectral", window=cm.Window(30, 30)).value
    assert abs(series - closed) <= 1e-10 * abs(series)
    assert abs(series - spectral) <= 1e-8 * abs(series)


def test_schrodinger_singular_time():
    cfg = cm.ConeConfig(1.0, 1.0, 0.25)
    with pytest.raises(cm.SingularTimeError):
        cm.schrodinger_kernel(cfg, math.pi, (1.0, 0.0), (1.0, 0.5))


def test_field_roundtrip_and_evolution(cone):
    f = cm.random_field(cm.Window(6, 6), 11)
    assert f.l2_norm() == pytest.approx(1.0, rel=1e-14)
    g = cm.SpectralField(f.coeffs)
    assert np.array_equal(g.coeffs, f.coeffs)
    u = cm.evolve(f, "schrodinger", 0.9, cone)
    assert u.l2_norm() == pytest.approx(1.0, rel=1e-13)
    h = cm.evolve(f, "heat", 0.5, cone)
    assert h.l2_norm() < 1.0


def test_expand_eigenfunction(cone):
    f = cm.expand(lambda r, th: cm.eigenfunction(1, 1, (r, th), cone), cm.Window(3, 3), cone)
    assert abs(f.at(1, 1)) == pytest.approx(1.0, abs=1e-10)
    assert f.l2_norm() == pytest.approx(1.0, abs=1e-10)


def test_besov_comparable_to_l2_at_zero_smoothness(cone):
    inner = cm.random_field(cm.Window(7, 7), 3).coeffs
    f = cm.SpectralField(np.pad(inner, ((1, 1), (0, 1))))
    ratio = cm.besov_norm(f, 0.0, 2.0, 2.0, cone) / cm.sobolev_norm(f, 0.0, cone)
    assert 1 / math.sqrt(2) <= ratio <= 1.0 + 1e-12


def test_cli_exit_codes(tmp_path):
    cli = os.environ.get("CONEMAG_CLI")
    if not cli:
        pytest.skip("CONEMAG_CLI not set")
    bad = subprocess.run([cli, "--out", str(tmp_path), "verify", "dispersive", "--gamma", "0.9"],
                         capture_output=True)
    assert bad.returncode == 2
    ok = subprocess.run([cli, "--out", str(tmp_path), "kernel", "heat", "--repr", "both", "--t", "0.5",
                         "--p", "1,0.2", "--q", "0.7,1.1"], capture_output=True)
    assert ok.returncode == 0
    assert (tmp_path / "kernel.csv").read_text().startswith("kind,repr,t,")
