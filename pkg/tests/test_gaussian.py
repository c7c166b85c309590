import numpy as np
import pytest

from teurkit import fisher as Fi
from teurkit import gaussian as G
from teurkit import model as M
from teurkit.errors import ConfigError
from teurkit.linalg import det2, inverse2, rot2, scale2
from teurkit.tradeoff import teur_lhs

ANGLES = np.linspace(-np.pi, np.pi, 7)
SQUEEZES = [-1.0, -0.3, 0.0, 0.6, 1.2]


def test_qfim_examples():
    np.testing.assert_allclose(G.qfim_displacement(0, 0.7), 4 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(
        G.qfim_displacement(1, 0), np.diag([4 * np.e**2, 4 * np.e**-2]), rtol=1e-14
    )


@pytest.mark.parametrize("r", SQUEEZES)
@pytest.mark.parametrize("phi", ANGLES)
def test_determinants_and_inverse(r, phi):
    fq = G.qfim_displacement(r, phi)
    assert det2(fq) == pytest.approx(16, rel=1e-10)
    assert det2(G.system_cov(r, phi)) == pytest.approx(1 / 16, rel=1e-10)
    assert det2(G.ancilla_cov(r, phi)) == pytest.approx(1 / 16, rel=1e-10)
    np.testing.assert_allclose(G.system_cov(r, phi), inverse2(fq), atol=1e-12 * np.cosh(2 * r))


def test_system_and_ancilla_examples():
    expected = 0.25 * rot2(np.pi / 6) @ scale2(-2) @ rot2(np.pi / 6).T
    np.testing.assert_allclose(G.system_cov(1, np.pi / 3), expected, atol=1e-15)
    np.testing.assert_allclose(G.ancilla_cov(1, -np.pi / 3), expected, atol=1e-15)
    np.testing.assert_allclose(G.ancilla_cov(0, 1.1), 0.25 * np.eye(2), atol=1e-15)


def test_joint_cov_examples():
    np.testing.assert_allclose(G.joint_cov(G.GaussianScheme()), 0.5 * np.eye(2))
    s = G.GaussianScheme(r=1, phi=np.pi / 3, r_anc=1, phi_anc=-np.pi / 3)
    expected = 0.5 * rot2(np.pi / 6) @ scale2(-2) @ rot2(np.pi / 6).T
    np.testing.assert_allclose(G.joint_cov(s), expected, atol=1e-14)


def test_joint_cov_dominates_qcrb():
    for r in SQUEEZES:
        for phi in ANGLES:
            fq = G.qfim_displacement(r, phi)
            for ra in SQUEEZES:
                for pa in ANGLES:
                    e = G.joint_cov(G.GaussianScheme(r=r, phi=phi, r_anc=ra, phi_anc=pa))
                    assert np.linalg.eigvalsh(e - inverse2(fq))[0] >= -1e-12 * np.cosh(2 * max(abs(r), abs(ra)))


def test_error_area_minimum():
    r, phi = 0.8, 1.0
    areas = {}
    for ra in np.linspace(-1.2, 1.2, 13):
        for pa in np.linspace(-np.pi, np.pi, 13):
            s = G.GaussianScheme(r=r, phi=phi, r_anc=ra, phi_anc=pa)
            areas[(ra, pa)] = G.error_area(s)
    assert min(areas.values()) >= 0.5 - 1e-12
    assert G.error_area(G.GaussianScheme(r=r, phi=phi, r_anc=r, phi_anc=-phi)) == pytest.approx(0.5, abs=1e-12)
    near = [k for k, a in areas.items() if a < 0.5 + 1e-9]
    assert near == []  # grid misses (r, -phi), so no point reaches the floor


def test_beta_examples():
    assert G.beta_of_alpha(0.3 - 0.2j, 0) == pytest.approx(0.3 - 0.2j)
    assert G.beta_of_alpha(1.0, 0.7) == pytest.approx(np.exp(0.7))


@pytest.mark.parametrize("r,phi", [(0.3, 0.0), (1.0, np.pi / 3), (-0.5, 2.0)])
def test_beta_jacobian_finite_difference(r, phi):
    zeta = abs(r) * np.exp(1j * (phi if r >= 0 else phi + np.pi))
    a0, h = 0.2 + 0.1j, 1e-6
    cols = []
    for d in (h, 1j * h):
        b = (G.beta_of_alpha(a0 + d, zeta) - G.beta_of_alpha(a0 - d, zeta)) / (2 * h)
        cols.append([b.real, b.imag])
    np.testing.assert_allclose(np.array(cols).T, G.beta_jacobian(r, phi), atol=1e-7)


def test_heisenberg_matches_system_cov():
    t, off = G.heisenberg_quadratures(0.9, 0.4, 1 - 2j)
    np.testing.assert_allclose(0.25 * t @ t.T, G.system_cov(0.9, 0.4), atol=1e-14)
    np.testing.assert_allclose(off, [1, -2])


def test_scheme_validation_and_round_trip():
    with pytest.raises(ConfigError):
        G.GaussianScheme(n=0)
    with pytest.raises(ConfigError):
        G.GaussianScheme(r=np.nan)
    s = G.GaussianScheme(r=0.2, phi=1, alpha=0.5 - 1j, r_anc=-0.1, phi_anc=2, n=7)
    assert G.GaussianScheme.from_dict(s.to_dict()) == s


def test_measurement_record_shape():
    s = G.GaussianScheme(alpha=1 + 2j, n=50)
    rec = G.measurement_record(s, seed=3)
    assert rec.samples.shape == (50, 2)
    np.testing.assert_array_equal(rec.samples, G.measurement_record(s, seed=3).samples)


def test_simulate_heterodyne_statistics():
    s = G.GaussianScheme(n=10_000)
    out = G.simulate(s, 10_000, seed=12345)
    cov = out.sample_cov
    np.testing.assert_allclose(np.diag(cov), [0.5, 0.5], rtol=0.05)
    assert abs(cov[0, 1]) < 0.01
    assert teur_lhs(cov, G.qfim_displacement(0, 0), 1.0, check_bound=False) >= 0.95
    sd = np.sqrt(0.5 / (s.n * out.n_trials))
    assert np.all(np.abs(out.mean) < 5 * sd)


def test_simulate_mean_tracks_alpha():
    s = G.GaussianScheme(r=0.5, phi=1.0, alpha=0.3 - 0.7j, r_anc=0.5, phi_anc=-1.0, n=100)
    out = G.simulate(s, 500, seed=1)
    sd = np.sqrt(np.diag(G.joint_cov(s)) / (s.n * out.n_trials))
    assert np.all(np.abs(out.mean - s.theta) < 5 * sd)


def test_simulate_deterministic_and_worker_independent():
    s = G.GaussianScheme(r=0.4, n=20)
    a = G.simulate(s, 300, seed=9)
    b = G.simulate(s, 300, seed=9, workers=4)
    np.testing.assert_array_equal(a.mean, b.mean)
    np.testing.assert_array_equal(a.sample_cov, b.sample_cov)
    c = G.simulate(s, 300, seed=10)
    assert not np.array_equal(a.mean, c.mean)


def test_simulate_single_trial_shape():
    out = G.simulate(G.GaussianScheme(n=5), 1, seed=0)
    assert out.mean.shape == (2,) and out.sample_cov.shape == (2, 2)
    with pytest.raises(ConfigError):
        G.simulate(G.GaussianScheme(), 0, seed=0)


def test_sweep_rows_and_errors():
    rows = G.sweep(G.GaussianScheme(r=1, phi=np.pi / 3, r_anc=1),
                   [("phi_anc", [-np.pi / 3, 0, np.pi / 3])])
    assert len(rows) == 3 and len(rows[0]) == len(G.SWEEP_HEADER)
    assert rows[0][-1] == pytest.approx(0.5, abs=1e-12)
    for row in rows:
        assert row[8] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ConfigError):
        G.sweep(G.GaussianScheme(), [])
    with pytest.raises(ConfigError):
        G.sweep(G.GaussianScheme(), [("alpha", [1])])


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 1.2])
@pytest.mark.parametrize("phi", [0.0, np.pi / 3])
def test_closed_form_matches_fock_geometry(r, phi):
    m = M.displacement_estimation(r, phi, analytic=False)
    q = Fi.qgt(m, [0.0, 0.0])
    np.testing.assert_allclose(4 * q.real, G.qfim_displacement(r, phi), rtol=1e-4)
    assert Fi.gamma_from_qgt(q) == pytest.approx(1.0, abs=1e-4)
