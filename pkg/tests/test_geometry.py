"""Christoffel/Riemann machinery against closed-form oracles."""
import numpy as np
import pytest

from loopcs import geometry, metrics
from loopcs.geometry import (
    ChartPoint,
    SingularMetricError,
    christoffel,
    curvature_endo,
    leading_minors_positive,
    metric_jets,
    riemann,
    validate_curvature,
)


def constant_curvature_lowered(g, K):
    """Closed-form lowered Riemann tensor of a constant-curvature space.

    Sign convention fixed by the positive-Ricci requirement:
    R_{jbca} = K (g_{ja} g_{bc} - g_{jc} g_{ba}), so Ric = (n-1) K g.
    """
    return K * (np.einsum("...ja,...bc->...jbca", g, g)
                - np.einsum("...jc,...ba->...jbca", g, g))


def test_flat_metric_vanishes():
    m = metrics.flat_torus(3)
    pts = m.box.sample_interior(np.random.default_rng(0), 10)
    gam = christoffel(m, pts)
    assert np.max(np.abs(gam)) == 0.0
    pack = riemann(m, pts)
    assert np.max(np.abs(pack.riemann_down)) == 0.0
    assert np.max(np.abs(pack.ricci)) == 0.0


def test_sphere_christoffels_at_pi_over_3():
    m = metrics.round_sphere(2)
    gam = christoffel(m, ChartPoint(np.array([np.pi / 3, 0.3])))
    # Gamma^theta_{phi phi} = -sin cos = -sqrt(3)/4; Gamma^phi_{theta phi} = cot
    assert gam[0, 1, 1] == pytest.approx(-np.sqrt(3) / 4, abs=1e-13)
    assert gam[1, 0, 1] == pytest.approx(1 / np.sqrt(3), abs=1e-13)
    assert gam[1, 1, 0] == gam[1, 0, 1]


@pytest.mark.parametrize("n,r", [(2, 1.0), (3, 1.0), (3, 2.0), (5, 1.0)])
def test_round_sphere_constant_curvature(n, r):
    m = metrics.round_sphere(n, r)
    pts = m.box.sample_interior(np.random.default_rng(n), 20)
    pack = riemann(m, pts)
    closed = constant_curvature_lowered(pack.g, 1.0 / r**2)
    scale = np.max(np.abs(closed))
    assert np.max(np.abs(pack.riemann_down - closed)) / scale < 1e-9
    # positive Ricci, Einstein constant (n-1)/r^2
    ric_residual = np.max(np.abs(pack.ricci - (n - 1) / r**2 * pack.g))
    assert ric_residual / np.max(np.abs(pack.g)) < 1e-9


def _fd_metric_derivatives(metric, x0, h=1e-5):
    """Metric first/second derivatives by central differences of values only."""
    n = metric.dim

    def g_at(x):
        g, _, _ = metric_jets(metric, x)
        return g

    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    for c in range(n):
        ec = np.zeros(n)
        ec[c] = h
        dg[:, :, c] = (g_at(x0 + ec) - g_at(x0 - ec)) / (2 * h)
        for d in range(n):
            ed = np.zeros(n)
            ed[d] = h
            d2g[:, :, c, d] = (g_at(x0 + ec + ed) - g_at(x0 + ec - ed)
                               - g_at(x0 - ec + ed) + g_at(x0 - ec - ed)) / (4 * h * h)
    return g_at(x0), dg, d2g


def _fd_curvature(metric, x0):
    """Independent Christoffel/Riemann assembly from finite differences."""
    g, dg, d2g = _fd_metric_derivatives(metric, x0)
    n = metric.dim
    ginv = np.linalg.inv(g)
    gamma = 0.5 * np.einsum(
        "ae,ebc->abc", ginv,
        np.swapaxes(dg, -1, -2) + dg - np.moveaxis(dg, -1, -3))

    # d_j Gamma^a_bc by differencing the whole Christoffel construction
    h = 1e-4
    dgamma = np.zeros((n, n, n, n))
    for j in range(n):
        ej = np.zeros(n)
        ej[j] = h
        gp, dgp, _ = _fd_metric_derivatives(metric, x0 + ej)
        gm, dgm, _ = _fd_metric_derivatives(metric, x0 - ej)
        gam_p = 0.5 * np.einsum("ae,ebc->abc", np.linalg.inv(gp),
                                np.swapaxes(dgp, -1, -2) + dgp - np.moveaxis(dgp, -1, -3))
        gam_m = 0.5 * np.einsum("ae,ebc->abc", np.linalg.inv(gm),
                                np.swapaxes(dgm, -1, -2) + dgm - np.moveaxis(dgm, -1, -3))
        dgamma[j] = (gam_p - gam_m) / (2 * h)

    rup = (np.einsum("jabc->jbca", dgamma) - np.einsum("bajc->jbca", dgamma)
           + np.einsum("aje,ebc->jbca", gamma, gamma)
           - np.einsum("abe,ejc->jbca", gamma, gamma))
    return gamma, rup


@pytest.mark.parametrize("case", ["sphere", "family"])
def test_finite_difference_oracle_confirms_jet_route(case):
    if case == "sphere":
        metric = metrics.round_sphere(2)
        x0 = np.array([np.pi / 3, 1.0])
    else:
        metric = metrics.ypq_metric(metrics.solve_ypq(7, 3))
        x0 = np.array([1.0, 1.2, 2.0, 0.1, 0.5])
    gamma_fd, rup_fd = _fd_curvature(metric, x0)
    gamma = christoffel(metric, x0)
    pack = riemann(metric, x0)
    gscale = max(np.max(np.abs(gamma)), 1.0)
    rscale = max(np.max(np.abs(pack.riemann_up)), 1.0)
    assert np.max(np.abs(gamma - gamma_fd)) / gscale < 1e-6
    assert np.max(np.abs(pack.riemann_up - rup_fd)) / rscale < 1e-4


def test_metric_compatibility_y73():
    m = metrics.ypq_metric(metrics.solve_ypq(7, 3))
    x = np.array([1.0, 1.2, 2.0, 0.1, 0.5])
    g, dg, _ = metric_jets(m, x)
    pack = riemann(m, x)
    res = geometry.metric_compatibility_residual(pack, dg)
    assert np.max(np.abs(res)) < 1e-9


def test_curvature_endo_properties():
    m = metrics.ypq_metric(metrics.solve_ypq(7, 3))
    rng = np.random.default_rng(1)
    pack = riemann(m, m.box.sample_interior(rng, 30))
    X = rng.standard_normal(5)
    Y = rng.standard_normal(5)

    om = curvature_endo(pack, X, Y)
    scale = np.max(np.abs(om))
    assert np.max(np.abs(om + curvature_endo(pack, Y, X))) / scale < 1e-12
    assert np.max(np.abs(curvature_endo(pack, X, X))) / scale < 1e-12
    # bilinearity
    assert np.max(np.abs(curvature_endo(pack, 2 * X, 3 * Y) - 6 * om)) / scale < 1e-12
    # lowered skewness
    low = np.einsum("...ae,...eb->...ab", pack.g, om)
    assert np.max(np.abs(low + np.swapaxes(low, -1, -2))) / np.max(np.abs(low)) < 1e-10


def test_flat_endo_zero():
    m = metrics.flat_torus(5)
    pack = riemann(m, m.box.sample_interior(np.random.default_rng(0), 4))
    om = curvature_endo(pack, np.ones(5), np.arange(5.0))
    assert np.max(np.abs(om)) == 0.0


def test_validate_curvature_reports():
    rng = np.random.default_rng(7)
    flat = validate_curvature(metrics.flat_torus(3),
                              metrics.flat_torus(3).box.sample_interior(rng, 10))
    assert flat.passed
    assert all(v == 0.0 for v in flat.residuals.values())

    s5 = metrics.round_sphere(5)
    rep = validate_curvature(s5, s5.box.sample_interior(rng, 20))
    assert rep.passed

    y73 = metrics.ypq_metric(metrics.solve_ypq(7, 3))
    rep = validate_curvature(y73, y73.box.sample_interior(rng, 100))
    assert rep.passed
    assert set(rep.residuals) == {
        "gamma_symmetry", "metric_compat", "antisym_first_pair",
        "antisym_second_pair", "pair_swap", "first_bianchi", "ricci_symmetry"}


def test_validate_rejects_exterior_points():
    m = metrics.round_sphere(2)
    with pytest.raises(geometry.ChartDomainError):
        validate_curvature(m, np.array([[4.0, 1.0]]))


def test_singular_metric_guard():
    m = metrics.round_sphere(2)
    with pytest.raises(SingularMetricError):
        christoffel(m, np.array([1e-9, 1.0]))


def test_jet_matrix_symmetry_is_bit_exact():
    m = metrics.ypq_metric(metrics.solve_ypq(7, 3))
    rows = m.jet_matrix(np.array([1.0, 1.2, 2.0, 0.1, 0.5]))
    for a in range(5):
        for b in range(5):
            assert rows[a][b] is rows[b][a]


def test_leading_minors_positive():
    good = np.array([[2.0, 0.5], [0.5, 1.0]])
    bad = np.array([[1.0, 2.0], [2.0, 1.0]])
    assert leading_minors_positive(good)
    assert not leading_minors_positive(bad)
