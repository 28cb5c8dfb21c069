import dataclasses

import numpy as np
import pytest

import risbound as rb


@pytest.fixture(scope="session")
def paper_scenario():
    return rb.load_scenario(rb.bundled_scenario_path())


@pytest.fixture(scope="session")
def shrunk_scenario(paper_scenario):
    """Bundled scenario shrunk to desk size: N_t=8, N_r=4, L=4, N=16, K=3."""
    return shrink(paper_scenario)


def shrink(scenario, n_t=8, n_r=4, side=4, n_sub=16):
    radio = dataclasses.replace(scenario.radio, N_t=n_t, N_r=n_r, N=n_sub)
    panels = tuple(dataclasses.replace(p, L=side) for p in scenario.ris)
    return dataclasses.replace(scenario, radio=radio, ris=panels)


def small_radio(k, n_t=8, n_r=4, n_sub=16):
    return rb.RadioConfig(f_c=4.9e9, B=2.0e7, N=n_sub, N_t=n_t, N_r=n_r, M_t=k + 1)


def random_scenario(rng, k=None, side=4, n_t=8, n_r=4, n_sub=16):
    """Well-separated random placement, safe for finite differencing.

    Margins keep every Jacobian denominator bounded away from zero: node
    heights floor the arcsin denominators, horizontal offsets floor the
    azimuth/elevation ones, and |p_x - s_kx| stays away from the azimuth
    parameterization seam.
    """
    if k is None:
        k = int(rng.integers(1, 4))
    q = np.array([0.0, 0.0, rng.uniform(20.0, 50.0)])
    while True:
        p = np.array([rng.uniform(30.0, 120.0), rng.uniform(-60.0, 60.0), 0.0])
        if abs(p[0] - q[0]) > 5.0 and np.hypot(p[0] - q[0], p[1] - q[1]) > 10.0:
            break
    panels = []
    while len(panels) < k:
        s = np.array([rng.uniform(10.0, 110.0), rng.uniform(-50.0, 70.0),
                      rng.uniform(3.0, 25.0)])
        if abs(p[0] - s[0]) < 2.0:
            continue
        if np.hypot(p[0] - s[0], p[1] - s[1]) < 5.0:
            continue
        if np.hypot(q[0] - s[0], q[1] - s[1]) < 5.0:
            continue
        if any(np.linalg.norm(s - other.s) < 5.0 for other in panels):
            continue
        panels.append(rb.RisPanel(s=s, L=side))
    return rb.Scenario(
        q=q, p=p, alpha=float(rng.uniform(0.1, np.pi)),
        ris=tuple(panels),
        radio=small_radio(k, n_t=n_t, n_r=n_r, n_sub=n_sub),
        scenario_id="random",
    )


def eta_geometry_vector(scenario):
    """Geometry-derived channel-parameter blocks (gain blocks zero)."""
    g = rb.compute_geometry(scenario)
    lay = rb.ParamLayout(scenario.K)
    v = np.zeros(lay.size)
    v[lay.tau] = g.tau
    v[lay.theta_tx0] = g.theta_tx0
    v[lay.theta_rx] = g.theta_rx
    v[lay.phi_out_a] = g.phi_out_a
    v[lay.phi_out_e] = g.phi_out_e
    return v


def fd_jacobian(scenario):
    """Central finite differences of the geometric map w.r.t. (p_x, p_y, alpha)."""
    rows = []
    for which in range(3):
        coord = {0: scenario.p[0], 1: scenario.p[1], 2: scenario.alpha}[which]
        h = 1e-6 * max(1.0, abs(coord))

        def shifted(eps):
            if which == 0:
                return dataclasses.replace(
                    scenario, p=np.array([scenario.p[0] + eps, scenario.p[1], 0.0]))
            if which == 1:
                return dataclasses.replace(
                    scenario, p=np.array([scenario.p[0], scenario.p[1] + eps, 0.0]))
            return dataclasses.replace(scenario, alpha=scenario.alpha + eps)

        rows.append((eta_geometry_vector(shifted(h))
                     - eta_geometry_vector(shifted(-h))) / (2 * h))
    return np.stack(rows)


def assert_matches_fd(analytic, fd, rel=1e-5, abs_floor=1e-9, small=1e-6):
    """Entrywise FD comparison: relative above ``small``, absolute below."""
    analytic = np.asarray(analytic)
    fd = np.asarray(fd)
    err = np.abs(fd - analytic)
    big = np.abs(analytic) >= small
    assert np.all(err[~big] < abs_floor), f"absolute error {err[~big].max():.3e}"
    rel_err = err[big] / np.abs(analytic[big])
    if rel_err.size:
        assert rel_err.max() < rel, f"relative error {rel_err.max():.3e}"
