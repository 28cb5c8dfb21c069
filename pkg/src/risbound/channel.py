"""Steering vectors, path loss, RIS phase profiles, and the received-signal model.

The noiseless per-subcarrier mean received signal is

    mu[n] = (H_0[n] + sum_k H_k[n]) F x[n],    n = 1..N,

where ``H_0`` is the direct rank-1 link, ``H_k`` the cascade through panel k
(arrival response at the panel, diagonal phase-shift matrix, departure
response toward the user), and each link carries a subcarrier factor
``exp(j 2 pi B (n/N) tau_k)``. The transmit power is *not* folded into mu;
it enters through the Fisher-information prefactor instead, which keeps the
power-scaling laws exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .errors import ConfigError, InvariantError
from .geometry import (
    GeometryOut,
    Scenario,
    ShadowingMode,
    compute_geometry,
)

TWO_PI = 2.0 * np.pi

# fixed dB offset of the log-distance path-loss model (GHz-referenced)
_PL_CONST_DB = 10.0 * np.log10(64.0 * np.pi ** 3)


def wrap_phase(theta):
    """Wrap angles into the canonical interval [0, 2*pi)."""
    return np.mod(theta, TWO_PI)


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Per-panel element phase shifts plus the common reflection amplitude."""

    theta: tuple[np.ndarray, ...] = ()  # one wrapped vector of length L_k**2 per panel
    delta: float = 1.0                  # reflection amplitude, in (0, 1]

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise InvariantError("phase-profile amplitude delta must lie in (0, 1]")
        wrapped = tuple(_frozen_wrapped(t) for t in self.theta)
        object.__setattr__(self, "theta", wrapped)

    def to_vector(self) -> np.ndarray:
        """All phases concatenated in panel order."""
        if not self.theta:
            return np.empty(0)
        return np.concatenate(self.theta)

    @classmethod
    def from_vector(cls, vec, sizes, delta: float = 1.0) -> "PhaseProfile":
        """Split a flat vector into per-panel blocks of the given sizes."""
        vec = np.asarray(vec, dtype=float)
        if vec.size != sum(sizes):
            raise InvariantError(
                f"phase vector has {vec.size} entries, panels need {sum(sizes)}")
        out, start = [], 0
        for n in sizes:
            out.append(vec[start:start + n])
            start += n
        return cls(theta=tuple(out), delta=delta)


def _frozen_wrapped(theta) -> np.ndarray:
    arr = wrap_phase(np.asarray(theta, dtype=float))
    arr.flags.writeable = False
    return arr


def profile_sizes(scenario: Scenario) -> list[int]:
    """Element counts per panel, the block sizes of a matching PhaseProfile."""
    return [panel.n_elements for panel in scenario.ris]


def _check_profile(scenario: Scenario, phases: PhaseProfile):
    sizes = profile_sizes(scenario)
    if len(phases.theta) != len(sizes):
        raise InvariantError(
            f"profile has {len(phases.theta)} panels, scenario has {len(sizes)}")
    for k, (t, n) in enumerate(zip(phases.theta, sizes)):
        if t.size != n:
            raise InvariantError(f"panel {k} profile has {t.size} phases, expected {n}")


def steer_ula(angle: float, n_elems: int, d: float, lam: float) -> np.ndarray:
    """Response of an n-element uniform linear array.

    Entry i (0-based) is exp(j * i * (2 pi / lam) * d * sin(angle)); the
    first entry is always 1.
    """
    idx = np.arange(n_elems)
    return np.exp(1j * (TWO_PI / lam) * d * np.sin(angle) * idx)


def steer_upa(azimuth: float, elevation: float, L: int, d: float, lam: float) -> np.ndarray:
    """Response of an L x L uniform planar array, flattened.

    Element (a, b) with a, b in 1..L sits at flat index a + (b-1)L and has
    phase (2 pi / lam) * d * ((b-1) cos(el) + (a-1) sin(el) sin(az)).
    """
    a = np.tile(np.arange(L), L)    # a - 1, fastest-varying
    b = np.repeat(np.arange(L), L)  # b - 1
    phase = (TWO_PI / lam) * d * (b * np.cos(elevation) + a * np.sin(elevation) * np.sin(azimuth))
    return np.exp(1j * phase)


def los_path_loss(d0: float, f_c: float, alpha_0: float, shadow_db: float = 0.0):
    """Direct-link path loss; returns (pl_db, rho_linear).

    The model is referenced to the carrier in GHz; ``f_c`` is taken in Hz
    and converted internally.
    """
    if d0 <= 0.0:
        raise InvariantError("path-loss distance must be positive")
    f_ghz = f_c / 1e9
    pl_db = _PL_CONST_DB + 10.0 * alpha_0 * np.log10(d0) + 20.0 * np.log10(f_ghz) + shadow_db
    return pl_db, 10.0 ** (pl_db / 10.0)


def ris_path_loss(d1: float, d2: float, f_c: float, alpha_k: float, shadow_db: float = 0.0):
    """Reflected-link path loss over the two legs; returns (pl_db, rho_linear)."""
    if d1 <= 0.0 or d2 <= 0.0:
        raise InvariantError("path-loss distances must be positive")
    f_ghz = f_c / 1e9
    pl_db = _PL_CONST_DB + 10.0 * alpha_k * np.log10(d1 * d2) + 40.0 * np.log10(f_ghz) + shadow_db
    return pl_db, 10.0 ** (pl_db / 10.0)


def sample_shadowing(scenario: Scenario, seed: int | None = None) -> np.ndarray:
    """Per-link shadow-fading offsets in dB, shape (K+1,).

    Deterministic mode returns zeros. Sampled mode draws one Gaussian per
    link from a generator keyed by (seed, link index), so the value is
    reused across subcarriers and reproducible.
    """
    k = scenario.K
    if scenario.pathloss.shadowing is ShadowingMode.DETERMINISTIC:
        return np.zeros(k + 1)
    if seed is None:
        seed = scenario.pathloss.shadow_seed
    sigmas = [scenario.pathloss.sigma_sf_0] + [panel.sigma_sf_k for panel in scenario.ris]
    out = np.empty(k + 1)
    for link, sigma in enumerate(sigmas):
        rng = np.random.default_rng([int(seed), link])
        out[link] = rng.normal(0.0, sigma)
    return out


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Path losses, normalization factors, and complex gains per path."""

    rho: np.ndarray     # linear path losses, shape (K+1,)
    gamma: np.ndarray   # sqrt(N_t * N_r / rho), shape (K+1,)
    h: np.ndarray       # complex channel gains, shape (K+1,)
    pl_db: np.ndarray   # path losses in dB, shape (K+1,)


def channel_realization(scenario: Scenario, geometry: GeometryOut | None = None,
                        h=None, shadow_seed: int | None = None) -> ChannelRealization:
    """Evaluate the link budget for every path.

    Gains default to 1 + 0j per path; the energy normalization is carried
    entirely by gamma.
    """
    if geometry is None:
        geometry = compute_geometry(scenario)
    k = scenario.K
    radio = scenario.radio
    shadow = sample_shadowing(scenario, shadow_seed)

    pl_db = np.empty(k + 1)
    rho = np.empty(k + 1)
    pl_db[0], rho[0] = los_path_loss(
        geometry.d0, radio.f_c, scenario.pathloss.alpha_0, shadow[0])
    for i, panel in enumerate(scenario.ris):
        pl_db[1 + i], rho[1 + i] = ris_path_loss(
            geometry.d1[i], geometry.d2[i], radio.f_c, panel.alpha_k, shadow[1 + i])

    gamma = np.sqrt(radio.N_t * radio.N_r / rho)
    if h is None:
        h = np.ones(k + 1, dtype=complex)
    else:
        h = np.asarray(h, dtype=complex)
        if h.shape != (k + 1,):
            raise InvariantError(f"channel gains must have shape ({k + 1},)")
    return ChannelRealization(rho=rho, gamma=gamma, h=h, pl_db=pl_db)


@dataclass(frozen=True, eq=False)
class Precoder:
    """Beamforming matrix with unit-norm columns and a unit-power pilot."""

    F: np.ndarray   # complex (N_t, M_t)
    x: np.ndarray   # complex (M_t,), constant across subcarriers (flat spectrum)

    def __post_init__(self):
        F = np.asarray(self.F, dtype=complex)
        x = np.asarray(self.x, dtype=complex)
        norms = np.linalg.norm(F, axis=0)
        if not np.allclose(norms, 1.0, atol=1e-9):
            raise ConfigError("every precoder column must have unit norm")
        if abs(np.linalg.norm(x) ** 2 - 1.0) > 1e-9:
            raise ConfigError("pilot must have unit power")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "x", x)

    @property
    def fx(self) -> np.ndarray:
        """Transmitted antenna-domain pilot F @ x."""
        return self.F @ self.x


def default_precoder(scenario: Scenario, geometry: GeometryOut | None = None) -> Precoder:
    """One beam per path: column 0 points at the user, column k at panel k.

    Requires M_t = K + 1; supply an explicit precoder for any other layout.
    """
    if geometry is None:
        geometry = compute_geometry(scenario)
    radio = scenario.radio
    if radio.M_t != scenario.K + 1:
        raise ConfigError(
            f"default precoder needs M_t = K+1 = {scenario.K + 1}, got M_t = {radio.M_t}")
    lam, d = radio.wavelength, radio.d
    cols = [steer_ula(geometry.theta_tx0, radio.N_t, d, lam)]
    cols += [steer_ula(t, radio.N_t, d, lam) for t in geometry.theta_tx_k]
    F = np.stack(cols, axis=1) / np.sqrt(radio.N_t)
    x = np.ones(radio.M_t, dtype=complex) / np.sqrt(radio.M_t)
    return Precoder(F=F, x=x)


def phase_matrix_diagonal(phases: PhaseProfile, k: int) -> np.ndarray:
    """Diagonal of the phase-shift matrix of panel k: delta * exp(j theta)."""
    return phases.delta * np.exp(1j * phases.theta[k])


def ris_cascade(a_in: np.ndarray, a_out: np.ndarray, theta: np.ndarray,
                delta: float = 1.0) -> complex:
    """Scalar cascade a_out^H Theta a_in through one panel."""
    return complex(delta * np.vdot(a_out, np.exp(1j * np.asarray(theta)) * a_in))


def channel_matrix(scenario: Scenario, geometry: GeometryOut, phases: PhaseProfile,
                   realization: ChannelRealization, n: int, path: int | None = None) -> np.ndarray:
    """Channel matrix H[n] (or a single path's term when ``path`` is given).

    Built literally from the response-vector outer products, so tests can
    compare it against the factored scalar-cascade form.
    """
    radio = scenario.radio
    if not (1 <= n <= radio.N):
        raise InvariantError(f"subcarrier index must lie in 1..{radio.N}")
    _check_profile(scenario, phases)
    lam, d = radio.wavelength, radio.d
    omega = TWO_PI * radio.B * n / radio.N

    def path_term(k: int) -> np.ndarray:
        carrier = np.exp(1j * omega * geometry.tau[k])
        g = realization.gamma[k] * realization.h[k]
        a_rx = steer_ula(geometry.theta_rx[k], radio.N_r, d, lam)
        if k == 0:
            a_tx = steer_ula(geometry.theta_tx0, radio.N_t, d, lam)
            return g * carrier * np.outer(a_rx, a_tx.conj())
        i = k - 1
        panel = scenario.ris[i]
        a_tx = steer_ula(geometry.theta_tx_k[i], radio.N_t, d, lam)
        a_in = steer_upa(geometry.phi_in_a[i], geometry.phi_in_e[i], panel.L, d, lam)
        a_out = steer_upa(geometry.phi_out_a[i], geometry.phi_out_e[i], panel.L, d, lam)
        h_bi = np.outer(a_in, a_tx.conj())
        h_im = np.outer(a_rx, a_out.conj())
        theta_diag = phase_matrix_diagonal(phases, i)
        return g * carrier * (h_im @ (theta_diag[:, None] * h_bi))

    if path is not None:
        return path_term(path)
    total = path_term(0)
    for k in range(1, scenario.K + 1):
        total += path_term(k)
    return total


def mean_signal(scenario: Scenario, geometry: GeometryOut, phases: PhaseProfile,
                realization: ChannelRealization, n: int,
                precoder: Precoder | None = None) -> np.ndarray:
    """Noiseless mean received signal mu[n] = H[n] F x (transmit power excluded)."""
    if precoder is None:
        precoder = default_precoder(scenario, geometry)
    H = channel_matrix(scenario, geometry, phases, realization, n)
    return H @ precoder.fx


class SignalModel:
    """Received-signal evaluator parameterized by the channel parameters.

    Precomputes everything that does not move with the estimated parameters
    (BS-side responses toward the panels, panel arrival responses, the
    transmitted pilot) and evaluates mu[n] for any channel-parameter values.
    Any object exposing ``tau``, ``theta_tx0``, ``theta_rx``, ``phi_out_a``,
    ``phi_out_e``, ``h_r``, and ``h_i`` works as the parameter argument.
    """

    def __init__(self, scenario: Scenario, geometry: GeometryOut,
                 realization: ChannelRealization, precoder: Precoder | None = None):
        if precoder is None:
            precoder = default_precoder(scenario, geometry)
        radio = scenario.radio
        self.k = scenario.K
        self.n_t = radio.N_t
        self.n_r = radio.N_r
        self.n_sub = radio.N
        self.bandwidth = radio.B
        self.lam = radio.wavelength
        self.d = radio.d
        self.gamma = realization.gamma
        self.precoder = precoder
        self.fx = precoder.fx
        self.sides = [panel.L for panel in scenario.ris]
        # constants of the deployment: BS-side departure angles and panel
        # arrival responses do not depend on the user state
        self.a_tx_ris = [steer_ula(t, radio.N_t, self.d, self.lam)
                         for t in geometry.theta_tx_k]
        self.a_in = [
            steer_upa(geometry.phi_in_a[i], geometry.phi_in_e[i], panel.L, self.d, self.lam)
            for i, panel in enumerate(scenario.ris)
        ]
        self.beam_ris = np.array([a.conj() @ self.fx for a in self.a_tx_ris])

    def params_from(self, geometry: GeometryOut, realization: ChannelRealization):
        """Channel-parameter view of a geometry plus gain realization."""
        return SimpleNamespace(
            tau=geometry.tau,
            theta_tx0=geometry.theta_tx0,
            theta_rx=geometry.theta_rx,
            phi_out_a=geometry.phi_out_a,
            phi_out_e=geometry.phi_out_e,
            h_r=realization.h.real.copy(),
            h_i=realization.h.imag.copy(),
        )

    def mu(self, params, phases: PhaseProfile, n: int) -> np.ndarray:
        """mu[n] for one subcarrier; n runs 1..N."""
        return self.mu_all(params, phases, np.array([n]))[0]

    def mu_all(self, params, phases: PhaseProfile, n=None) -> np.ndarray:
        """mu for the given subcarrier indices (default all), shape (len(n), N_r)."""
        if n is None:
            n = np.arange(1, self.n_sub + 1)
        n = np.asarray(n)
        omega = TWO_PI * self.bandwidth * n / self.n_sub          # (n,)
        h = np.asarray(params.h_r) + 1j * np.asarray(params.h_i)  # (K+1,)

        a_tx0 = steer_ula(params.theta_tx0, self.n_t, self.d, self.lam)
        beams = np.concatenate(([a_tx0.conj() @ self.fx], self.beam_ris))  # (K+1,)

        cascades = np.ones(self.k + 1, dtype=complex)
        for i in range(self.k):
            a_out = steer_upa(params.phi_out_a[i], params.phi_out_e[i],
                              self.sides[i], self.d, self.lam)
            cascades[1 + i] = ris_cascade(self.a_in[i], a_out, phases.theta[i], phases.delta)

        a_rx = np.exp(
            1j * (TWO_PI / self.lam) * self.d
            * np.outer(np.sin(params.theta_rx), np.arange(self.n_r)))  # (K+1, N_r)

        scale = self.gamma * h * cascades * beams                      # (K+1,)
        carrier = np.exp(1j * np.outer(omega, np.asarray(params.tau)))  # (n, K+1)
        return (carrier * scale) @ a_rx
