"""Fisher information over the channel parameters and the position-domain bounds.

The per-subcarrier signal derivative matrix factors into a subcarrier-
independent column part and a per-subcarrier scalar, so the information
matrix over the channel parameters reduces to

    J_eta = (2 P_tx / (N0 B)) * Re[ (V^H V) o (s^H s) ],

with ``V`` holding one receive-side vector per parameter column, ``s`` the
per-subcarrier scalars, and ``o`` the elementwise product. The position-
domain matrix is J = T J_eta T^T for the 3-row Jacobian T; the error bounds
come from the inverse: peb = sqrt(tr(inv(J)[0:2, 0:2])), reb =
sqrt(inv(J)[2, 2]).

Two position-domain modes are provided. ``PAPER`` applies the 3-row T as
is, whose gain columns are zero (gains enter J_eta but are treated as known
in the transform). ``EFIM`` augments T with identity rows for the gain
blocks and removes them again by Schur complement, i.e. the gains are
nuisance parameters; its bounds are never below the ``PAPER`` ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .channel import (
    ChannelRealization,
    PhaseProfile,
    Precoder,
    SignalModel,
    TWO_PI,
    _check_profile,
    channel_realization,
    default_precoder,
    steer_upa,
)
from .errors import InvariantError, SingularFim
from .geometry import (
    GeometryOut,
    JacobianT,
    ParamLayout,
    Scenario,
    compute_geometry,
    jacobian_T,
)

_MAX_CONDITION = 1e12


class FimMode(Enum):
    PAPER = "paper"
    EFIM = "efim"


@dataclass(frozen=True, eq=False)
class ChannelParams:
    """Ordered channel-parameter vector; block layout per :class:`ParamLayout`."""

    tau: np.ndarray        # (K+1,) delays [s]
    theta_tx0: float       # BS departure angle toward the user [rad]
    theta_rx: np.ndarray   # (K+1,) user arrival angles [rad]
    phi_out_a: np.ndarray  # (K,) panel departure azimuths [rad]
    phi_out_e: np.ndarray  # (K,) panel departure elevations [rad]
    h_r: np.ndarray        # (K+1,) gain real parts
    h_i: np.ndarray        # (K+1,) gain imaginary parts

    @property
    def k(self) -> int:
        return len(self.tau) - 1

    @property
    def h(self) -> np.ndarray:
        return self.h_r + 1j * self.h_i

    @classmethod
    def from_geometry(cls, geometry: GeometryOut,
                      realization: ChannelRealization) -> "ChannelParams":
        return cls(
            tau=np.array(geometry.tau),
            theta_tx0=float(geometry.theta_tx0),
            theta_rx=np.array(geometry.theta_rx),
            phi_out_a=np.array(geometry.phi_out_a),
            phi_out_e=np.array(geometry.phi_out_e),
            h_r=realization.h.real.copy(),
            h_i=realization.h.imag.copy(),
        )

    @classmethod
    def from_vector(cls, vec, k: int) -> "ChannelParams":
        vec = np.asarray(vec, dtype=float)
        layout = ParamLayout(k)
        if vec.shape != (layout.size,):
            raise InvariantError(f"parameter vector must have length {layout.size}")
        return cls(
            tau=vec[layout.tau].copy(),
            theta_tx0=float(vec[layout.theta_tx0]),
            theta_rx=vec[layout.theta_rx].copy(),
            phi_out_a=vec[layout.phi_out_a].copy(),
            phi_out_e=vec[layout.phi_out_e].copy(),
            h_r=vec[layout.h_r].copy(),
            h_i=vec[layout.h_i].copy(),
        )

    def to_vector(self) -> np.ndarray:
        layout = ParamLayout(self.k)
        vec = np.empty(layout.size)
        vec[layout.tau] = self.tau
        vec[layout.theta_tx0] = self.theta_tx0
        vec[layout.theta_rx] = self.theta_rx
        vec[layout.phi_out_a] = self.phi_out_a
        vec[layout.phi_out_e] = self.phi_out_e
        vec[layout.h_r] = self.h_r
        vec[layout.h_i] = self.h_i
        return vec


@dataclass(frozen=True, eq=False)
class FisherResult:
    """Information matrices and the derived error bounds."""

    j_eta: np.ndarray   # (6K+5, 6K+5) channel-parameter information
    T: JacobianT
    j: np.ndarray       # 3x3 position-domain information
    peb: float          # position error bound [m]
    reb: float          # rotation error bound [rad]
    mode: FimMode


@dataclass(frozen=True, eq=False)
class _ColumnParts:
    """Phase-independent factorization of the derivative columns.

    Column m of the derivative matrix at subcarrier n is
    ``U[:, m] * sigma_static[m] * cascade_factor[m] * s[n, m]`` where the
    cascade factor is selected by ``casc_slot`` (slot -1 means no panel is
    involved) and ``s`` carries the subcarrier dependence.
    """

    layout: ParamLayout
    U: np.ndarray            # (N_r, P) receive-side column vectors
    sigma_static: np.ndarray  # (P,) phase-independent scalars
    path_idx: np.ndarray     # (P,) path index per column (0 = direct)
    is_delay: np.ndarray     # (P,) True on delay columns (extra j*omega_n)
    casc_slot: np.ndarray    # (P,) index into the cascade vector, -1 for none
    cascade_weights: tuple   # 3 weight vectors per panel: plain, d/az, d/el


def _column_parts(model: SignalModel, params) -> _ColumnParts:
    """Assemble the phase-independent column factors for given parameters."""
    k = model.k
    layout = ParamLayout(k)
    p = layout.size
    kappa = TWO_PI / model.lam

    h = np.asarray(params.h_r) + 1j * np.asarray(params.h_i)
    gains = model.gamma * h

    # receive-side response and its angle derivative per path
    ants = np.arange(model.n_r)
    theta_rx = np.asarray(params.theta_rx)
    a_rx = np.exp(1j * kappa * model.d * np.outer(np.sin(theta_rx), ants))
    d_rx = (1j * kappa * model.d * np.cos(theta_rx)[:, None]) * ants * a_rx

    # transmit-side beam scalars; the one toward the user moves with theta_tx0
    a_tx0 = np.exp(1j * kappa * model.d * np.sin(params.theta_tx0) * np.arange(model.n_t))
    d_tx0 = (1j * kappa * model.d * np.cos(params.theta_tx0)) * np.arange(model.n_t) * a_tx0
    beams = np.concatenate(([a_tx0.conj() @ model.fx], model.beam_ris))
    beam_tx_deriv = d_tx0.conj() @ model.fx

    # panel-side cascade weights: w = conj(a_out) o a_in and its two
    # departure-angle derivative weightings
    weights = []
    for i in range(k):
        L = model.sides[i]
        az, el = params.phi_out_a[i], params.phi_out_e[i]
        a_out = steer_upa(az, el, L, model.d, model.lam)
        a = np.tile(np.arange(L), L)
        b = np.repeat(np.arange(L), L)
        c_az = 1j * kappa * model.d * a * np.cos(az) * np.sin(el)
        c_el = 1j * kappa * model.d * (a * np.sin(az) * np.cos(el) - b * np.sin(el))
        w = a_out.conj() * model.a_in[i]
        weights.append((w, c_az.conj() * w, c_el.conj() * w))

    U = np.empty((model.n_r, p), dtype=complex)
    sigma = np.empty(p, dtype=complex)
    path_idx = np.empty(p, dtype=int)
    is_delay = np.zeros(p, dtype=bool)
    casc_slot = np.full(p, -1, dtype=int)

    def put(col, vec, scal, path, delay=False, slot=-1):
        U[:, col] = vec
        sigma[col] = scal
        path_idx[col] = path
        is_delay[col] = delay
        casc_slot[col] = slot

    for j in range(k + 1):
        slot = -1 if j == 0 else 3 * (j - 1)
        put(layout.tau.start + j, a_rx[j], gains[j] * beams[j], j, delay=True, slot=slot)
        put(layout.theta_rx.start + j, d_rx[j], gains[j] * beams[j], j, slot=slot)
        put(layout.h_r.start + j, a_rx[j], model.gamma[j] * beams[j], j, slot=slot)
        put(layout.h_i.start + j, a_rx[j], 1j * model.gamma[j] * beams[j], j, slot=slot)

    put(layout.theta_tx0, a_rx[0], gains[0] * beam_tx_deriv, 0)

    for i in range(k):
        put(layout.phi_out_a.start + i, a_rx[1 + i],
            gains[1 + i] * beams[1 + i], 1 + i, slot=3 * i + 1)
        put(layout.phi_out_e.start + i, a_rx[1 + i],
            gains[1 + i] * beams[1 + i], 1 + i, slot=3 * i + 2)

    return _ColumnParts(layout=layout, U=U, sigma_static=sigma, path_idx=path_idx,
                        is_delay=is_delay, casc_slot=casc_slot,
                        cascade_weights=tuple(weights))


def _cascade_factors(parts: _ColumnParts, phases: PhaseProfile) -> np.ndarray:
    """Per-panel cascade scalars (plain, d/azimuth, d/elevation), flattened."""
    out = np.empty(3 * len(parts.cascade_weights), dtype=complex)
    for i, (w, wa, we) in enumerate(parts.cascade_weights):
        e = np.exp(1j * phases.theta[i])
        out[3 * i] = phases.delta * (w @ e)
        out[3 * i + 1] = phases.delta * (wa @ e)
        out[3 * i + 2] = phases.delta * (we @ e)
    return out


def _sigma(parts: _ColumnParts, phases: PhaseProfile) -> np.ndarray:
    factors = _cascade_factors(parts, phases)
    sigma = parts.sigma_static.copy()
    mask = parts.casc_slot >= 0
    sigma[mask] *= factors[parts.casc_slot[mask]]
    return sigma


def _subcarrier_scalars(model: SignalModel, tau, parts: _ColumnParts) -> np.ndarray:
    """Per-subcarrier column scalars, shape (N, P); n runs 1..N."""
    n = np.arange(1, model.n_sub + 1)
    omega = TWO_PI * model.bandwidth * n / model.n_sub
    s = np.exp(1j * np.outer(omega, np.asarray(tau)))[:, parts.path_idx]
    s[:, parts.is_delay] *= 1j * omega[:, None]
    return s


def _fim_prefactor(scenario: Scenario) -> float:
    radio = scenario.radio
    return 2.0 * radio.P_tx / (radio.N0 * radio.B)


def mu_derivatives(scenario: Scenario, geometry: GeometryOut, phases: PhaseProfile,
                   realization: ChannelRealization, n: int,
                   precoder: Precoder | None = None) -> np.ndarray:
    """Analytic derivative of mu[n] w.r.t. every channel parameter.

    Returns a complex (N_r, 6K+5) matrix whose column order follows
    :class:`ParamLayout`.
    """
    if not (1 <= n <= scenario.radio.N):
        raise InvariantError(f"subcarrier index must lie in 1..{scenario.radio.N}")
    model = SignalModel(scenario, geometry, realization, precoder)
    params = ChannelParams.from_geometry(geometry, realization)
    parts = _column_parts(model, params)
    sigma = _sigma(parts, phases)
    s = _subcarrier_scalars(model, geometry.tau, parts)[n - 1]
    return parts.U * (sigma * s)[None, :]


def fim_eta(scenario: Scenario, phases: PhaseProfile,
            realization: ChannelRealization | None = None, *,
            geometry: GeometryOut | None = None,
            precoder: Precoder | None = None) -> np.ndarray:
    """Information matrix over the channel parameters, shape (6K+5, 6K+5)."""
    return BoundEvaluator(scenario, geometry=geometry, realization=realization,
                          precoder=precoder).fim_eta(phases)


def peb_reb_from_fim(j: np.ndarray) -> tuple[float, float]:
    """Error bounds from a 3x3 position-domain information matrix.

    Inverts via a symmetric eigendecomposition; raises :class:`SingularFim`
    on a non-positive eigenvalue or a condition number above 1e12.
    """
    j = np.asarray(j, dtype=float)
    evals, evecs = np.linalg.eigh(0.5 * (j + j.T))
    lo, hi = evals[0], evals[-1]
    if lo <= 0.0 or hi / lo > _MAX_CONDITION:
        raise SingularFim(
            f"position FIM is singular (eigenvalues {lo:.3e} .. {hi:.3e})")
    inv = (evecs / evals) @ evecs.T
    return float(np.sqrt(inv[0, 0] + inv[1, 1])), float(np.sqrt(inv[2, 2]))


def position_fim(j_eta: np.ndarray, T: JacobianT,
                 mode: FimMode = FimMode.PAPER) -> FisherResult:
    """Transform channel-parameter information to the position domain."""
    j_eta = np.asarray(j_eta, dtype=float)
    layout = T.layout
    if j_eta.shape != (layout.size, layout.size):
        raise InvariantError(
            f"J_eta must be {layout.size}x{layout.size} for K={layout.k}")
    t = T.T
    j3 = t @ j_eta @ t.T

    if mode is FimMode.EFIM:
        h_start = layout.h_r.start
        b = t @ j_eta[:, h_start:]
        d = j_eta[h_start:, h_start:]
        try:
            cho = scipy.linalg.cho_factor(d, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise SingularFim("gain block of J_eta is not positive definite") from exc
        j3 = j3 - b @ scipy.linalg.cho_solve(cho, b.T, check_finite=False)

    peb, reb = peb_reb_from_fim(j3)
    return FisherResult(j_eta=j_eta, T=T, j=j3, peb=peb, reb=reb, mode=mode)


class BoundEvaluator:
    """Repeated-bound evaluator for a fixed scenario.

    Precomputes the geometry, link budget, Jacobian, and every phase-
    independent factor of the information matrix, so evaluating a new phase
    profile costs a handful of small dense products. Used by the optimizer.
    """

    def __init__(self, scenario: Scenario, mode: FimMode = FimMode.PAPER, *,
                 geometry: GeometryOut | None = None,
                 realization: ChannelRealization | None = None,
                 precoder: Precoder | None = None):
        self.scenario = scenario
        self.mode = mode
        self.geometry = geometry if geometry is not None else compute_geometry(scenario)
        self.realization = (realization if realization is not None
                            else channel_realization(scenario, self.geometry))
        self.precoder = (precoder if precoder is not None
                         else default_precoder(scenario, self.geometry))
        self.model = SignalModel(scenario, self.geometry, self.realization, self.precoder)
        self.params = ChannelParams.from_geometry(self.geometry, self.realization)
        self.jacobian = jacobian_T(scenario, self.geometry)
        self.prefactor = _fim_prefactor(scenario)

        self._parts = _column_parts(self.model, self.params)
        s = _subcarrier_scalars(self.model, self.geometry.tau, self._parts)
        # J_eta = prefactor * Re[ conj(sigma) sigma^T o (U^H U o s^H s) ]
        self._M = (self._parts.U.conj().T @ self._parts.U) * (s.conj().T @ s)

    def fim_eta(self, phases: PhaseProfile) -> np.ndarray:
        _check_profile(self.scenario, phases)
        sigma = _sigma(self._parts, phases)
        return self.prefactor * (self._M * np.outer(sigma.conj(), sigma)).real

    def fisher(self, phases: PhaseProfile) -> FisherResult:
        return position_fim(self.fim_eta(phases), self.jacobian, self.mode)

    def bounds(self, phases: PhaseProfile) -> tuple[float, float]:
        """(peb, reb) for one phase profile."""
        result = self.fisher(phases)
        return result.peb, result.reb


def evaluate_bounds(scenario: Scenario, phases: PhaseProfile,
                    mode: FimMode = FimMode.PAPER, *,
                    geometry: GeometryOut | None = None,
                    realization: ChannelRealization | None = None,
                    precoder: Precoder | None = None) -> FisherResult:
    """One-shot scenario evaluation: J_eta, position-domain J, PEB, REB."""
    return BoundEvaluator(scenario, mode, geometry=geometry,
                          realization=realization, precoder=precoder).fisher(phases)
