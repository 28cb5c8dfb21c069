"""Node geometry of a BS / multi-RIS / mobile-user positioning link.

Maps the node placement (BS array at ``q``, RIS panels at ``s_k``, user at
``p`` with ``p_z = 0`` and array rotation ``alpha``) to the channel
parameters observable at the receiver -- propagation delays, departure and
arrival angles at every array -- and to the Jacobian of those parameters
with respect to the user position and rotation.

Angle conventions (all radians):

* ``theta_tx0``     BS departure angle toward the user,
  ``arcsin((p_x - q_x) / |q - p|)``.
* ``theta_tx_k``    BS departure angle toward panel k (fixed constant of the
  deployment, mirrored formula with ``s_k`` in place of ``p``).
* ``theta_rx``      arrival angle at the user array, measured against the
  array rotated by ``alpha``; entry 0 is the direct path, entry k the path
  reflected by panel k.
* ``phi_in_a/e``    azimuth / elevation of arrival at panel k from the BS
  (fixed constants of the deployment).
* ``phi_out_a/e``   azimuth / elevation of departure at panel k toward the
  user; ``phi_out_e = arccos(s_kz / |p - s_k|)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateGeometry, InvariantError, SingularJacobian

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

# Node pairs closer than this are treated as coincident.
_MIN_SEPARATION = 1e-9
# |arg| may exceed 1 by at most this much before it is an error, not rounding.
_TRIG_TOL = 1e-12
# Jacobian denominators below this magnitude raise SingularJacobian.
_DENOM_TOL = 1e-12


class ShadowingMode(Enum):
    DETERMINISTIC = "deterministic"
    SAMPLED = "sampled"


def _vec3(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.shape != (3,):
        raise InvariantError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RisPanel:
    """One reflecting panel: a square L x L array of phase-shifting elements."""

    s: np.ndarray            # panel position [m]; s_z > 0
    L: int                   # side element count; the panel carries L**2 elements
    alpha_k: float = 2.2     # path-loss exponent of the reflected link
    sigma_sf_k: float = 7.0  # shadow-fading standard deviation [dB]

    def __post_init__(self):
        object.__setattr__(self, "s", _vec3(self.s, "RIS position"))
        if int(self.L) != self.L or self.L < 1:
            raise InvariantError(f"RIS side length L must be a positive integer, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        if self.s[2] <= 0.0:
            raise InvariantError("RIS height s_z must be strictly positive")

    @property
    def n_elements(self) -> int:
        return self.L * self.L


@dataclass(frozen=True)
class RadioConfig:
    """Carrier, bandwidth, array sizes, and link-budget constants (SI units)."""

    f_c: float               # carrier frequency [Hz]
    B: float                 # bandwidth [Hz]
    N: int                   # OFDM subcarrier count
    N_t: int                 # BS antenna count (ULA)
    N_r: int                 # user antenna count (ULA)
    M_t: int                 # transmit beam count, M_t <= N_t
    P_tx: float = 1.0        # transmit power [W] (1 W = 30 dBm)
    N0: float = 10.0 ** (-20.4)  # noise power spectral density [W/Hz] (-174 dBm/Hz)
    d: float | None = None   # antenna / element spacing [m]; None selects lambda/2

    def __post_init__(self):
        for name in ("f_c", "B", "P_tx", "N0"):
            if getattr(self, name) <= 0.0:
                raise InvariantError(f"radio.{name} must be strictly positive")
        for name in ("N", "N_t", "N_r", "M_t"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvariantError(f"radio.{name} must be a positive integer")
            object.__setattr__(self, name, int(v))
        if self.M_t > self.N_t:
            raise InvariantError("radio.M_t must not exceed radio.N_t")
        if self.d is None:
            object.__setattr__(self, "d", self.wavelength / 2.0)
        elif self.d <= 0.0:
            raise InvariantError("radio.d must be strictly positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c


@dataclass(frozen=True)
class PathLossConfig:
    """Direct-link path-loss model and the shadow-fading policy."""

    alpha_0: float = 3.7        # direct-link path-loss exponent
    sigma_sf_0: float = 4.0     # direct-link shadow-fading std deviation [dB]
    shadowing: ShadowingMode = ShadowingMode.DETERMINISTIC
    shadow_seed: int | None = None

    def __post_init__(self):
        if self.shadowing is ShadowingMode.SAMPLED and self.shadow_seed is None:
            raise InvariantError("sampled shadowing requires pathloss.shadow_seed")


@dataclass(frozen=True)
class Scenario:
    """Full system description: node placement plus radio and path-loss constants."""

    q: np.ndarray            # BS position [m]
    p: np.ndarray            # user position [m]; p_z must be exactly 0
    alpha: float             # user array rotation, radians in (0, pi]
    ris: tuple[RisPanel, ...]
    radio: RadioConfig
    pathloss: PathLossConfig = field(default_factory=PathLossConfig)
    scenario_id: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "q", _vec3(self.q, "BS position"))
        object.__setattr__(self, "p", _vec3(self.p, "user position"))
        object.__setattr__(self, "ris", tuple(self.ris))
        if self.p[2] != 0.0:
            raise InvariantError("user position must have p_z = 0 exactly")
        if not (0.0 < self.alpha <= np.pi):
            raise InvariantError("alpha must lie in (0, pi]")
        if np.linalg.norm(self.q - self.p) < _MIN_SEPARATION:
            raise DegenerateGeometry("BS and user positions coincide")
        for k, panel in enumerate(self.ris):
            if np.linalg.norm(self.p - panel.s) < _MIN_SEPARATION:
                raise DegenerateGeometry(f"user and RIS {k} positions coincide")
            if np.linalg.norm(self.q - panel.s) < _MIN_SEPARATION:
                raise DegenerateGeometry(f"BS and RIS {k} positions coincide")

    @property
    def K(self) -> int:
        """Number of reflecting panels."""
        return len(self.ris)


@dataclass(frozen=True, eq=False)
class GeometryOut:
    """Channel parameters derived from the node placement (pure geometry)."""

    d0: float                # BS-user distance [m]
    d1: np.ndarray           # BS-RIS_k distances [m], shape (K,)
    d2: np.ndarray           # RIS_k-user distances [m], shape (K,)
    tau: np.ndarray          # propagation delays [s], shape (K+1,); tau[0] direct
    theta_tx0: float         # BS departure angle toward the user [rad]
    theta_tx_k: np.ndarray   # BS departure angles toward each panel [rad], (K,)
    theta_rx: np.ndarray     # user arrival angles [rad], shape (K+1,)
    phi_in_a: np.ndarray     # azimuth of arrival at each panel (BS side) [rad], (K,)
    phi_in_e: np.ndarray     # elevation of arrival at each panel (BS side) [rad], (K,)
    phi_out_a: np.ndarray    # azimuth of departure at each panel (user side) [rad], (K,)
    phi_out_e: np.ndarray    # elevation of departure at each panel (user side) [rad], (K,)

    def __post_init__(self):
        for name in ("d1", "d2", "tau", "theta_tx_k", "theta_rx",
                     "phi_in_a", "phi_in_e", "phi_out_a", "phi_out_e"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))


@dataclass(frozen=True)
class ParamLayout:
    """Column layout of the channel-parameter vector.

    Block order: [tau (K+1) | theta_tx0 | theta_rx (K+1) | phi_out_a (K) |
    phi_out_e (K) | h_r (K+1) | h_i (K+1)], total 6K+5 entries.
    """

    k: int

    @property
    def size(self) -> int:
        return 6 * self.k + 5

    @property
    def tau(self) -> slice:
        return slice(0, self.k + 1)

    @property
    def theta_tx0(self) -> int:
        return self.k + 1

    @property
    def theta_rx(self) -> slice:
        return slice(self.k + 2, 2 * self.k + 3)

    @property
    def phi_out_a(self) -> slice:
        return slice(2 * self.k + 3, 3 * self.k + 3)

    @property
    def phi_out_e(self) -> slice:
        return slice(3 * self.k + 3, 4 * self.k + 3)

    @property
    def h_r(self) -> slice:
        return slice(4 * self.k + 3, 5 * self.k + 4)

    @property
    def h_i(self) -> slice:
        return slice(5 * self.k + 4, 6 * self.k + 5)


@dataclass(frozen=True, eq=False)
class JacobianT:
    """Jacobian of the channel-parameter vector w.r.t. (p_x, p_y, alpha).

    ``T`` has shape (3, 6K+5); rows are ordered (p_x, p_y, alpha), columns
    follow :class:`ParamLayout`. Gain columns are identically zero and the
    alpha row is nonzero only inside the theta_rx block.
    """

    T: np.ndarray
    layout: ParamLayout

    def __post_init__(self):
        object.__setattr__(self, "T", _readonly(self.T))


def _asin_guarded(x: float, what: str) -> float:
    if abs(x) > 1.0 + _TRIG_TOL:
        raise DegenerateGeometry(f"arcsin argument {x!r} out of range for {what}")
    return float(np.arcsin(np.clip(x, -1.0, 1.0)))


def _acos_guarded(x: float, what: str) -> float:
    if abs(x) > 1.0 + _TRIG_TOL:
        raise DegenerateGeometry(f"arccos argument {x!r} out of range for {what}")
    return float(np.arccos(np.clip(x, -1.0, 1.0)))


def _separation(value: float, what: str) -> float:
    if value < _MIN_SEPARATION:
        raise DegenerateGeometry(f"distance for {what} is below {_MIN_SEPARATION} m")
    return value


def compute_geometry(scenario: Scenario) -> GeometryOut:
    """Derive delays and angles from the node placement.

    Deterministic, pure. Raises :class:`DegenerateGeometry` when nodes
    coincide, a node sits exactly on another's vertical axis, or an
    inverse-trig argument leaves [-1, 1] by more than rounding noise.
    """
    q, p, alpha = scenario.q, scenario.p, scenario.alpha
    ca, sa = np.cos(alpha), np.sin(alpha)

    d0 = _separation(float(np.linalg.norm(q - p)), "BS-user link")
    theta_tx0 = _asin_guarded((p[0] - q[0]) / d0, "theta_tx0")
    theta_rx0 = _asin_guarded(
        ((p[0] - q[0]) * ca - (p[1] - q[1]) * sa) / d0, "theta_rx0")

    k = scenario.K
    d1 = np.empty(k)
    d2 = np.empty(k)
    theta_tx_k = np.empty(k)
    theta_rx_k = np.empty(k)
    phi_in_a = np.empty(k)
    phi_in_e = np.empty(k)
    phi_out_a = np.empty(k)
    phi_out_e = np.empty(k)

    for i, panel in enumerate(scenario.ris):
        s = panel.s
        d1[i] = _separation(float(np.linalg.norm(q - s)), f"BS-RIS {i} link")
        d2[i] = _separation(float(np.linalg.norm(p - s)), f"RIS {i}-user link")

        # horizontal separations; a node exactly on a panel's vertical axis
        # leaves the azimuth undefined
        rho_mu = _separation(float(np.hypot(p[0] - s[0], p[1] - s[1])),
                             f"horizontal RIS {i}-user offset")
        rho_bs = _separation(float(np.hypot(q[0] - s[0], q[1] - s[1])),
                             f"horizontal BS-RIS {i} offset")

        theta_tx_k[i] = _asin_guarded((s[0] - q[0]) / d1[i], f"theta_tx RIS {i}")
        theta_rx_k[i] = _asin_guarded(
            ((p[0] - s[0]) * ca - (p[1] - s[1]) * sa) / d2[i], f"theta_rx RIS {i}")
        phi_in_a[i] = _asin_guarded((q[1] - s[1]) / rho_bs, f"phi_in_a RIS {i}")
        phi_in_e[i] = _acos_guarded((q[2] - s[2]) / d1[i], f"phi_in_e RIS {i}")
        phi_out_a[i] = _asin_guarded((p[1] - s[1]) / rho_mu, f"phi_out_a RIS {i}")
        phi_out_e[i] = _acos_guarded(s[2] / d2[i], f"phi_out_e RIS {i}")

    tau = np.concatenate(([d0], d1 + d2)) / SPEED_OF_LIGHT
    theta_rx = np.concatenate(([theta_rx0], theta_rx_k))

    return GeometryOut(
        d0=d0, d1=d1, d2=d2, tau=tau,
        theta_tx0=theta_tx0, theta_tx_k=theta_tx_k, theta_rx=theta_rx,
        phi_in_a=phi_in_a, phi_in_e=phi_in_e,
        phi_out_a=phi_out_a, phi_out_e=phi_out_e,
    )


def _guard_denominator(value: float, what: str) -> float:
    if abs(value) < _DENOM_TOL:
        raise SingularJacobian(f"vanishing denominator in {what}")
    return value


def jacobian_T(scenario: Scenario, geometry: GeometryOut | None = None) -> JacobianT:
    """Closed-form Jacobian of the channel parameters w.r.t. (p_x, p_y, alpha).

    Every entry is the analytic derivative of the corresponding
    :func:`compute_geometry` output, so central finite differences of the
    geometric map reproduce the matrix. Gain columns are zero; delays and
    departure angles do not depend on the rotation, so the alpha row is
    nonzero only in the theta_rx block.
    """
    if geometry is None:
        geometry = compute_geometry(scenario)
    q, p, alpha = scenario.q, scenario.p, scenario.alpha
    ca, sa = np.cos(alpha), np.sin(alpha)
    c = SPEED_OF_LIGHT

    layout = ParamLayout(scenario.K)
    T = np.zeros((3, layout.size))

    dx0, dy0 = p[0] - q[0], p[1] - q[1]
    r0 = geometry.d0

    # direct delay
    T[0, 0] = dx0 / (c * r0)
    T[1, 0] = dy0 / (c * r0)

    # BS departure angle toward the user
    j = layout.theta_tx0
    den_tx = _guard_denominator(np.sqrt(max(r0 ** 2 - dx0 ** 2, 0.0)), "theta_tx0")
    T[0, j] = den_tx / r0 ** 2
    T[1, j] = -dx0 * dy0 / (den_tx * r0 ** 2)

    def rx_entries(dx, dy, r, what):
        # arrival angle at the rotated user array: arcsin(g / r) with
        # g = dx cos(alpha) - dy sin(alpha)
        g = dx * ca - dy * sa
        den = _guard_denominator(np.sqrt(max(r ** 2 - g ** 2, 0.0)), what)
        d_px = (ca - dx * g / r ** 2) / den
        d_py = -(sa + dy * g / r ** 2) / den
        d_alpha = (-dx * sa - dy * ca) / den
        return d_px, d_py, d_alpha

    rx = layout.theta_rx.start
    T[0, rx], T[1, rx], T[2, rx] = rx_entries(dx0, dy0, r0, "theta_rx0")

    for i, panel in enumerate(scenario.ris):
        s = panel.s
        dx, dy = p[0] - s[0], p[1] - s[1]
        r = geometry.d2[i]

        # reflected delay: only the RIS-user leg moves with p
        T[0, 1 + i] = dx / (c * r)
        T[1, 1 + i] = dy / (c * r)

        T[0, rx + 1 + i], T[1, rx + 1 + i], T[2, rx + 1 + i] = rx_entries(
            dx, dy, r, f"theta_rx RIS {i}")

        # departure azimuth at the panel; the arcsin parameterization carries
        # a sign(dx) factor (its seam sits at dx = 0)
        ja = layout.phi_out_a.start + i
        rho2 = _guard_denominator(dx ** 2 + dy ** 2, f"phi_out_a RIS {i}")
        sgn = np.copysign(1.0, dx)
        T[0, ja] = -dy * sgn / rho2
        T[1, ja] = dx * sgn / rho2

        # departure elevation at the panel
        je = layout.phi_out_e.start + i
        den_e = _guard_denominator(
            np.sqrt(max(r ** 2 - s[2] ** 2, 0.0)), f"phi_out_e RIS {i}")
        T[0, je] = s[2] * dx / (r ** 2 * den_e)
        T[1, je] = s[2] * dy / (r ** 2 * den_e)

    return JacobianT(T=T, layout=layout)
