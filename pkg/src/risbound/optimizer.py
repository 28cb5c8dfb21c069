"""Phase-profile generation: random, beam-aligned, and swarm-optimized.

The swarm optimizer is a standard global-best PSO over the concatenated
element phases of every panel. Phases are intrinsically circular, so
positions are wrapped back into [0, 2*pi) after each move instead of being
clamped or reflected; velocities are left untouched by the wrap. Profiles
whose Fisher matrix is singular receive an infinite objective so the swarm
can move off degenerate configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import PhaseProfile, TWO_PI, profile_sizes, steer_upa, wrap_phase
from .errors import AllSingular, InvariantError, SingularFim
from .fim import BoundEvaluator, FimMode
from .geometry import GeometryOut, Scenario, compute_geometry


class Objective(Enum):
    PEB_PLUS_REB = "peb+reb"
    PEB = "peb"
    REB = "reb"


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters; constriction-style defaults."""

    swarm_size: int = 64
    iterations: int = 300
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    v_max: float = np.pi / 2  # per-dimension velocity clamp [rad]
    # initial per-dimension velocity scale [rad]; kept small so a seeded
    # baseline particle refines its neighborhood instead of jumping away
    v_init: float = 0.05
    seed: int = 0
    seed_baselines: bool = True  # include beam-aligned + one random particle

    def __post_init__(self):
        if self.swarm_size < 2:
            raise InvariantError("swarm_size must be at least 2")
        if self.iterations < 1:
            raise InvariantError("iterations must be at least 1")
        if not (0.0 <= self.inertia < 1.0):
            raise InvariantError("inertia must lie in [0, 1)")
        if self.cognitive <= 0.0 or self.social <= 0.0:
            raise InvariantError("cognitive and social factors must be positive")
        if self.v_max <= 0.0:
            raise InvariantError("v_max must be positive")
        if not (0.0 < self.v_init <= self.v_max):
            raise InvariantError("v_init must lie in (0, v_max]")


@dataclass(frozen=True, eq=False)
class PsoRun:
    """Outcome of one optimization run."""

    best_phases: PhaseProfile
    best_objective: float
    history: np.ndarray   # best objective after init and after each iteration
    evaluations: int

    def __post_init__(self):
        hist = np.asarray(self.history, dtype=float)
        hist.flags.writeable = False
        object.__setattr__(self, "history", hist)


def random_phases(scenario: Scenario, seed: int) -> PhaseProfile:
    """Independent uniform phases on [0, 2*pi), keyed by (seed, panel)."""
    theta = []
    for k, panel in enumerate(scenario.ris):
        rng = np.random.default_rng([int(seed), k])
        theta.append(rng.uniform(0.0, TWO_PI, panel.n_elements))
    return PhaseProfile(theta=tuple(theta))


def beam_aligned_phases(scenario: Scenario,
                        geometry: GeometryOut | None = None) -> PhaseProfile:
    """Conjugate-match each element: theta_i = arg(a_out_i) - arg(a_in_i).

    The resulting cascade magnitude is exactly delta * L^2 per panel.
    """
    if geometry is None:
        geometry = compute_geometry(scenario)
    radio = scenario.radio
    lam, d = radio.wavelength, radio.d
    theta = []
    for i, panel in enumerate(scenario.ris):
        a_in = steer_upa(geometry.phi_in_a[i], geometry.phi_in_e[i], panel.L, d, lam)
        a_out = steer_upa(geometry.phi_out_a[i], geometry.phi_out_e[i], panel.L, d, lam)
        theta.append(wrap_phase(np.angle(a_out) - np.angle(a_in)))
    return PhaseProfile(theta=tuple(theta))


def _circular_diff(target, x):
    """Shortest signed angular displacement from x to target, in (-pi, pi]."""
    return np.mod(target - x + np.pi, TWO_PI) - np.pi


def pso_minimize(objective_fn, dim: int, config: PsoConfig,
                 initial_particles=()) -> tuple[np.ndarray, float, np.ndarray, int]:
    """Global-best PSO over a dim-dimensional wrapped phase vector.

    The domain is circular, so the cognitive and social attractions use the
    shortest angular displacement; taking the raw coordinate difference
    would inject 2*pi-sized pulls whenever a particle crosses the 0/2*pi
    seam and keep the swarm from ever settling.

    ``initial_particles`` are injected as the first swarm members (the
    remaining ones start uniform on [0, 2*pi)). Returns (best position,
    best value, history, evaluation count); the evaluation count is exactly
    swarm_size * (iterations + 1). Raises :class:`AllSingular` when every
    evaluation came back infinite.
    """
    rng = np.random.default_rng(config.seed)
    s = config.swarm_size

    x = rng.uniform(0.0, TWO_PI, (s, dim))
    for i, vec in enumerate(initial_particles):
        if i >= s:
            break
        x[i] = wrap_phase(np.asarray(vec, dtype=float))
    v = rng.uniform(-config.v_init, config.v_init, (s, dim))

    fitness = np.array([objective_fn(x[i]) for i in range(s)])
    evaluations = s
    pbest = x.copy()
    pbest_f = fitness.copy()
    g = int(np.argmin(pbest_f))  # argmin breaks ties by lowest index
    gbest = pbest[g].copy()
    gbest_f = float(pbest_f[g])
    history = [gbest_f]

    for _ in range(config.iterations):
        r1 = rng.uniform(size=(s, dim))
        r2 = rng.uniform(size=(s, dim))
        v = (config.inertia * v
             + config.cognitive * r1 * _circular_diff(pbest, x)
             + config.social * r2 * _circular_diff(gbest[None, :], x))
        np.clip(v, -config.v_max, config.v_max, out=v)
        x = wrap_phase(x + v)

        fitness = np.array([objective_fn(x[i]) for i in range(s)])
        evaluations += s
        improved = fitness < pbest_f
        pbest[improved] = x[improved]
        pbest_f[improved] = fitness[improved]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest = pbest[g].copy()
            gbest_f = float(pbest_f[g])
        history.append(gbest_f)

    if np.isinf(gbest_f):
        raise AllSingular("every swarm evaluation produced a singular FIM")
    return gbest, gbest_f, np.array(history), evaluations


def _combine(peb: float, reb: float, objective: Objective, weights) -> float:
    if objective is Objective.PEB:
        return peb
    if objective is Objective.REB:
        return reb
    return weights[0] * peb + weights[1] * reb


def pso_optimize(scenario: Scenario, objective: Objective = Objective.PEB_PLUS_REB,
                 mode: FimMode = FimMode.PAPER,
                 config: PsoConfig | None = None,
                 weights: tuple[float, float] = (1.0, 1.0)) -> PsoRun:
    """Minimize the selected error-bound objective over all panel phases.

    With ``seed_baselines`` the beam-aligned profile and one random profile
    (drawn with the run seed) join the initial swarm, so the result is never
    worse than either baseline.
    """
    if config is None:
        config = PsoConfig()
    evaluator = BoundEvaluator(scenario, mode)
    sizes = profile_sizes(scenario)
    dim = sum(sizes)

    def fitness(vec) -> float:
        profile = PhaseProfile.from_vector(vec, sizes)
        try:
            peb, reb = evaluator.bounds(profile)
        except SingularFim:
            return np.inf
        return _combine(peb, reb, objective, weights)

    initial = ()
    if config.seed_baselines:
        initial = (
            beam_aligned_phases(scenario, evaluator.geometry).to_vector(),
            random_phases(scenario, config.seed).to_vector(),
        )

    best_vec, best_f, history, evaluations = pso_minimize(fitness, dim, config, initial)
    return PsoRun(
        best_phases=PhaseProfile.from_vector(best_vec, sizes),
        best_objective=best_f,
        history=history,
        evaluations=evaluations,
    )
