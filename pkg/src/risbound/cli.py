"""Scenario file I/O, experiment commands, and CSV emission.

Verbs: ``bounds`` (one evaluation), ``optimize`` (swarm search on the full
scenario), ``sweep-ris-count`` (activate panel prefixes 0..K), and
``sweep-ris-size`` (override every panel's side length). All dB / dBm
quantities are converted to linear SI units once, here at load time; the
numerical core works in watts and meters throughout.

CSV rows follow the fixed header
``scenario_id,K_active,L,phase_mode,fim_mode,seed,peb_m,reb_rad,objective,wall_time_s``
with floats printed as their shortest round-trip decimals. Timing is
disabled by default (the column reads 0.0) so output files are byte-
reproducible; pass ``--timing`` to record real wall-clock seconds.
"""

from __future__ import annotations

import argparse
import dataclasses
import importlib.resources
import json
import sys
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllSingular,
    ConfigError,
    InvariantError,
    RisboundError,
    SchemaError,
    SingularFim,
    SingularJacobian,
)
from .channel import PhaseProfile
from .fim import BoundEvaluator, FimMode
from .geometry import (
    PathLossConfig,
    RadioConfig,
    RisPanel,
    Scenario,
    ShadowingMode,
)
from .optimizer import PsoConfig, beam_aligned_phases, pso_optimize, random_phases

CSV_HEADER = "scenario_id,K_active,L,phase_mode,fim_mode,seed,peb_m,reb_rad,objective,wall_time_s"

PHASE_MODES = ("random", "aligned", "pso")
EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_SINGULAR = 3
EXIT_IO = 4


@dataclass(frozen=True)
class SweepResultRow:
    """One evaluated configuration; field order matches the CSV header."""

    scenario_id: str
    K_active: int
    L: int
    phase_mode: str
    fim_mode: str
    seed: int
    peb_m: float
    reb_rad: float
    objective: float
    wall_time_s: float

    def to_csv(self) -> str:
        return ",".join([
            self.scenario_id,
            str(self.K_active),
            str(self.L),
            self.phase_mode,
            self.fim_mode,
            str(self.seed),
            repr(float(self.peb_m)),
            repr(float(self.reb_rad)),
            repr(float(self.objective)),
            repr(float(self.wall_time_s)),
        ])


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise SchemaError(f"missing required field '{path}{key}'")
    return mapping[key]


def _no_unknown_keys(mapping: dict, allowed, path: str):
    for key in mapping:
        if key not in allowed:
            raise SchemaError(f"unknown field '{path}{key}'")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field '{path}' must be a number")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field '{path}' must be an integer")
    return value


def _vec3(value, path: str):
    if not isinstance(value, list) or len(value) != 3:
        raise SchemaError(f"field '{path}' must be a list of 3 numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _default(mapping: dict, key: str, fallback, path: str):
    if key in mapping:
        return mapping[key]
    warnings.warn(f"scenario field '{path}{key}' missing, using default {fallback!r}")
    return fallback


def scenario_from_dict(data: dict, scenario_id: str | None = None) -> Scenario:
    """Build and validate a scenario from parsed JSON.

    Unknown keys are rejected with their dotted path; omitted optional
    fields fall back to documented defaults with a warning.
    """
    if not isinstance(data, dict):
        raise SchemaError("scenario document must be a JSON object")
    _no_unknown_keys(data, {
        "schema_version", "id", "bs_position_m", "mu_position_m",
        "mu_rotation_rad", "radio", "pathloss", "ris"}, "")
    version = _require(data, "schema_version", "")
    if version != 1:
        raise SchemaError(f"unsupported schema_version {version!r}")

    ris_raw = _require(data, "ris", "")
    if not isinstance(ris_raw, list):
        raise SchemaError("field 'ris' must be a list")
    panels = []
    for i, entry in enumerate(ris_raw):
        path = f"ris[{i}]."
        if not isinstance(entry, dict):
            raise SchemaError(f"field 'ris[{i}]' must be an object")
        _no_unknown_keys(entry, {
            "position_m", "side_elements", "pathloss_exponent", "shadow_sigma_db"}, path)
        panels.append(RisPanel(
            s=_vec3(_require(entry, "position_m", path), path + "position_m"),
            L=_integer(_require(entry, "side_elements", path), path + "side_elements"),
            alpha_k=_number(_require(entry, "pathloss_exponent", path),
                            path + "pathloss_exponent"),
            sigma_sf_k=_number(_require(entry, "shadow_sigma_db", path),
                               path + "shadow_sigma_db"),
        ))

    radio_raw = _require(data, "radio", "")
    if not isinstance(radio_raw, dict):
        raise SchemaError("field 'radio' must be an object")
    _no_unknown_keys(radio_raw, {
        "carrier_frequency_hz", "bandwidth_hz", "subcarriers", "bs_antennas",
        "mu_antennas", "beams", "element_spacing_m", "tx_power_dbm",
        "noise_density_dbm_per_hz"}, "radio.")
    spacing = radio_raw.get("element_spacing_m")
    radio = RadioConfig(
        f_c=_number(_require(radio_raw, "carrier_frequency_hz", "radio."),
                    "radio.carrier_frequency_hz"),
        B=_number(_require(radio_raw, "bandwidth_hz", "radio."), "radio.bandwidth_hz"),
        N=_integer(_require(radio_raw, "subcarriers", "radio."), "radio.subcarriers"),
        N_t=_integer(_require(radio_raw, "bs_antennas", "radio."), "radio.bs_antennas"),
        N_r=_integer(_require(radio_raw, "mu_antennas", "radio."), "radio.mu_antennas"),
        M_t=_integer(_default(radio_raw, "beams", len(panels) + 1, "radio."), "radio.beams"),
        P_tx=dbm_to_watt(_number(_default(radio_raw, "tx_power_dbm", 30.0, "radio."),
                                 "radio.tx_power_dbm")),
        N0=dbm_to_watt(_number(_require(radio_raw, "noise_density_dbm_per_hz", "radio."),
                               "radio.noise_density_dbm_per_hz")),
        d=None if spacing is None else _number(spacing, "radio.element_spacing_m"),
    )

    pl_raw = _require(data, "pathloss", "")
    if not isinstance(pl_raw, dict):
        raise SchemaError("field 'pathloss' must be an object")
    _no_unknown_keys(pl_raw, {
        "los_exponent", "los_shadow_sigma_db", "shadowing", "shadow_seed"}, "pathloss.")
    mode_raw = _default(pl_raw, "shadowing", "deterministic", "pathloss.")
    try:
        mode = ShadowingMode(mode_raw)
    except ValueError:
        raise SchemaError(
            f"field 'pathloss.shadowing' must be one of "
            f"{[m.value for m in ShadowingMode]}, got {mode_raw!r}") from None
    seed = pl_raw.get("shadow_seed")
    if seed is not None:
        seed = _integer(seed, "pathloss.shadow_seed")
    pathloss = PathLossConfig(
        alpha_0=_number(_require(pl_raw, "los_exponent", "pathloss."),
                        "pathloss.los_exponent"),
        sigma_sf_0=_number(_require(pl_raw, "los_shadow_sigma_db", "pathloss."),
                           "pathloss.los_shadow_sigma_db"),
        shadowing=mode,
        shadow_seed=seed,
    )

    if scenario_id is None:
        scenario_id = data.get("id", "scenario")
    alpha = _number(_default(data, "mu_rotation_rad", float(np.pi / 4), ""),
                    "mu_rotation_rad")
    return Scenario(
        q=_vec3(_require(data, "bs_position_m", ""), "bs_position_m"),
        p=_vec3(_require(data, "mu_position_m", ""), "mu_position_m"),
        alpha=alpha,
        ris=tuple(panels),
        radio=radio,
        pathloss=pathloss,
        scenario_id=str(data.get("id", scenario_id)),
    )


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(data)


def bundled_scenario_path() -> str:
    """Filesystem path of the bundled default scenario."""
    return str(importlib.resources.files("risbound").joinpath("scenarios/paper_vi.json"))


def with_active_ris(scenario: Scenario, k_active: int) -> Scenario:
    """Keep only the first ``k_active`` panels; beam count follows the paths."""
    if not (0 <= k_active <= scenario.K):
        raise InvariantError(f"k_active must lie in 0..{scenario.K}")
    radio = dataclasses.replace(scenario.radio, M_t=k_active + 1)
    return dataclasses.replace(scenario, ris=scenario.ris[:k_active], radio=radio)


def with_ris_side(scenario: Scenario, side: int) -> Scenario:
    """Override every panel's side length."""
    panels = tuple(dataclasses.replace(p, L=side) for p in scenario.ris)
    return dataclasses.replace(scenario, ris=panels)


def _active_side(scenario: Scenario) -> int:
    return max((panel.L for panel in scenario.ris), default=0)


def _phases_for_mode(scenario: Scenario, mode: str, seed: int,
                     pso: PsoConfig) -> PhaseProfile:
    if mode == "random":
        return random_phases(scenario, seed)
    if mode == "aligned":
        return beam_aligned_phases(scenario)
    if mode == "pso":
        run = pso_optimize(scenario, config=dataclasses.replace(pso, seed=seed))
        return run.best_phases
    raise InvariantError(f"unknown phase mode {mode!r}")


def evaluate_cell(scenario: Scenario, phase_mode: str, fim_mode: FimMode,
                  seed: int, pso: PsoConfig, timing: bool = False) -> SweepResultRow:
    """Evaluate one (scenario, phase mode, seed) configuration."""
    start = time.perf_counter()
    phases = _phases_for_mode(scenario, phase_mode, seed, pso)
    result = BoundEvaluator(scenario, fim_mode).fisher(phases)
    elapsed = time.perf_counter() - start
    return SweepResultRow(
        scenario_id=scenario.scenario_id,
        K_active=scenario.K,
        L=_active_side(scenario),
        phase_mode=phase_mode,
        fim_mode=fim_mode.value,
        seed=seed,
        peb_m=result.peb,
        reb_rad=result.reb,
        objective=result.peb + result.reb,
        wall_time_s=elapsed if timing else 0.0,
    )


def sweep_ris_count(scenario: Scenario, modes, seeds, fim_mode: FimMode,
                    pso: PsoConfig, timing: bool = False) -> list[SweepResultRow]:
    """Rows for panel prefixes {none}, {1}, {1,2}, ..., in file order."""
    if scenario.K < 1:
        raise InvariantError("sweep-ris-count needs a scenario with at least one panel")
    rows = []
    for k_active in range(scenario.K + 1):
        sub = with_active_ris(scenario, k_active)
        for mode in modes:
            for seed in seeds:
                rows.append(evaluate_cell(sub, mode, fim_mode, seed, pso, timing))
    return rows


def sweep_ris_size(scenario: Scenario, sides, modes, seeds, fim_mode: FimMode,
                   pso: PsoConfig, timing: bool = False) -> list[SweepResultRow]:
    """Rows for each panel side length override, all panels resized alike."""
    if not sides:
        raise InvariantError("sweep-ris-size needs at least one side length")
    if any(side < 2 for side in sides):
        raise InvariantError("side lengths must be at least 2")
    rows = []
    for side in sides:
        sub = with_ris_side(scenario, side)
        for mode in modes:
            for seed in seeds:
                rows.append(evaluate_cell(sub, mode, fim_mode, seed, pso, timing))
    return rows


def write_csv(rows, path: str | None):
    """Write rows under the fixed header; '-' or None prints to stdout."""
    lines = [CSV_HEADER] + [row.to_csv() for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _print_row(row: SweepResultRow):
    print(f"{row.scenario_id}: K={row.K_active} L={row.L} phases={row.phase_mode} "
          f"fim={row.fim_mode} seed={row.seed}  "
          f"PEB = {row.peb_m:.6g} m,  REB = {row.reb_rad:.6g} rad")


def _parse_modes(text: str):
    modes = tuple(m.strip() for m in text.split(",") if m.strip())
    for mode in modes:
        if mode not in PHASE_MODES:
            raise SchemaError(f"unknown phase mode {mode!r}")
    if not modes:
        raise SchemaError("at least one phase mode is required")
    return modes


def _parse_ints(text: str, what: str):
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise SchemaError(f"{what} must be a comma-separated integer list") from None
    if not values:
        raise SchemaError(f"{what} must not be empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risbound",
        description="Position/rotation error bounds for multi-RIS positioning "
                    "and swarm optimization of the panel phases.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--scenario", default=None, metavar="PATH",
                       help="scenario JSON (default: bundled paper_vi)")
        p.add_argument("--fim", choices=[m.value for m in FimMode], default="paper",
                       help="position-domain FIM mode")
        p.add_argument("--seed", type=int, default=1, help="run seed")
        p.add_argument("--out", default=None, metavar="PATH.csv",
                       help="CSV output path ('-' for stdout)")
        p.add_argument("--pso-swarm", type=int, default=32, help="PSO swarm size")
        p.add_argument("--pso-iters", type=int, default=120, help="PSO iterations")
        p.add_argument("--timing", action="store_true",
                       help="record wall-clock seconds in the CSV (non-reproducible)")

    p_bounds = sub.add_parser("bounds", help="evaluate one configuration")
    common(p_bounds)
    p_bounds.add_argument("--phases", choices=PHASE_MODES, default="aligned")

    p_opt = sub.add_parser("optimize", help="swarm-optimize the panel phases")
    common(p_opt)
    p_opt.add_argument("--phases-out", default=None, metavar="PATH.json",
                       help="write the optimized phase profile as JSON")

    p_count = sub.add_parser("sweep-ris-count", help="activate panel prefixes 0..K")
    common(p_count)
    p_count.add_argument("--phases", default="random,aligned,pso",
                         help="comma-separated phase modes")
    p_count.add_argument("--seeds", default=None,
                         help="comma-separated seeds (default: --seed)")

    p_size = sub.add_parser("sweep-ris-size", help="override every panel side length")
    common(p_size)
    p_size.add_argument("--phases", default="random,aligned,pso",
                        help="comma-separated phase modes")
    p_size.add_argument("--seeds", default=None,
                        help="comma-separated seeds (default: --seed)")
    p_size.add_argument("--sizes", default="4,8,12,16",
                        help="comma-separated side lengths")

    return parser


def _run(args) -> int:
    scenario = load_scenario(args.scenario or bundled_scenario_path())
    fim_mode = FimMode(args.fim)
    pso = PsoConfig(swarm_size=args.pso_swarm, iterations=args.pso_iters, seed=args.seed)

    if args.command == "bounds":
        row = evaluate_cell(scenario, args.phases, fim_mode, args.seed, pso, args.timing)
        _print_row(row)
        if args.out is not None:
            write_csv([row], args.out)
        return EXIT_OK

    if args.command == "optimize":
        run = pso_optimize(scenario, mode=fim_mode,
                           config=dataclasses.replace(pso, seed=args.seed))
        result = BoundEvaluator(scenario, fim_mode).fisher(run.best_phases)
        print(f"{scenario.scenario_id}: best objective {run.best_objective:.6g} "
              f"after {run.evaluations} evaluations")
        print(f"PEB = {result.peb:.6g} m,  REB = {result.reb:.6g} rad")
        if args.phases_out is not None:
            payload = {
                "delta": run.best_phases.delta,
                "theta": [t.tolist() for t in run.best_phases.theta],
            }
            with open(args.phases_out, "w", encoding="utf-8") as fh:
                json.dump(payload, fh)
        if args.out is not None:
            row = SweepResultRow(
                scenario_id=scenario.scenario_id, K_active=scenario.K,
                L=_active_side(scenario), phase_mode="pso", fim_mode=fim_mode.value,
                seed=args.seed, peb_m=result.peb, reb_rad=result.reb,
                objective=result.peb + result.reb, wall_time_s=0.0)
            write_csv([row], args.out)
        return EXIT_OK

    modes = _parse_modes(args.phases)
    seeds = _parse_ints(args.seeds, "--seeds") if args.seeds else (args.seed,)

    if args.command == "sweep-ris-count":
        rows = sweep_ris_count(scenario, modes, seeds, fim_mode, pso, args.timing)
    elif args.command == "sweep-ris-size":
        sides = _parse_ints(args.sizes, "--sizes")
        rows = sweep_ris_size(scenario, sides, modes, seeds, fim_mode, pso, args.timing)
    else:  # pragma: no cover - argparse guards the verb set
        raise InvariantError(f"unknown command {args.command!r}")

    for row in rows:
        _print_row(row)
    write_csv(rows, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (SchemaError, InvariantError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (SingularFim, SingularJacobian, AllSingular) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RisboundError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
