"""Scenario files, validation reporting, and result serialization.

Scenario documents are JSON. The loader converts a document into a
:class:`~bfsim.sim_engine.SimConfig`, reporting any malformed field by its
exact path (``agents[2].gains.kd``) instead of attempting a partial run.

CLI surface::

    bfsim check <scenario>                       validate topology/gains/BPE
    bfsim run <scenario> [--seed N] [--duration S] [--out DIR] [--force]
    bfsim list-scenarios                         show bundled scenarios

``<scenario>`` is a file path or the name of a bundled scenario.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .control import CollisionParams, ControlGains, LeaderGains
from .dynamics import QuadrotorParams, QuadrotorState
from .errors import CoincidentAgents, ParseError, SimulationError
from .geometry import rotation_from_rpy
from .graph import SensingGraph, validate_gains, validate_topology
from .reporting import ValidationReport
from .sim_engine import (NoiseModel, SimConfig, SimRecord, compute_metrics,
                         position_errors, rotation_errors, run,
                         velocity_errors)
from .trajectory import (CircleParams, PEParams, TableTrajectory,
                         check_boundedness, is_bpe, make_circle_provider,
                         scenario1, scenario2, with_offset)

_AGENT_FIELDS = ("px", "py", "pz", "vx", "vy", "vz",
                 "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33",
                 "T", "wx", "wy", "wz", "ubx", "uby", "ubz", "ucx", "ucy", "ucz")


# ---------------------------------------------------------------------------
# document access helpers (field-path-qualified errors)
# ---------------------------------------------------------------------------

def _as_obj(val, path):
    if not isinstance(val, dict):
        raise ParseError(f"expected object, got {type(val).__name__}", path)
    return val


def _as_list(val, path):
    if not isinstance(val, list):
        raise ParseError(f"expected array, got {type(val).__name__}", path)
    return val


def _as_num(val, path) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ParseError(f"expected number, got {type(val).__name__}", path)
    if not math.isfinite(val):
        raise ParseError(f"expected finite number, got {val}", path)
    return float(val)


def _as_int(val, path) -> int:
    if isinstance(val, bool) or not isinstance(val, int):
        raise ParseError(f"expected integer, got {type(val).__name__}", path)
    return val


def _as_str(val, path) -> str:
    if not isinstance(val, str):
        raise ParseError(f"expected string, got {type(val).__name__}", path)
    return val


def _as_vec3(val, path) -> np.ndarray:
    seq = _as_list(val, path)
    if len(seq) != 3:
        raise ParseError(f"expected 3 components, got {len(seq)}", path)
    return np.array([_as_num(x, f"{path}[{k}]") for k, x in enumerate(seq)])


def _get(obj: dict, key: str, path: str):
    if key not in obj:
        raise ParseError("missing required field", f"{path}.{key}" if path else key)
    return obj[key]


def _sub(obj: dict, key: str, path: str) -> tuple[dict, str]:
    child_path = f"{path}.{key}" if path else key
    return _as_obj(_get(obj, key, path), child_path), child_path


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    """Parsed scenario document plus everything needed to build a SimConfig."""

    name: str
    description: str
    seed: int
    graph: SensingGraph
    quad_params: tuple[QuadrotorParams, ...]
    gains: tuple[ControlGains, ...]
    leader_gains: LeaderGains
    initial_states: tuple[QuadrotorState, ...]
    provider: object
    trajectory_kind: str
    pe_params: PEParams
    collision: CollisionParams
    noise: NoiseModel
    duration: float
    physics_dt: float
    control_rate: float
    udot_mode: str
    csv_path: str
    summary_path: str
    raw: dict

    def to_sim_config(self, seed: int | None = None, duration: float | None = None,
                      plant: str = "quadrotor") -> SimConfig:
        return SimConfig(
            graph=self.graph,
            initial_states=self.initial_states,
            quad_params=self.quad_params,
            gains=self.gains,
            provider=self.provider,
            duration=self.duration if duration is None else duration,
            leader_gains=self.leader_gains,
            collision=self.collision,
            noise=self.noise,
            physics_dt=self.physics_dt,
            control_rate=self.control_rate,
            seed=self.seed if seed is None else seed,
            udot_mode=self.udot_mode,
            plant=plant,
            trajectory_kind=self.trajectory_kind)


def _parse_graph(doc: dict, n: int) -> SensingGraph:
    gobj, gpath = _sub(doc, "graph", "")
    nbrs_obj, npath = _sub(gobj, "neighbors", gpath)
    neighbors = []
    for i in range(1, n + 1):
        key = str(i)
        if key in nbrs_obj:
            lst = _as_list(nbrs_obj[key], f"{npath}.{key}")
            neighbors.append(tuple(
                _as_int(j, f"{npath}.{key}[{k}]") for k, j in enumerate(lst)))
        else:
            neighbors.append(())
    for key in nbrs_obj:
        if not (key.isdigit() and 1 <= int(key) <= n):
            raise ParseError(f"unknown agent id {key!r}", f"{npath}.{key}")
    return SensingGraph(n=n, neighbors=tuple(neighbors))


def _parse_trajectory(doc: dict, n: int, base_dir: Path):
    tobj, tpath = _sub(doc, "trajectory", "")
    kind = _as_str(_get(tobj, "kind", tpath), f"{tpath}.kind")
    params = _as_obj(tobj.get("params", {}), f"{tpath}.params")
    ppath = f"{tpath}.params"

    if kind == "scenario1":
        if n != 4:
            raise ParseError(f"scenario1 defines 4 agents, scenario has {n}",
                             f"{tpath}.kind")
        provider = scenario1
    elif kind == "scenario2":
        if n != 4:
            raise ParseError(f"scenario2 defines 4 agents, scenario has {n}",
                             f"{tpath}.kind")
        provider = scenario2
    elif kind == "circle":
        defaults = CircleParams()
        phases = params.get("phases")
        if phases is None:
            phase_tuple = tuple(2.0 * math.pi * k / n for k in range(n))
        else:
            lst = _as_list(phases, f"{ppath}.phases")
            if len(lst) != n:
                raise ParseError(f"need {n} phases, got {len(lst)}", f"{ppath}.phases")
            phase_tuple = tuple(_as_num(x, f"{ppath}.phases[{k}]")
                                for k, x in enumerate(lst))
        cp = CircleParams(
            a0=_as_num(params.get("a0", defaults.a0), f"{ppath}.a0"),
            a1=_as_num(params.get("a1", defaults.a1), f"{ppath}.a1"),
            omega=_as_num(params.get("omega", defaults.omega), f"{ppath}.omega"),
            omega_a=_as_num(params.get("omega_a", defaults.omega_a), f"{ppath}.omega_a"),
            phases=phase_tuple,
            h0=_as_num(params.get("h0", defaults.h0), f"{ppath}.h0"),
            h_rate=_as_num(params.get("h_rate", defaults.h_rate), f"{ppath}.h_rate"),
            a_min=_as_num(params.get("a_min", defaults.a_min), f"{ppath}.a_min"))
        provider = make_circle_provider(cp)
    elif kind == "table":
        provider = _parse_table(params, ppath, n, base_dir)
    else:
        raise ParseError(
            f"unknown kind {kind!r} (expected scenario1|scenario2|circle|table)",
            f"{tpath}.kind")

    if "offset" in params:
        provider = with_offset(provider, _as_vec3(params["offset"], f"{ppath}.offset"))

    pe = PEParams()
    if "pe" in params:
        pobj = _as_obj(params["pe"], f"{ppath}.pe")
        pe = PEParams(
            window=_as_num(pobj.get("window", pe.window), f"{ppath}.pe.window"),
            mu_min=_as_num(pobj.get("mu_min", pe.mu_min), f"{ppath}.pe.mu_min"),
            quadrature_dt=_as_num(pobj.get("quadrature_dt", pe.quadrature_dt),
                                  f"{ppath}.pe.quadrature_dt"))
    return provider, kind, pe


def _parse_table(params: dict, ppath: str, n: int, base_dir: Path) -> TableTrajectory:
    if "path" in params:
        rel = _as_str(params["path"], f"{ppath}.path")
        table_file = base_dir / rel
        if not table_file.exists():
            raise ParseError(f"table file not found: {table_file}", f"{ppath}.path")
        try:
            tdoc = json.loads(table_file.read_text())
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON in table file: {err}", f"{ppath}.path")
        source, spath = _as_obj(tdoc, f"{ppath}.path:<content>"), f"{ppath}.path:<content>"
    else:
        source, spath = params, ppath

    times = [_as_num(x, f"{spath}.times[{k}]")
             for k, x in enumerate(_as_list(_get(source, "times", spath), f"{spath}.times"))]
    agents_obj, apath = _sub(source, "agents", spath)
    positions = {}
    for i in range(1, n + 1):
        rows = _as_list(_get(agents_obj, str(i), apath), f"{apath}.{i}")
        positions[i] = [
            _as_vec3(row, f"{apath}.{i}[{k}]") for k, row in enumerate(rows)]
        if len(positions[i]) != len(times):
            raise ParseError(
                f"{len(positions[i])} rows for {len(times)} sample times",
                f"{apath}.{i}")
    fd_step = _as_num(source.get("fd_step", 1e-4), f"{spath}.fd_step")
    try:
        return TableTrajectory.from_samples(times, positions, fd_step=fd_step)
    except ValueError as err:
        raise ParseError(str(err), f"{spath}.times")


def parse_scenario(doc: dict, base_dir: Path | None = None) -> Scenario:
    """Convert a JSON document into a validated :class:`Scenario`.

    Raises
    ------
    ParseError
        Naming the offending field path on the first malformed field.
    """
    base_dir = base_dir or Path.cwd()
    root = _as_obj(doc, "<root>")

    meta, mpath = _sub(root, "meta", "")
    name = _as_str(_get(meta, "name", mpath), f"{mpath}.name")
    seed = _as_int(_get(meta, "seed", mpath), f"{mpath}.seed")
    description = _as_str(meta.get("description", ""), f"{mpath}.description")

    agents = _as_list(_get(root, "agents", ""), "agents")
    if len(agents) < 2:
        raise ParseError(f"need at least 2 agents, got {len(agents)}", "agents")
    n = len(agents)

    quad_params, gains_list, states = [], [], []
    leader_gains = LeaderGains()
    seen_ids = set()
    for idx, entry in enumerate(agents):
        apath = f"agents[{idx}]"
        aobj = _as_obj(entry, apath)
        aid = _as_int(_get(aobj, "id", apath), f"{apath}.id")
        if aid != idx + 1:
            raise ParseError(f"agent ids must be 1..{n} in order, got {aid}",
                             f"{apath}.id")
        seen_ids.add(aid)
        mass = _as_num(aobj.get("mass", 1.0), f"{apath}.mass")
        try:
            quad_params.append(QuadrotorParams(mass=mass))
        except ValueError as err:
            raise ParseError(str(err), f"{apath}.mass")

        gobj, gpath = _sub(aobj, "gains", apath)
        try:
            g = ControlGains(
                kp=_as_num(_get(gobj, "kp", gpath), f"{gpath}.kp"),
                kd=_as_num(_get(gobj, "kd", gpath), f"{gpath}.kd"),
                n_gain=_as_num(_get(gobj, "n_gain", gpath), f"{gpath}.n_gain"),
                ko=_as_num(gobj.get("ko", 0.0), f"{gpath}.ko"),
                yaw=_as_num(gobj.get("yaw", 0.0), f"{gpath}.yaw"))
        except ValueError as err:
            raise ParseError(str(err), gpath)
        gains_list.append(g)
        if aid == 1:
            leader_gains = LeaderGains(kp=g.kp, kd=g.kd)

        iobj, ipath = _sub(aobj, "initial", apath)
        p0 = _as_vec3(_get(iobj, "p", ipath), f"{ipath}.p")
        v0 = _as_vec3(iobj.get("v", [0.0, 0.0, 0.0]), f"{ipath}.v")
        rpy = _as_vec3(iobj.get("rpy", [0.0, 0.0, 0.0]), f"{ipath}.rpy")
        states.append(QuadrotorState(p=p0, v=v0,
                                     R=rotation_from_rpy(rpy[0], rpy[1], rpy[2])))

    graph = _parse_graph(root, n)
    provider, kind, pe_params = _parse_trajectory(root, n, base_dir)

    cobj = _as_obj(root.get("collision", {}), "collision")
    try:
        collision = CollisionParams(
            r=_as_num(cobj.get("r", 0.10), "collision.r"),
            eps_inner=_as_num(cobj.get("eps_inner", 0.3), "collision.eps_inner"),
            eps_outer=_as_num(cobj.get("eps_outer", 0.8), "collision.eps_outer"))
    except ValueError as err:
        raise ParseError(str(err), "collision")

    sobj, spath = _sub(root, "sim", "")
    duration = _as_num(_get(sobj, "duration", spath), f"{spath}.duration")
    physics_dt = _as_num(sobj.get("physics_dt", 0.001), f"{spath}.physics_dt")
    control_rate = _as_num(sobj.get("control_rate", 100.0), f"{spath}.control_rate")
    udot_mode = _as_str(sobj.get("udot_mode", "backward_diff"), f"{spath}.udot_mode")
    nobj = _as_obj(sobj.get("noise", {}), f"{spath}.noise")
    try:
        noise = NoiseModel(
            bearing_sigma=_as_num(nobj.get("bearing_sigma", 0.0),
                                  f"{spath}.noise.bearing_sigma"),
            relvel_sigma=_as_num(nobj.get("relvel_sigma", 0.0),
                                 f"{spath}.noise.relvel_sigma"),
            delay_ticks=_as_int(nobj.get("delay_ticks", 0),
                                f"{spath}.noise.delay_ticks"))
    except ValueError as err:
        raise ParseError(str(err), f"{spath}.noise")

    oobj = _as_obj(root.get("outputs", {}), "outputs")
    csv_path = _as_str(oobj.get("csv_path", f"{name}.csv"), "outputs.csv_path")
    summary_path = _as_str(oobj.get("summary_path", f"{name}_summary.json"),
                           "outputs.summary_path")

    scenario = Scenario(
        name=name, description=description, seed=seed, graph=graph,
        quad_params=tuple(quad_params), gains=tuple(gains_list),
        leader_gains=leader_gains, initial_states=tuple(states),
        provider=provider, trajectory_kind=kind, pe_params=pe_params,
        collision=collision, noise=noise, duration=duration,
        physics_dt=physics_dt, control_rate=control_rate, udot_mode=udot_mode,
        csv_path=csv_path, summary_path=summary_path, raw=root)

    try:
        scenario.to_sim_config()
    except (ValueError, SimulationError) as err:
        raise ParseError(f"inconsistent configuration: {err}", "sim")
    return scenario


# ---------------------------------------------------------------------------
# bundled scenarios
# ---------------------------------------------------------------------------

def bundled_scenario_names() -> list[str]:
    root = resources.files("bfsim") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(arg: str | Path) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(arg)
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON: {err}", str(path))
        return parse_scenario(doc, base_dir=path.parent)
    name = str(arg)
    root = resources.files("bfsim") / "scenarios"
    candidate = root / f"{name}.json"
    try:
        text = candidate.read_text()
    except (FileNotFoundError, OSError):
        raise ParseError(
            f"no such file, and no bundled scenario named {name!r} "
            f"(bundled: {', '.join(bundled_scenario_names())})")
    return parse_scenario(json.loads(text), base_dir=Path.cwd())


# ---------------------------------------------------------------------------
# validation (cmd_check)
# ---------------------------------------------------------------------------

def validate_scenario(scenario: Scenario) -> tuple[ValidationReport, dict]:
    """Topology, gain, boundedness, and BPE checks for one scenario.

    Returns the report plus the raw per-follower BPE results (empty when
    the BPE check could not run).
    """
    report = ValidationReport()
    topo = validate_topology(scenario.graph)
    report.extend(topo)

    gains_map = {i: scenario.gains[i - 1] for i in range(1, scenario.graph.n + 1)}
    if topo.ok:
        report.extend(validate_gains(scenario.graph, gains_map))

    report.extend(check_boundedness(scenario.provider, scenario.graph.n,
                                    horizon=scenario.duration))

    bpe_results: dict = {}
    if not topo.ok:
        report.add_warn("bpe", "skipped: topology invalid")
        return report, bpe_results
    if scenario.duration < scenario.pe_params.window:
        report.add_warn("bpe", f"skipped: duration {scenario.duration} s shorter "
                               f"than PE window {scenario.pe_params.window} s")
        return report, bpe_results
    try:
        bpe_results = is_bpe(scenario.provider, scenario.graph,
                             horizon=scenario.duration, params=scenario.pe_params)
    except CoincidentAgents as err:
        report.add_fail("bpe", f"desired formation degenerates: {err}")
        return report, bpe_results
    for agent, res in sorted(bpe_results.items()):
        detail = (f"min window eigenvalue {res.min_eigenvalue:.4f} "
                  f"(mu_min {res.mu_min}, {res.windows} windows)")
        if res.is_pe:
            report.add_pass(f"bpe_agent_{agent}", detail)
        else:
            report.add_fail(f"bpe_agent_{agent}", detail)
    return report, bpe_results


def cmd_check(scenario_arg: str) -> int:
    """Validate a scenario; exit 0 on pass (warnings allowed), 1 on failure."""
    try:
        scenario = load_scenario(scenario_arg)
    except ParseError as err:
        print(f"parse error: {err}")
        return 1
    report, _ = validate_scenario(scenario)
    print(f"scenario: {scenario.name}")
    print(report.format())
    if not report.ok:
        print("RESULT: FAIL")
        return 1
    print("RESULT: OK" + (" (with warnings)" if report.warnings else ""))
    return 0


# ---------------------------------------------------------------------------
# serialization (cmd_run)
# ---------------------------------------------------------------------------

def csv_header(graph: SensingGraph) -> list[str]:
    """Column names; a pure function of the agent count and sensing graph."""
    cols = ["t"]
    for i in range(1, graph.n + 1):
        cols.extend(f"a{i}_{f}" for f in _AGENT_FIELDS)
    for i in graph.followers:
        cols.extend((f"a{i}_ep", f"a{i}_ev", f"a{i}_erot"))
    for i, j in graph.edges:
        cols.extend((f"e{i}_{j}_d", f"e{i}_{j}_minus_uc_dot_g"))
    return cols


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def record_to_csv(record: SimRecord) -> str:
    """Serialize a record with 17 significant digits for bit-stable round-trips."""
    graph = record.graph
    n = graph.n
    followers = list(graph.followers)
    ep = {i: position_errors(record, i) for i in followers}
    ev = {i: velocity_errors(record, i) for i in followers}
    er = {i: rotation_errors(record, i) for i in followers}

    lines = [",".join(csv_header(graph))]
    ticks = record.t.shape[0]
    for k in range(ticks):
        vals: list[float] = [record.t[k]]
        for i in range(n):
            vals.extend(record.p[k, i])
            vals.extend(record.v[k, i])
            vals.extend(record.R[k, i].reshape(9))
            vals.append(record.thrust[k, i])
            vals.extend(record.omega[k, i])
            vals.extend(record.u_b[k, i])
            vals.extend(record.u_c[k, i])
        for i in followers:
            vals.extend((ep[i][k], ev[i][k], er[i][k]))
        for e in range(len(record.edges)):
            vals.extend((record.d_edge[k, e], record.minus_uc_dot_g[k, e]))
        lines.append(",".join(f"{x:.17g}" for x in vals))
    return "\n".join(lines) + "\n"


def _metrics_to_dict(metrics) -> dict:
    return {
        "threshold": metrics.threshold,
        "followers": [
            {"agent": f.agent,
             "final_position_error": f.final_position_error,
             "max_position_error": f.max_position_error,
             "final_velocity_error": f.final_velocity_error,
             "max_velocity_error": f.max_velocity_error,
             "final_rotation_error": f.final_rotation_error,
             "max_rotation_error": f.max_rotation_error,
             "time_to_threshold": f.time_to_threshold}
            for f in metrics.followers],
        "min_edge_range": {f"{i}->{j}": val
                           for (i, j), val in sorted(metrics.min_edge_range.items())},
        "min_edge_separation": {f"{i}->{j}": val
                                for (i, j), val in sorted(metrics.min_edge_separation.items())},
        "min_pair_separation": metrics.min_pair_separation,
    }


def write_outputs(scenario: Scenario, config: SimConfig, record: SimRecord,
                  report: ValidationReport, bpe_results: dict,
                  out_dir: Path) -> tuple[Path, Path]:
    """Write the CSV and summary documents atomically; returns their paths."""
    csv_path = out_dir / scenario.csv_path
    summary_path = out_dir / scenario.summary_path
    _atomic_write(csv_path, record_to_csv(record))

    metrics = compute_metrics(record)
    summary = {
        "scenario": scenario.name,
        "description": scenario.description,
        "seed": config.seed,
        "rng": record.rng_name,
        "plant": config.plant,
        "duration": config.duration,
        "control_rate": config.control_rate,
        "physics_dt": config.physics_dt,
        "udot_mode": config.udot_mode,
        "metrics": _metrics_to_dict(metrics),
        "validation": [{"name": it.name, "status": it.status, "detail": it.detail}
                       for it in report.items],
        "bpe_min_eigenvalues": {str(a): r.min_eigenvalue
                                for a, r in sorted(bpe_results.items())},
        "config": scenario.raw,
    }
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return csv_path, summary_path


def cmd_run(scenario_arg: str, seed: int | None = None,
            duration: float | None = None, out_dir: str | Path = ".",
            force: bool = False) -> int:
    """Validate, simulate, and serialize one scenario run."""
    try:
        scenario = load_scenario(scenario_arg)
    except ParseError as err:
        print(f"parse error: {err}")
        return 1
    report, bpe_results = validate_scenario(scenario)
    if not report.ok:
        print(report.format())
        if not force:
            print("refusing to run an invalid scenario (use --force to override)")
            return 1
        print("continuing despite failures (--force)")

    config = scenario.to_sim_config(seed=seed, duration=duration)
    try:
        record = run(config)
    except SimulationError as err:
        print(f"simulation aborted: {type(err).__name__}: {err}")
        return 1

    csv_path, summary_path = write_outputs(
        scenario, config, record, report, bpe_results, Path(out_dir))
    for warn in report.warnings:
        print(f"warning: {warn.name}: {warn.detail}")
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    return 0


def cmd_list_scenarios() -> int:
    """Print the bundled scenarios with their one-line descriptions."""
    for name in bundled_scenario_names():
        scenario = load_scenario(name)
        print(f"{name:22s} {scenario.description}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bfsim",
        description="Bearing-based multi-quadrotor formation tracking simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a scenario file")
    p_check.add_argument("scenario", help="scenario file path or bundled name")

    p_run = sub.add_parser("run", help="simulate a scenario and write CSV/summary")
    p_run.add_argument("scenario", help="scenario file path or bundled name")
    p_run.add_argument("--seed", type=int, default=None, help="override meta.seed")
    p_run.add_argument("--duration", type=float, default=None,
                       help="override sim.duration [s]")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--force", action="store_true",
                       help="run even if validation fails")

    sub.add_parser("list-scenarios", help="list bundled scenarios")

    args = parser.parse_args(argv)
    if args.command == "check":
        return cmd_check(args.scenario)
    if args.command == "run":
        return cmd_run(args.scenario, seed=args.seed, duration=args.duration,
                       out_dir=args.out, force=args.force)
    if args.command == "list-scenarios":
        return cmd_list_scenarios()
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
