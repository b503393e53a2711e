from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from placeran import __version__
from placeran.config import FIELD_NAMES, LOG_LEVELS, RunConfig, resolve_config
from placeran.domain import (
    Topology,
    dump_topology,
    load_topology,
    topology_to_dict,
    validate_topology,
)
from placeran.errors import (
    BudgetExceededError,
    ConfigError,
    PlaceranError,
    TopologyError,
)
from placeran.lp_parser import load_lp
from placeran.pathgen import Instance, PathMetric, build_instance, dump_candidates
from placeran.program import (
    IntegerProgram,
    ObjectiveMode,
    build_stage1,
    build_stage2,
    build_stage3,
    dump_program,
    export_lp,
    lp_text,
)
from placeran.report import (
    compute_metrics,
    k_sweep,
    write_report_csv,
    write_report_json,
    write_sweep_csv,
    write_sweep_json,
)
from placeran.scenario import (
    CapacityScenario,
    RuConfig,
    ScenarioSpec,
    TopologyKind,
    build_scenario,
    load_params,
)
from placeran.solve import (
    Backend,
    SolveStatus,
    brute_force,
    dump_solution,
    load_solution,
    solution_to_dict,
    solve_lexicographic,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"

# Findings that leave the topology solvable; unreachable RUs end as infeasible
TOLERATED_VIOLATIONS = frozenset({"unreachable-ru", "disconnected", "no-ru"})


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as `ConfigError` instead of exiting"""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def _emit(data: Any, out: Optional[Path]):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        logger.info("wrote %s", out)


def _fail(error: PlaceranError) -> int:
    sys.stderr.write(json.dumps(error.to_dict(), sort_keys=True, default=str) + "\n")
    return error.exit_code


def _scenario_spec(args: argparse.Namespace, config: RunConfig) -> ScenarioSpec:
    if args.topology is None:
        raise ConfigError("a scenario needs --topology (or --in with a topology file)")

    kind = TopologyKind(args.topology)
    return ScenarioSpec(
        topology_kind=kind,
        capacity=CapacityScenario(args.capacity),
        ru_config=RuConfig(args.ru),
        seed=config.seed,
        params=load_params(args.params, kind) if args.params is not None else None,
        ru_count=args.ru_count,
    )


def _checked_topology(path: Path) -> Topology:
    """Loads a topology and refuses one with structural violations"""

    topology = load_topology(path)
    report = validate_topology(topology)
    fatal = [v for v in report if v.code not in TOLERATED_VIOLATIONS]
    if fatal:
        raise TopologyError(
            f"{path}: {fatal[0].message}",
            violations=[v.code for v in fatal],
        )
    for violation in report:
        logger.warning("%s: %s", path, violation.message)
    return topology


def _instance(args: argparse.Namespace, config: RunConfig) -> Instance:
    topology = _checked_topology(args.input)
    return build_instance(topology, config.load_catalog(topology), config.k, config.metric())


def run_gen(args: argparse.Namespace, config: RunConfig) -> int:
    topology = build_scenario(_scenario_spec(args, config))
    if args.out is None:
        _emit(topology_to_dict(topology), None)
    else:
        dump_topology(topology, args.out)
        logger.info("wrote %s", args.out)
    return 0


def run_solve(args: argparse.Namespace, config: RunConfig) -> int:
    instance = _instance(args, config)
    if args.dump_candidates is not None:
        dump_candidates(instance, args.dump_candidates)

    mode = config.mode()
    if args.dump_program is not None:
        dump_program(build_stage1(instance, mode), args.dump_program)

    stages = solve_lexicographic(instance, config.limits(), mode)
    final = next((s for s in reversed(stages) if s.choice is not None), stages[0])
    if args.out is None:
        _emit(solution_to_dict(final, stages), None)
    else:
        dump_solution(final, args.out, stages)

    if config.require_optimal:
        for solution in stages:
            if not solution.certified:
                raise BudgetExceededError(
                    f"stage {solution.stage} ended {solution.status.value}",
                    stage=solution.stage,
                    bound=solution.bound,
                )
    return 0


def run_report(args: argparse.Namespace, config: RunConfig) -> int:
    topology = load_topology(args.input)
    catalog = config.load_catalog(topology)
    solution = load_solution(args.sol, topology, catalog)
    reportable = solution.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE)
    if not reportable or not solution.assignment:
        raise PlaceranError(
            f"{args.sol} holds no placement to report", status=solution.status.value
        )

    report = compute_metrics(solution, topology, catalog, config.reference_latency)
    if args.out is None:
        _emit(report.to_dict(), None)
    elif args.out.suffix == ".csv":
        write_report_csv(report, args.out)
    else:
        write_report_json(report, args.out)
    return 0


def run_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    if args.input is not None:
        source: Union[Topology, ScenarioSpec] = _checked_topology(args.input)
    else:
        source = _scenario_spec(args, config)
    rows = k_sweep(
        source,
        args.max_k,
        config.limits(),
        config.load_catalog() if config.catalog is not None else None,
        config.mode(),
        config.metric(),
    )
    if args.out is None:
        _emit([asdict(row) for row in rows], None)
    elif args.out.suffix == ".csv":
        write_sweep_csv(rows, args.out)
    else:
        write_sweep_json(rows, args.out)
    return 0


def run_oracle(args: argparse.Namespace, config: RunConfig) -> int:
    instance = _instance(args, config)
    result = brute_force(instance)
    _emit(
        {
            "objective_vector": list(result.vector),
            "candidate_product": instance.candidate_product(),
            "assignment": {ru: c.describe() for ru, c in sorted(result.assignment.items())},
        },
        args.out,
    )
    return 0


def run_export(args: argparse.Namespace, config: RunConfig) -> int:
    instance = _instance(args, config)
    mode = config.mode()
    if args.stage >= 2 and args.v1 is None:
        raise ConfigError(f"stage {args.stage} needs --v1")
    if args.stage == 3 and args.v2 is None:
        raise ConfigError("stage 3 needs --v2")

    program = build_stage1(instance, mode)
    if args.stage == 2:
        program = build_stage2(instance, args.v1, mode, program.model)
    elif args.stage == 3:
        program = build_stage3(instance, args.v1, args.v2, mode, program.model)

    if args.out is None:
        sys.stdout.write(lp_text(program))
    else:
        export_lp(program, args.out)
    return 0


def _program_summary(program: IntegerProgram) -> dict[str, Any]:
    rows = Counter(
        row.tag.value if row.tag is not None else "untagged" for row in program.constraints
    )
    kinds = Counter(v.kind.value for v in program.variables.values())
    return {
        "valid": True,
        "sense": program.sense.value,
        "variables": dict(sorted(kinds.items())),
        "rows": dict(sorted(rows.items())),
    }


def run_validate(args: argparse.Namespace, config: RunConfig) -> int:
    config.load_catalog()
    if args.lp is not None:
        try:
            program = load_lp(args.lp)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.lp}: {exc}", path=str(args.lp)) from exc
        _emit(_program_summary(program), None)
        return 0

    report = validate_topology(load_topology(args.input))
    _emit(report.to_dict(), None)
    return 0 if report.ok else 2


def _common() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed of every random draw")
    common.add_argument(
        "--catalog", help="DRC catalog JSON, by default the packaged one of the topology"
    )
    common.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS)
    common.add_argument("--config", type=Path, help="JSON file of settings")
    return common


def _add_scenario(parser: argparse.ArgumentParser, required: bool):
    parser.add_argument(
        "--topology", choices=[k.value for k in TopologyKind], required=required
    )
    parser.add_argument(
        "--capacity", choices=[c.value for c in CapacityScenario], default="LC"
    )
    parser.add_argument("--ru", choices=[c.value for c in RuConfig], default="F1")
    parser.add_argument("--ru-count", dest="ru_count", type=int)
    parser.add_argument("--params", type=Path, help="JSON overrides of the class table")


def _add_paths(parser: argparse.ArgumentParser):
    parser.add_argument("--k", type=int, help="routes kept per RU")
    parser.add_argument(
        "--path-metric", dest="path_metric", choices=[m.value for m in PathMetric]
    )


def _add_search(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--objective-mode", dest="objective_mode", choices=[m.value for m in ObjectiveMode]
    )
    parser.add_argument("--time-limit", dest="time_limit", type=float)
    parser.add_argument("--node-limit", dest="node_limit", type=int)
    parser.add_argument("--solver", choices=[b.value for b in Backend])
    parser.add_argument("--workers", type=int)
    parser.add_argument("--gap", type=float)


def build_parser() -> ArgumentParser:
    common = _common()
    parser = ArgumentParser(
        prog="placeran",
        description="Plans where the CU, DU and RU functions of every radio site run.",
    )
    parser.add_argument("--version", action="version", version=f"placeran {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    gen = commands.add_parser("gen", parents=[common], help="generate a scenario topology")
    _add_scenario(gen, required=True)
    gen.add_argument("--out", type=Path)
    gen.set_defaults(handler=run_gen)

    solve = commands.add_parser("solve", parents=[common], help="solve the three stages")
    solve.add_argument("--in", dest="input", type=Path, required=True)
    _add_paths(solve)
    _add_search(solve)
    solve.add_argument(
        "--require-optimal", dest="require_optimal", action="store_const", const=True
    )
    solve.add_argument("--out", type=Path)
    solve.add_argument("--dump-candidates", dest="dump_candidates", type=Path)
    solve.add_argument("--dump-program", dest="dump_program", type=Path)
    solve.set_defaults(handler=run_solve)

    report = commands.add_parser("report", parents=[common], help="evaluate a solution")
    report.add_argument("--sol", type=Path, required=True)
    report.add_argument("--in", dest="input", type=Path, required=True)
    report.add_argument("--reference-latency", dest="reference_latency", type=float)
    report.add_argument("--out", type=Path, help="a .csv or .json file")
    report.set_defaults(handler=run_report)

    sweep = commands.add_parser("sweep-k", parents=[common], help="stage one for k = 1..max")
    sweep.add_argument("--in", dest="input", type=Path)
    _add_scenario(sweep, required=False)
    sweep.add_argument("--max-k", dest="max_k", type=int, required=True)
    _add_paths(sweep)
    _add_search(sweep)
    sweep.add_argument("--out", type=Path, help="a .csv or .json file")
    sweep.set_defaults(handler=run_sweep)

    oracle = commands.add_parser("oracle", parents=[common], help="enumerate a small instance")
    oracle.add_argument("--in", dest="input", type=Path, required=True)
    _add_paths(oracle)
    oracle.add_argument("--out", type=Path)
    oracle.set_defaults(handler=run_oracle)

    export = commands.add_parser("export-lp", parents=[common], help="write a stage as LP text")
    export.add_argument("--in", dest="input", type=Path, required=True)
    _add_paths(export)
    export.add_argument(
        "--objective-mode", dest="objective_mode", choices=[m.value for m in ObjectiveMode]
    )
    export.add_argument("--stage", type=int, choices=(1, 2, 3), default=1)
    export.add_argument("--v1", type=int, help="first objective value fixed from stage two on")
    export.add_argument("--v2", type=int, help="distinct DRCs fixed in stage three")
    export.add_argument("--out", type=Path)
    export.set_defaults(handler=run_export)

    validate = commands.add_parser(
        "validate", parents=[common], help="check a topology or an LP file"
    )
    source = validate.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", type=Path)
    source.add_argument("--lp", type=Path, help="an LP file to parse and summarize")
    validate.set_defaults(handler=run_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        flags = {name: getattr(args, name, None) for name in FIELD_NAMES}
        config = resolve_config(flags, args.config)
    except PlaceranError as exc:
        return _fail(exc)

    logging.basicConfig(level=config.log_level, format=LOG_FORMAT, stream=sys.stderr)
    logger.info("placeran %s %s", __version__, args.command)

    handler: Callable[[argparse.Namespace, RunConfig], int] = args.handler
    try:
        return handler(args, config)
    except PlaceranError as exc:
        return _fail(exc)
    except ValueError as exc:
        return _fail(PlaceranError(str(exc)))


if __name__ == "__main__":
    raise SystemExit(main())
