"""
Command implementations for the csf-sim CLI
Each command returns a process exit code: 0 ok, 1 domain or validation failure, 2 I/O failure
"""
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from core.engine import Simulation
from core.errors import CSFError, ScenarioError, ValidationError
from core.frames import DeploymentPolicy, EngineParams
from scenario.builtins import BUILTINS, builtin, builtin_names
from scenario.parser import load_scenario
from scenario.schema import Scenario
from scenario.validator import errors_only, validate
from ui.colors import ColorThemes, paint
from ui.report import find_update, format_explain, format_summary, read_trace, summarize, write_trace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

TRACE_DIR = Path("traces")


class RunConfig(BaseModel):
    """What to run and how; overrides left as None keep the scenario's params"""
    model_config = ConfigDict(frozen=True)

    scenario: str
    ticks: int = Field(10, ge=0)
    seed: int = 0
    trace: Optional[Path] = None
    epsilon: Optional[float] = None
    alpha: Optional[float] = None
    policy: Optional[DeploymentPolicy] = None
    decay_lambda: Optional[float] = None
    decay_theta: Optional[float] = None

    def params_for(self, scenario: Scenario) -> EngineParams:
        return scenario.params.with_overrides(
            epsilon_salience=self.epsilon,
            alpha_default=self.alpha,
            policy=self.policy,
            decay_lambda=self.decay_lambda,
            decay_theta=self.decay_theta,
        )

    def trace_path(self, scenario: Scenario) -> Path:
        return self.trace or TRACE_DIR / f"{scenario.name}_seed{self.seed}.jsonl"


def resolve_scenario(ref: str) -> Scenario:
    """A scenario file path, or the name of a built-in when no such file exists"""
    path = Path(ref)
    if not path.exists() and ref in BUILTINS:
        return builtin(ref)
    return load_scenario(path)


def _error(message: str):
    print(paint(f"error: {message}", ColorThemes.ERROR, sys.stderr), file=sys.stderr)


def _print_diagnostic(source: str, diagnostic):
    color = ColorThemes.ERROR if diagnostic.is_error else ColorThemes.WARNING
    print(paint(f"{source}:{diagnostic}", color, sys.stderr), file=sys.stderr)


def _print_scenario_error(source: str, error: ScenarioError):
    where = f"{error.line}:{error.column}: " if error.line is not None else ""
    at = f" (at {error.path})" if error.path else ""
    print(paint(f"{source}:{where}error: {error.message}{at}", ColorThemes.ERROR, sys.stderr), file=sys.stderr)


def _report_failure(source: str, error: Exception) -> int:
    if isinstance(error, OSError):
        _error(f"cannot access {source}: {error.strerror or error}")
        return EXIT_IO
    if isinstance(error, ScenarioError):
        _print_scenario_error(source, error)
    elif isinstance(error, ValidationError):
        for diagnostic in error.diagnostics:
            _print_diagnostic(source, diagnostic)
    elif isinstance(error, PydanticValidationError):
        problem = error.errors()[0]
        _error(f"invalid override {'.'.join(str(part) for part in problem['loc'])}: {problem['msg']}")
    else:
        _error(str(error))
    return EXIT_DOMAIN


def cmd_run(config: RunConfig) -> int:
    """Run a scenario, write its trace and print summary statistics"""
    try:
        scenario = resolve_scenario(config.scenario)
        simulation = Simulation(scenario, config.seed, config.params_for(scenario))
        trace = simulation.run(config.ticks)
        path = write_trace(trace, config.trace_path(scenario))
    except (OSError, CSFError, PydanticValidationError) as e:
        return _report_failure(config.scenario, e)

    logger.info(f"trace written to {path}")
    summary = summarize(event.to_dict() for event in trace)
    for line in format_summary(summary, sys.stdout):
        print(line)
    print(f"trace: {path}")
    return EXIT_OK


def cmd_explain(config: RunConfig, tick: int, agent: str, trace_file: Optional[Path] = None) -> int:
    """
    Show how one agent's salient set was decided at one tick.
    Reads the given trace file, or re-runs the scenario up to that tick.
    """
    source = str(trace_file or config.scenario)
    try:
        if trace_file is not None:
            records = read_trace(trace_file)
        else:
            if tick < 0 or tick >= config.ticks:
                _error(f"tick {tick} is outside the run (0..{config.ticks - 1})")
                return EXIT_DOMAIN
            scenario = resolve_scenario(config.scenario)
            simulation = Simulation(scenario, config.seed, config.params_for(scenario))
            records = [event.to_dict() for event in simulation.run(tick + 1)]
    except (OSError, CSFError, ValueError) as e:
        return _report_failure(source, e)

    payload = find_update(records, tick, agent)
    if payload is None:
        _error(f"no update for agent '{agent}' at tick {tick}")
        return EXIT_DOMAIN
    for line in format_explain(payload, tick, agent, sys.stdout):
        print(line)
    return EXIT_OK


def cmd_validate(path: str) -> int:
    """Print diagnostics to stderr; exit 0 when there are no errors"""
    try:
        scenario = resolve_scenario(path)
    except (OSError, ScenarioError) as e:
        return _report_failure(path, e)

    diagnostics = validate(scenario)
    for diagnostic in diagnostics:
        _print_diagnostic(path, diagnostic)
    if errors_only(diagnostics):
        return EXIT_DOMAIN
    print(f"{path}: ok ({len(diagnostics)} warnings)")
    return EXIT_OK


def cmd_list() -> int:
    for name in builtin_names():
        print(f"{paint(f'{name:<16}', ColorThemes.HEADING, sys.stdout)}  {BUILTINS[name]}")
    return EXIT_OK


def available_policies() -> List[str]:
    return [policy.value for policy in DeploymentPolicy]
