"""
Scenario Validator for csf-sim
Semantic checks on a parsed (or hand-built) scenario. Problems are returned as
diagnostics rather than raised, so a caller can report all of them at once.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Set, Tuple

from core.conditions import Condition
from scenario.locator import Path as JsonPath, format_path
from scenario.schema import Scenario

logger = logging.getLogger(__name__)

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    path: str = ""
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line is not None else ""
        at = f" (at {self.path})" if self.path else ""
        return f"{where}{self.severity}: {self.message}{at}"


def errors_only(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return [diagnostic for diagnostic in diagnostics if diagnostic.is_error]


def _declared_attributes(scenario: Scenario) -> Set[str]:
    names = set()
    for attributes in scenario.entities.values():
        names.update(attributes)
    for event in scenario.events:
        names.update(event.set)
        names.update(event.choose)
    return names


def _conditions(scenario: Scenario) -> Iterator[Tuple[JsonPath, Condition]]:
    """Every condition of the scenario with the path it was declared at"""
    for frame_id, frame in scenario.frames.items():
        for i, rule in enumerate(frame.construal):
            yield ("frames", frame_id, "construal", i, "filter"), rule.filter
        for i, term in enumerate(frame.fitness.terms):
            yield ("frames", frame_id, "fitness", "terms", i, "when"), term.condition
    for resource_id, resource in scenario.resources.items():
        for i, rule in enumerate(resource.rules):
            yield ("resources", resource_id, "rules", i, "when"), rule.condition


class _Checker:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.diagnostics: List[Diagnostic] = []

    def report(self, severity: str, message: str, path: JsonPath):
        line, column = self.scenario.locator.position(path) if self.scenario.locator else (None, None)
        self.diagnostics.append(Diagnostic(severity, message, format_path(path), line, column))

    def check_entities(self):
        for entity_id, attributes in self.scenario.entities.items():
            if "location" not in attributes:
                self.report(ERROR, f"entity '{entity_id}' has no location", ("entities", entity_id))

    def check_frames(self):
        used = {frame_id for agent in self.scenario.agents.values() for frame_id in agent.frames}
        for frame_id, frame in self.scenario.frames.items():
            path = ("frames", frame_id)
            if not frame.resources:
                self.report(WARNING, f"frame '{frame_id}' deploys no resources", path + ("resources",))
            for ref in sorted(frame.resources):
                if ref not in self.scenario.resources:
                    self.report(ERROR, f"frame '{frame_id}' names undeclared resource '{ref}'", path + ("resources",))
            for i, rule in enumerate(frame.construal):
                attribute = rule.annotate.referenced_attribute()
                if attribute and attribute not in rule.filter.attributes_guaranteed():
                    self.report(
                        WARNING,
                        f"annotation reads attribute '{attribute}' that the filter does not require",
                        path + ("construal", i, "annotate", "value"),
                    )
            if frame_id not in used:
                self.report(WARNING, f"frame '{frame_id}' is not held by any agent", path)

    def check_agents(self):
        for agent_id, agent in self.scenario.agents.items():
            path = ("agents", agent_id)
            if agent_id not in self.scenario.entities:
                self.report(ERROR, f"agent '{agent_id}' has no entity in the environment", path)
            for i, ref in enumerate(agent.frames):
                if ref not in self.scenario.frames:
                    self.report(ERROR, f"agent '{agent_id}' names undeclared frame '{ref}'", path + ("frames", i))
            for ref in sorted(agent.profile.preferences):
                if ref not in agent.frames:
                    self.report(ERROR, f"preference for unknown frame '{ref}'", path + ("preferences", ref))
            for ref in sorted(agent.profile.default_salient):
                if ref not in agent.frames:
                    self.report(ERROR, f"default_salient names unknown frame '{ref}'", path + ("default_salient",))

    def check_events(self):
        for i, event in enumerate(self.scenario.events):
            if event.entity not in self.scenario.entities:
                self.report(ERROR, f"event targets undeclared entity '{event.entity}'", ("events", i, "entity"))

    def check_attribute_names(self):
        declared = _declared_attributes(self.scenario)
        for path, condition in _conditions(self.scenario):
            for i, atom in enumerate(condition.atoms):
                if atom.kind == "attr" and atom.argument not in declared:
                    self.report(ERROR, f"attribute '{atom.argument}' is never declared", path + (i, "sel"))
        for frame_id, frame in self.scenario.frames.items():
            for i, rule in enumerate(frame.construal):
                attribute = rule.annotate.referenced_attribute()
                if attribute and attribute not in declared:
                    self.report(
                        ERROR, f"attribute '{attribute}' is never declared",
                        ("frames", frame_id, "construal", i, "annotate", "value"),
                    )


def validate(scenario: Scenario) -> List[Diagnostic]:
    """
    Semantic diagnostics, errors and warnings; an empty list means the scenario runs cleanly.
    Never raises.
    """
    checker = _Checker(scenario)
    checker.check_entities()
    checker.check_frames()
    checker.check_agents()
    checker.check_events()
    checker.check_attribute_names()
    for diagnostic in checker.diagnostics:
        logger.info(f"{scenario.name}: {diagnostic}")
    return checker.diagnostics
