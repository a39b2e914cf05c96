"""
Scenario Parser for csf-sim
Turns a JSON scenario document into a fully resolved Scenario, filling defaults and
reporting the first problem found with its position in the document
"""
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type

from pydantic import ValidationError as PydanticValidationError

from core.conditions import OPERATORS, Atom, Condition, split_selector
from core.errors import DanglingReference, DomainError, ParseError, ScenarioError
from core.frames import EngineParams
from core.model import (
    ActionTemplate, AgentSpec, Annotation, CognitiveResource, CognitiveSocialFrame, ConstrualRule,
    Effect, FitnessExpr, FitnessTerm, MechanismRule, Profile, ResourceKind, is_scalar,
)
from scenario.locator import Path as JsonPath, SourceLocator, format_path
from scenario.schema import Scenario, ScriptedEvent

logger = logging.getLogger(__name__)

ID_PATTERN = re.compile(r"[a-z][a-z0-9_]*\Z")
TOP_LEVEL_KEYS = ("name", "description", "params", "entities", "frames", "resources", "agents", "events")
EFFECT_TARGETS = ("actor", "target")


class _DuplicateKey(Exception):
    def __init__(self, key: str):
        self.key = key
        super().__init__(key)


def _reject_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    result = {}
    for key, value in pairs:
        if key in result:
            raise _DuplicateKey(key)
        result[key] = value
    return result


class _NonFiniteNumber(Exception):
    def __init__(self, literal: str):
        self.literal = literal
        super().__init__(literal)


def _reject_non_finite(literal: str):
    raise _NonFiniteNumber(literal)


def _position(document: str, pattern: str, last: bool = False) -> Tuple[int, int]:
    """1-based line/column of the first (or last) match of pattern, (1, 1) if none"""
    matches = list(re.finditer(pattern, document))
    offset = (matches[-1] if last else matches[0]).start() if matches else 0
    line = document.count("\n", 0, offset) + 1
    column = offset - (document.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class _DocumentReader:
    """Shape checks over the decoded document; every failure is located"""

    def __init__(self, locator: SourceLocator):
        self.locator = locator

    def fail(self, error: Type[ScenarioError], message: str, path: JsonPath):
        line, column = self.locator.position(path)
        raise error(message, format_path(path), line, column)

    def dangling(self, ref: str, kind: str, path: JsonPath):
        line, column = self.locator.position(path)
        raise DanglingReference(ref, kind, format_path(path), line, column)

    def object(self, value, path: JsonPath, required: bool = False) -> Dict[str, Any]:
        if value is None and not required:
            return {}
        if not isinstance(value, dict):
            self.fail(ParseError, "expected an object", path)
        return value

    def list(self, value, path: JsonPath) -> List[Any]:
        if value is None:
            return []
        if not isinstance(value, list):
            self.fail(ParseError, "expected a list", path)
        return value

    def text(self, value, path: JsonPath, allow_empty: bool = False) -> str:
        if not isinstance(value, str) or (not value and not allow_empty):
            self.fail(ParseError, "expected a non-empty string" if not allow_empty else "expected a string", path)
        return value

    def identifier(self, value, path: JsonPath) -> str:
        self.text(value, path)
        if not ID_PATTERN.match(value):
            self.fail(DomainError, f"invalid id '{value}' (expected [a-z][a-z0-9_]*)", path)
        return value

    def number(self, value, path: JsonPath, low: Optional[float] = None, high: Optional[float] = None) -> float:
        if not _is_number(value):
            self.fail(ParseError, "expected a number", path)
        if (low is not None and value < low) or (high is not None and value > high):
            self.fail(DomainError, f"{value} outside [{low}, {high}]", path)
        return value

    def integer(self, value, path: JsonPath, low: Optional[int] = None) -> int:
        if not isinstance(value, int) or isinstance(value, bool):
            self.fail(ParseError, "expected an integer", path)
        if low is not None and value < low:
            self.fail(DomainError, f"{value} is below {low}", path)
        return value

    def scalar(self, value, path: JsonPath, nullable: bool = False):
        if value is None and nullable:
            return None
        if not is_scalar(value):
            self.fail(ParseError, "expected a string, number or boolean", path)
        return value

    def scalar_table(self, value, path: JsonPath, nullable: bool = False) -> Dict[str, Any]:
        table = self.object(value, path)
        return {key: self.scalar(item, path + (key,), nullable) for key, item in table.items()}

    def known_keys(self, value: Mapping, allowed: Tuple[str, ...], path: JsonPath):
        for key in value:
            if key not in allowed:
                self.fail(ParseError, f"unexpected key '{key}'", path + (key,))


def _parse_atom(reader: _DocumentReader, raw, path: JsonPath) -> Atom:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("sel", "op", "value"), path)
    selector = reader.text(raw.get("sel"), path + ("sel",))
    try:
        split_selector(selector)
    except ValueError as e:
        reader.fail(ParseError, str(e), path + ("sel",))
    op = reader.text(raw.get("op"), path + ("op",))
    if op not in OPERATORS:
        reader.fail(ParseError, f"unknown comparator '{op}'", path + ("op",))
    if op == "exists":
        return Atom(selector, op)
    if "value" not in raw:
        reader.fail(ParseError, f"comparator '{op}' needs a value", path)
    return Atom(selector, op, reader.scalar(raw["value"], path + ("value",)))


def _parse_condition(reader: _DocumentReader, raw, path: JsonPath) -> Condition:
    atoms = reader.list(raw, path)
    return Condition(tuple(_parse_atom(reader, atom, path + (i,)) for i, atom in enumerate(atoms)))


def _parse_params(reader: _DocumentReader, raw) -> EngineParams:
    values = reader.object(raw, ("params",))
    try:
        return EngineParams(**values)
    except PydanticValidationError as e:
        problem = e.errors()[0]
        where = ("params",) + tuple(part for part in problem["loc"] if isinstance(part, (str, int)))
        error = ParseError if problem["type"] == "extra_forbidden" else DomainError
        reader.fail(error, problem["msg"], where)


def _parse_entities(reader: _DocumentReader, raw) -> Dict[str, Dict[str, Any]]:
    entities = {}
    for entity_id, attributes in reader.object(raw, ("entities",)).items():
        path = ("entities", entity_id)
        reader.identifier(entity_id, path)
        entities[entity_id] = reader.scalar_table(attributes, path)
    return entities


def _parse_frame(reader: _DocumentReader, frame_id: str, raw, path: JsonPath) -> CognitiveSocialFrame:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("construal", "fitness", "resources"), path)

    construal = []
    for i, rule in enumerate(reader.list(raw.get("construal"), path + ("construal",))):
        rule_path = path + ("construal", i)
        rule = reader.object(rule, rule_path, required=True)
        reader.known_keys(rule, ("filter", "annotate"), rule_path)
        annotate_path = rule_path + ("annotate",)
        annotate = reader.object(rule.get("annotate"), annotate_path, required=True)
        reader.known_keys(annotate, ("dimension", "value", "strength"), annotate_path)
        if "value" not in annotate:
            reader.fail(ParseError, "annotate needs a value", annotate_path)
        construal.append(ConstrualRule(
            filter=_parse_condition(reader, rule.get("filter"), rule_path + ("filter",)),
            annotate=Annotation(
                dimension=reader.text(annotate.get("dimension"), annotate_path + ("dimension",)),
                value=reader.scalar(annotate["value"], annotate_path + ("value",)),
                strength=reader.number(annotate.get("strength", 1.0), annotate_path + ("strength",), 0.0, 1.0),
            ),
        ))

    fitness_path = path + ("fitness",)
    fitness = reader.object(raw.get("fitness"), fitness_path)
    reader.known_keys(fitness, ("bias", "terms"), fitness_path)
    terms = []
    for i, term in enumerate(reader.list(fitness.get("terms"), fitness_path + ("terms",))):
        term_path = fitness_path + ("terms", i)
        term = reader.object(term, term_path, required=True)
        reader.known_keys(term, ("when", "weight"), term_path)
        terms.append(FitnessTerm(
            condition=_parse_condition(reader, term.get("when"), term_path + ("when",)),
            weight=reader.number(term.get("weight"), term_path + ("weight",)),
        ))

    resources = [
        reader.identifier(ref, path + ("resources", i))
        for i, ref in enumerate(reader.list(raw.get("resources"), path + ("resources",)))
    ]
    return CognitiveSocialFrame(
        id=frame_id,
        construal=tuple(construal),
        fitness=FitnessExpr(tuple(terms), reader.number(fitness.get("bias", 0.0), fitness_path + ("bias",))),
        resources=frozenset(resources),
    )


def _parse_template(reader: _DocumentReader, raw, path: JsonPath) -> ActionTemplate:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("verb", "target", "args", "memo", "effects"), path)
    target = raw.get("target")
    if target is not None:
        reader.text(target, path + ("target",))
    effects = []
    for i, effect in enumerate(reader.list(raw.get("effects"), path + ("effects",))):
        effect_path = path + ("effects", i)
        effect = reader.object(effect, effect_path, required=True)
        reader.known_keys(effect, ("on", "set"), effect_path)
        on = reader.text(effect.get("on"), effect_path + ("on",))
        if on not in EFFECT_TARGETS:
            reader.fail(ParseError, f"effects apply to 'actor' or 'target', not '{on}'", effect_path + ("on",))
        effects.append(Effect(on, reader.scalar_table(effect.get("set"), effect_path + ("set",))))
    return ActionTemplate(
        verb=reader.text(raw.get("verb"), path + ("verb",)),
        target=target,
        args=reader.scalar_table(raw.get("args"), path + ("args",)),
        memo=reader.scalar_table(raw.get("memo"), path + ("memo",)),
        effects=tuple(effects),
    )


def _parse_resource(reader: _DocumentReader, resource_id: str, raw, path: JsonPath) -> CognitiveResource:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("kind", "facts", "rules", "on_undeploy"), path)
    kind_name = reader.text(raw.get("kind"), path + ("kind",))
    try:
        kind = ResourceKind(kind_name)
    except ValueError:
        reader.fail(ParseError, f"resource kind must be 'knowledge' or 'mechanism', not '{kind_name}'", path + ("kind",))

    rules = []
    for i, rule in enumerate(reader.list(raw.get("rules"), path + ("rules",))):
        rule_path = path + ("rules", i)
        rule = reader.object(rule, rule_path, required=True)
        reader.known_keys(rule, ("name", "priority", "when", "do"), rule_path)
        rules.append(MechanismRule(
            condition=_parse_condition(reader, rule.get("when"), rule_path + ("when",)),
            action=_parse_template(reader, rule.get("do"), rule_path + ("do",)),
            priority=reader.integer(rule.get("priority", 0), rule_path + ("priority",)),
            name=reader.text(rule.get("name", ""), rule_path + ("name",), allow_empty=True),
        ))

    try:
        return CognitiveResource(
            id=resource_id,
            kind=kind,
            facts=reader.scalar_table(raw.get("facts"), path + ("facts",)),
            rules=tuple(rules),
            on_undeploy=reader.scalar_table(raw.get("on_undeploy"), path + ("on_undeploy",), nullable=True),
        )
    except ValueError as e:
        reader.fail(ParseError, str(e), path)


def _parse_agent(reader: _DocumentReader, agent_id: str, raw, path: JsonPath) -> AgentSpec:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("frames", "preferences", "alpha", "default_salient"), path)
    frames = tuple(
        reader.identifier(ref, path + ("frames", i))
        for i, ref in enumerate(reader.list(raw.get("frames"), path + ("frames",)))
    )
    preferences = {
        frame_id: reader.number(value, path + ("preferences", frame_id), -1.0, 1.0)
        for frame_id, value in reader.object(raw.get("preferences"), path + ("preferences",)).items()
    }
    alpha = raw.get("alpha")
    if alpha is not None:
        alpha = reader.number(alpha, path + ("alpha",), 0.0, 1.0)
    default_salient = frozenset(
        reader.text(ref, path + ("default_salient", i))
        for i, ref in enumerate(reader.list(raw.get("default_salient"), path + ("default_salient",)))
    )
    return AgentSpec(agent_id, Profile(preferences, alpha, default_salient), frames)


def _parse_event(reader: _DocumentReader, raw, path: JsonPath) -> ScriptedEvent:
    raw = reader.object(raw, path, required=True)
    reader.known_keys(raw, ("tick", "entity", "set", "probability", "choose"), path)
    probability = raw.get("probability")
    if probability is not None:
        probability = reader.number(probability, path + ("probability",), 0.0, 1.0)
    choose = {}
    for name, options in reader.object(raw.get("choose"), path + ("choose",)).items():
        options = reader.list(options, path + ("choose", name))
        if not options:
            reader.fail(DomainError, f"no values to choose '{name}' from", path + ("choose", name))
        choose[name] = tuple(reader.scalar(option, path + ("choose", name, i)) for i, option in enumerate(options))
    return ScriptedEvent(
        tick=reader.integer(raw.get("tick"), path + ("tick",), low=0),
        entity=reader.text(raw.get("entity"), path + ("entity",)),
        set=reader.scalar_table(raw.get("set"), path + ("set",)),
        probability=probability,
        choose=choose,
    )


def _resolve_references(reader: _DocumentReader, scenario: Scenario):
    """Structural cross-references must resolve; softer checks are left to the validator"""
    for frame_id, frame in scenario.frames.items():
        for ref in sorted(frame.resources):
            if ref not in scenario.resources:
                reader.dangling(ref, "resource", ("frames", frame_id, "resources"))
    for agent_id, agent in scenario.agents.items():
        for i, ref in enumerate(agent.frames):
            if ref not in scenario.frames:
                reader.dangling(ref, "frame", ("agents", agent_id, "frames", i))
    for i, event in enumerate(scenario.events):
        if event.entity not in scenario.entities:
            reader.dangling(event.entity, "entity", ("events", i, "entity"))


def parse_scenario(document: str) -> Scenario:
    """
    Parse a scenario document
    Raises ParseError, DomainError or DanglingReference, each carrying line and column
    """
    try:
        raw = json.loads(document, object_pairs_hook=_reject_duplicates, parse_constant=_reject_non_finite)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, "", e.lineno, e.colno) from e
    except _DuplicateKey as e:
        line, column = _position(document, re.escape(json.dumps(e.key)) + r"\s*:", last=True)
        raise ParseError(f"duplicate key '{e.key}'", "", line, column) from e
    except _NonFiniteNumber as e:
        line, column = _position(document, r'(?<![\w"])' + re.escape(e.literal) + r'(?![\w"])')
        raise DomainError(f"non-finite number {e.literal} is not allowed", "", line, column) from e

    locator = SourceLocator(document)
    reader = _DocumentReader(locator)
    raw = reader.object(raw, (), required=True)
    reader.known_keys(raw, TOP_LEVEL_KEYS, ())

    frames = {}
    for frame_id, frame in reader.object(raw.get("frames"), ("frames",)).items():
        reader.identifier(frame_id, ("frames", frame_id))
        frames[frame_id] = _parse_frame(reader, frame_id, frame, ("frames", frame_id))
    resources = {}
    for resource_id, resource in reader.object(raw.get("resources"), ("resources",)).items():
        reader.identifier(resource_id, ("resources", resource_id))
        resources[resource_id] = _parse_resource(reader, resource_id, resource, ("resources", resource_id))
    agents = {}
    for agent_id, agent in reader.object(raw.get("agents"), ("agents",)).items():
        reader.identifier(agent_id, ("agents", agent_id))
        agents[agent_id] = _parse_agent(reader, agent_id, agent, ("agents", agent_id))

    scenario = Scenario(
        name=reader.text(raw.get("name"), ("name",)),
        params=_parse_params(reader, raw.get("params")),
        entities=_parse_entities(reader, raw.get("entities")),
        frames=frames,
        resources=resources,
        agents=agents,
        events=[_parse_event(reader, event, ("events", i)) for i, event in enumerate(reader.list(raw.get("events"), ("events",)))],
        description=reader.text(raw.get("description", ""), ("description",), allow_empty=True),
        locator=locator,
    )
    _resolve_references(reader, scenario)
    logger.debug(
        f"parsed scenario '{scenario.name}': {len(scenario.agents)} agents, "
        f"{len(scenario.frames)} frames, {len(scenario.resources)} resources"
    )
    return scenario


def load_scenario(path) -> Scenario:
    """Read and parse a scenario file; OSError propagates for unreadable paths"""
    raw = Path(path).read_bytes()
    try:
        document = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"not UTF-8 text: {e.reason}", "", 1, e.start + 1) from e
    return parse_scenario(document)
