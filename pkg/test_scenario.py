#!/usr/bin/env python3
"""
Tests for scenario documents: parsing, validation, serialization and built-ins
"""
import dataclasses
import json
import random

import pytest

from conftest import FIXTURES, knowledge, make_agent, make_frame, make_scenario
from core.errors import DanglingReference, DomainError, ParseError, ScenarioError, UnknownScenario
from core.frames import DeploymentPolicy
from scenario.builtins import BUILTIN_DIR, builtin, builtin_names, builtin_path
from scenario.locator import SourceLocator, format_path
from scenario.parser import load_scenario, parse_scenario
from scenario.serializer import serialize_scenario
from scenario.validator import errors_only, validate


def fixture_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


def line_of(text, needle):
    for number, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return number
    raise AssertionError(f"{needle} not in document")


def parseable_documents():
    documents = sorted(FIXTURES.glob("*.json")) + sorted(BUILTIN_DIR.glob("*.json"))
    parsed = []
    for path in documents:
        try:
            parsed.append(load_scenario(path))
        except ScenarioError:
            continue
    return parsed


def test_minimal_document_gets_defaults():
    scenario = load_scenario(FIXTURES / "minimal.json")
    assert scenario.params.alpha_default == 0.5
    assert scenario.params.epsilon_salience == 0.0
    assert scenario.params.policy is DeploymentPolicy.INSTANT
    assert scenario.params.decay_lambda == 0.25
    assert scenario.params.decay_theta == 0.0
    assert scenario.events == []
    assert scenario.description == ""
    agent = scenario.agents["me"]
    assert agent.profile.preferences == {}
    assert agent.profile.alpha is None
    assert agent.profile.default_salient == frozenset()


def test_dangling_resource_is_located():
    text = fixture_text("dangling_resource.json")
    with pytest.raises(DanglingReference) as excinfo:
        parse_scenario(text)
    error = excinfo.value
    assert error.ref == "r9"
    assert error.kind == "resource"
    assert error.line == line_of(text, '"r9"')
    assert error.column is not None
    assert error.path == "frames.idle.resources"


@pytest.mark.parametrize("name,ref,kind", [
    ("dangling_frame.json", "ghost", "frame"),
    ("dangling_entity.json", "nobody", "entity"),
])
def test_other_dangling_references(name, ref, kind):
    text = fixture_text(name)
    with pytest.raises(DanglingReference) as excinfo:
        parse_scenario(text)
    assert (excinfo.value.ref, excinfo.value.kind) == (ref, kind)
    assert excinfo.value.line == line_of(text, f'"{ref}"')


def test_json_syntax_error_has_position():
    with pytest.raises(ParseError) as excinfo:
        load_scenario(FIXTURES / "syntax_error.json")
    assert excinfo.value.line == 3
    assert excinfo.value.column == 3


def test_preference_out_of_range():
    text = fixture_text("bad_preference.json")
    with pytest.raises(DomainError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.path == "agents.me.preferences.idle"
    assert excinfo.value.line == line_of(text, "1.5")


def test_bad_identifier():
    with pytest.raises(DomainError) as excinfo:
        load_scenario(FIXTURES / "bad_id.json")
    assert "Idle" in excinfo.value.message


def test_duplicate_key_rejected():
    document = '{\n  "name": "x",\n  "name": "y"\n}'
    with pytest.raises(ParseError) as excinfo:
        parse_scenario(document)
    assert "duplicate" in excinfo.value.message
    assert excinfo.value.line == 3


@pytest.mark.parametrize("literal", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_preference_rejected(literal):
    document = '{\n  "name": "x",\n  "agents": {"a": {"frames": [], "preferences": {"f": %s}}}\n}' % literal
    with pytest.raises(DomainError) as excinfo:
        parse_scenario(document)
    assert literal in excinfo.value.message
    assert excinfo.value.line == 3
    assert excinfo.value.column == document.splitlines()[2].index(literal) + 1


@pytest.mark.parametrize("literal", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_attribute_rejected(literal):
    document = '{"name": "x", "entities": {"e": {"location": "r", "w": %s}}}' % literal
    with pytest.raises(DomainError) as excinfo:
        parse_scenario(document)
    assert excinfo.value.line == 1
    assert excinfo.value.column == document.index(literal) + 1


@pytest.mark.parametrize("document,error", [
    ('{"name": "x", "extra": 1}', ParseError),
    ('{"name": "x", "params": {"epsilon": 0.1}}', ParseError),
    ('{"name": "x", "params": {"epsilon_salience": 2}}', DomainError),
    ('{"name": "x", "resources": {"r": {"kind": "habit"}}}', ParseError),
    ('{"name": "x", "resources": {"r": {"kind": "knowledge", "rules": [{"do": {"verb": "v"}}]}}}', ParseError),
    ('{"name": "x", "frames": {"f": {"construal": [{"filter": [{"sel": "mood", "op": "=="}],'
     ' "annotate": {"dimension": "d", "value": 1}}]}}}', ParseError),
    ('{"name": "x", "frames": {"f": {"fitness": {"terms": [{"when": [{"sel": "context:d", "op": "~"}],'
     ' "weight": 1}]}}}}', ParseError),
    ('{"name": "x", "events": [{"tick": -1, "entity": "e"}]}', DomainError),
    ('{"name": "x", "events": [{"tick": 0, "entity": "e", "choose": {"mood": []}}]}', DomainError),
    ('{"name": "x", "agents": {"a": {"alpha": 1.2}}}', DomainError),
    ('[]', ParseError),
    ('{"entities": {}}', ParseError),
])
def test_malformed_documents(document, error):
    with pytest.raises(error):
        parse_scenario(document)


def test_invalid_utf8_is_a_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_bytes(b'{"name": "\xff"}')
    with pytest.raises(ParseError):
        load_scenario(path)


def test_missing_file_raises_os_error(tmp_path):
    with pytest.raises(OSError):
        load_scenario(tmp_path / "absent.json")


def test_round_trip_every_document():
    scenarios = parseable_documents()
    assert len(scenarios) >= 7
    for scenario in scenarios:
        assert parse_scenario(serialize_scenario(scenario)) == scenario


def test_round_trip_keeps_optional_fields():
    scenario = load_scenario(FIXTURES / "stochastic.json")
    again = parse_scenario(serialize_scenario(scenario))
    assert again.events[3].probability == 0.5
    assert again.events[0].choose == {"weather": ("clear", "rain", "storm")}
    assert again.resources["field_work"].rules[1].action.args == {"rows": 2}


@pytest.mark.parametrize("name", ["library_dance", "coach_father"])
def test_builtins_validate_cleanly(name):
    assert validate(builtin(name)) == []


@pytest.mark.parametrize("name", ["minimal.json", "stochastic.json", "decay.json", "undeploy_hook.json",
                                  "two_agents.json"])
def test_fixtures_validate_cleanly(name):
    assert validate(load_scenario(FIXTURES / name)) == []


def test_warning_only_fixture():
    diagnostics = validate(load_scenario(FIXTURES / "warning_only.json"))
    assert len(diagnostics) == 1
    assert not diagnostics[0].is_error
    assert diagnostics[0].path == "frames.idle.resources"
    assert diagnostics[0].line is not None


def test_semantic_errors_fixture():
    text = fixture_text("semantic_errors.json")
    diagnostics = validate(parse_scenario(text))
    messages = [d.message for d in errors_only(diagnostics)]
    assert len(messages) == 3
    assert any("box" in message for message in messages)
    assert any("ghost" in message for message in messages)
    assert any("colour" in message for message in messages)
    located = next(d for d in diagnostics if "colour" in d.message)
    assert located.line == line_of(text, "attr:colour")


def test_unknown_default_salient_is_one_error():
    scenario = make_scenario(
        {"me": {"location": "room"}},
        [make_frame("f", resources=["k"])], [knowledge("k")],
        [make_agent("me", ["f"], default_salient=["ghost"])],
    )
    diagnostics = validate(scenario)
    assert len(diagnostics) == 1
    assert diagnostics[0].is_error
    assert diagnostics[0].line is None


def test_frame_without_resources_is_one_warning():
    scenario = load_scenario(FIXTURES / "minimal.json")
    scenario.frames["idle"] = dataclasses.replace(scenario.frames["idle"], resources=frozenset())
    diagnostics = validate(scenario)
    assert [d.severity for d in diagnostics] == ["warning"]


def test_validator_reports_unguarded_annotation():
    scenario = load_scenario(BUILTIN_DIR / "library_dance.json")
    frame = scenario.frames["home_frame"]
    rule = frame.construal[0]
    unguarded = dataclasses.replace(rule, filter=dataclasses.replace(rule.filter, atoms=rule.filter.atoms[:1]))
    scenario.frames["home_frame"] = dataclasses.replace(frame, construal=(unguarded,) + frame.construal[1:])
    diagnostics = validate(scenario)
    assert len(diagnostics) == 1
    assert "location" in diagnostics[0].message
    assert not diagnostics[0].is_error


def dangling_mutants(document):
    """Every way of breaking one cross-reference of a document"""
    for frame_id, frame in document["frames"].items():
        for i in range(len(frame.get("resources", []))):
            mutant = json.loads(json.dumps(document))
            mutant["frames"][frame_id]["resources"][i] = "zz_missing"
            yield mutant
    for agent_id, agent in document["agents"].items():
        for i in range(len(agent["frames"])):
            mutant = json.loads(json.dumps(document))
            mutant["agents"][agent_id]["frames"][i] = "zz_missing"
            yield mutant
    for i in range(len(document.get("events", []))):
        mutant = json.loads(json.dumps(document))
        mutant["events"][i]["entity"] = "zz_missing"
        yield mutant


@pytest.mark.parametrize("name", ["library_dance", "coach_father"])
def test_every_dangling_mutant_is_rejected(name):
    document = json.loads(builtin_path(name).read_text(encoding="utf-8"))
    mutants = list(dangling_mutants(document))
    assert mutants
    for mutant in mutants:
        text = json.dumps(mutant, indent=2)
        with pytest.raises(DanglingReference) as excinfo:
            parse_scenario(text)
        assert excinfo.value.ref == "zz_missing"
        assert excinfo.value.line is not None


def test_builtin_names():
    assert builtin_names() == ["coach_father", "library_dance"]
    assert builtin("library_dance").name == "library_dance"


def test_unknown_builtin():
    with pytest.raises(UnknownScenario) as excinfo:
        builtin("opera")
    assert excinfo.value.name == "opera"
    assert "coach_father" in str(excinfo.value)


def test_locator_positions():
    document = '{\n  "name": "x",\n  "frames": {\n    "f": {"resources": ["r"]}\n  }\n}'
    locator = SourceLocator(document)
    assert locator.position(("frames", "f", "resources", 0)) == (4, 25)
    assert locator.position(("frames", "f", "resources")) == (4, 24)
    assert locator.position(("frames", "f", "construal", 2)) == (4, 10)
    assert locator.position(("name",)) == (2, 11)
    assert locator.position(()) == (1, 1)


def test_format_path():
    assert format_path(("frames", "coach", "resources", 0)) == "frames.coach.resources[0]"
    assert format_path(("events", 2, "set", "mood")) == "events[2].set.mood"
    assert format_path(()) == ""


def mutate(raw, rng):
    """Apply one change that parses but draws validator diagnostics"""
    choice = rng.randrange(5)
    if choice == 0:
        raw["entities"][rng.choice(sorted(raw["entities"]))].pop("location", None)
    elif choice == 1:
        raw["agents"][rng.choice(sorted(raw["agents"]))].setdefault("default_salient", []).append("ghost")
    elif choice == 2:
        raw["agents"][rng.choice(sorted(raw["agents"]))].setdefault("preferences", {})["ghost"] = 0.5
    elif choice == 3:
        frame = raw["frames"][rng.choice(sorted(raw["frames"]))]
        frame["construal"][0]["filter"].append({"sel": "attr:zzz", "op": "exists"})
    else:
        raw["frames"][rng.choice(sorted(raw["frames"]))]["resources"] = []


def assert_inside(document, diagnostics):
    lines = document.split("\n")
    for diagnostic in diagnostics:
        if diagnostic.line is None:
            continue
        assert 1 <= diagnostic.line <= len(lines)
        assert 1 <= diagnostic.column <= len(lines[diagnostic.line - 1]) + 1


def test_diagnostics_point_inside_the_document():
    rng = random.Random(31)
    originals = [json.loads(builtin_path(name).read_text(encoding="utf-8")) for name in builtin_names()]
    seen = 0
    for _ in range(200):
        raw = json.loads(json.dumps(rng.choice(originals)))
        for _ in range(rng.randint(1, 3)):
            mutate(raw, rng)
        document = json.dumps(raw, indent=rng.choice([None, 2]))
        diagnostics = validate(parse_scenario(document))
        assert diagnostics
        assert_inside(document, diagnostics)
        seen += sum(1 for d in diagnostics if d.line is not None)
    assert seen > 0
    for name in ("semantic_errors.json", "warning_only.json"):
        text = fixture_text(name)
        assert_inside(text, validate(parse_scenario(text)))
