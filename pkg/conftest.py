"""
Shared helpers for the csf-sim test suite
"""
import sys
import os
from pathlib import Path

import pytest

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.conditions import Atom, Condition
from core.frames import EngineParams
from core.model import (
    ActionTemplate, AgentSpec, Annotation, CognitiveResource, CognitiveSocialFrame, ConstrualRule,
    Effect, FitnessExpr, FitnessTerm, MechanismRule, Profile, ResourceKind,
)
from scenario.builtins import builtin
from scenario.schema import Scenario, ScriptedEvent

FIXTURES = Path(__file__).parent / "fixtures"


def cond(*atoms) -> Condition:
    """cond(("attr:kind", "==", "person"), ("fact:x", "exists"))"""
    return Condition(tuple(Atom(*spec) for spec in atoms))


def construal(filter_atoms, dimension, value, strength=1.0) -> ConstrualRule:
    return ConstrualRule(cond(*filter_atoms), Annotation(dimension, value, strength))


def make_frame(frame_id, rules=(), terms=(), bias=0.0, resources=()) -> CognitiveSocialFrame:
    return CognitiveSocialFrame(
        id=frame_id,
        construal=tuple(rules),
        fitness=FitnessExpr(tuple(FitnessTerm(cond(*atoms), weight) for atoms, weight in terms), bias),
        resources=frozenset(resources),
    )


def knowledge(resource_id, **facts) -> CognitiveResource:
    return CognitiveResource(resource_id, ResourceKind.KNOWLEDGE, facts=facts)


def mechanism(resource_id, *rules, on_undeploy=None) -> CognitiveResource:
    return CognitiveResource(resource_id, ResourceKind.MECHANISM, rules=tuple(rules), on_undeploy=on_undeploy or {})


def rule(when, verb, target=None, priority=0, args=None, memo=None, effects=(), name="") -> MechanismRule:
    return MechanismRule(
        condition=cond(*when),
        action=ActionTemplate(verb, target, args or {}, memo or {}, tuple(Effect(on, values) for on, values in effects)),
        priority=priority,
        name=name,
    )


def make_agent(agent_id, frames, preferences=None, alpha=None, default_salient=()) -> AgentSpec:
    return AgentSpec(agent_id, Profile(preferences or {}, alpha, frozenset(default_salient)), tuple(frames))


def make_scenario(entities, frames, resources, agents, events=(), params=None, name="test") -> Scenario:
    return Scenario(
        name=name,
        params=params or EngineParams(),
        entities={entity_id: dict(attributes) for entity_id, attributes in entities.items()},
        frames={frame.id: frame for frame in frames},
        resources={resource.id: resource for resource in resources},
        agents={agent.id: agent for agent in agents},
        events=list(events),
    )


def event(tick, entity, probability=None, choose=None, **values) -> ScriptedEvent:
    return ScriptedEvent(tick, entity, values, probability, {k: tuple(v) for k, v in (choose or {}).items()})


@pytest.fixture
def library_dance() -> Scenario:
    return builtin("library_dance")


@pytest.fixture
def coach_father() -> Scenario:
    return builtin("coach_father")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
