#!/usr/bin/env python3
"""
Tests for mind-reading, social categorization and identification
"""
import random

import pytest

from conftest import make_agent, make_frame
from core.engine import Simulation
from core.errors import UnknownTarget
from core.frames import EngineParams
from core.identity import (
    Ascription, SocialGroup, ascribe_frames, categorize, identification, is_in_group, predict_resources,
)
from core.memory import AgentState, LongTermMemory
from core.model import Profile, SocialContext, SocialPercept

LIBRARIAN = make_frame("librarian", terms=[([("context:role", "==", "librarian")], 0.8)], bias=0.1,
                       resources=["shelving", "hush"])
STUDENT = make_frame("student", terms=[([("context:role", "==", "student")], 0.8)], bias=0.1, resources=["study"])


def observer(context, preferences=None, frames=(LIBRARIAN, STUDENT)):
    ltm = LongTermMemory({f.id: f for f in frames}, {})
    state = AgentState(make_agent("me", [f.id for f in frames], preferences), ltm)
    state.working.social_context = SocialContext(context)
    return state


def role(subject, value):
    return SocialPercept(subject, "role", value, frozenset({"seen"}))


def test_ascribe_librarian():
    """fitness 0.9 on the target's view, alpha 0.5, neutral preference"""
    state = observer([role("t", "librarian")])
    ascriptions = ascribe_frames(state, "t", state.ltm, EngineParams())
    assert [a.frame for a in ascriptions] == ["librarian"]
    assert ascriptions[0].estimated_salience == pytest.approx(0.4)


def test_ascribe_uses_only_percepts_about_the_target():
    state = observer([role("t", "student"), role("other", "librarian")])
    assert [a.frame for a in ascribe_frames(state, "t", state.ltm, EngineParams())] == ["student"]


def test_ascribe_nothing_fits():
    state = observer([role("t", "tourist")])
    assert ascribe_frames(state, "t", state.ltm, EngineParams()) == []


def test_ascribe_unknown_target():
    state = observer([role("t", "student")])
    with pytest.raises(UnknownTarget):
        ascribe_frames(state, "nobody", state.ltm, EngineParams())


def test_ascription_ignores_observer_preferences():
    context = [role("t", "student"), role("t", "librarian")]
    rng = random.Random(9)
    baseline = ascribe_frames(observer(context), "t", observer(context).ltm, EngineParams())
    for _ in range(50):
        preferences = {"librarian": rng.uniform(-1, 1), "student": rng.uniform(-1, 1)}
        state = observer(context, preferences)
        assert ascribe_frames(state, "t", state.ltm, EngineParams()) == baseline


def test_ascriptions_ranked_by_salience_then_frame():
    context = [role("t", "student"), role("t", "librarian")]
    state = observer(context)
    assert [a.frame for a in ascribe_frames(state, "t", state.ltm, EngineParams())] == ["librarian", "student"]


def test_self_ascription_matches_own_salient_set(library_dance):
    """With neutral preferences, projecting onto oneself reproduces the update step"""
    simulation = Simulation(library_dance)
    state = simulation.agents["reader"]
    for _ in range(5):
        simulation.step()
        ascribed = {a.frame for a in ascribe_frames(state, "reader", state.ltm, simulation.params)}
        assert ascribed == state.working.salient_frames


def ranked(target, *frames):
    return [Ascription(target, frame, 0.5 - 0.1 * i) for i, frame in enumerate(frames)]


def test_categorize_by_top_frame():
    groups = categorize({
        "a": ranked("a", "student", "librarian"),
        "b": ranked("b", "student"),
        "c": ranked("c", "librarian", "student"),
    })
    assert groups == [SocialGroup("librarian", frozenset({"c"})), SocialGroup("student", frozenset({"a", "b"}))]


def test_categorize_edge_cases():
    assert categorize({"a": ranked("a", "student")}) == [SocialGroup("student", frozenset({"a"}))]
    assert categorize({}) == []
    assert categorize({"a": []}) == []


def test_categorize_partitions_actors():
    rng = random.Random(3)
    frames = ["f1", "f2", "f3"]
    for _ in range(100):
        table = {}
        for i in range(rng.randint(0, 8)):
            actor = f"a{i}"
            table[actor] = ranked(actor, *rng.sample(frames, rng.randint(0, 3)))
        groups = categorize(table)
        members = [m for group in groups for m in group.members]
        assert len(members) == len(set(members))
        assert set(members) == {actor for actor, items in table.items() if items}
        for group in groups:
            for member in group.members:
                assert table[member][0].frame == group.key_frame


@pytest.mark.parametrize("preference,salient,expected,in_group", [
    (0.6, {"coach"}, 1.0, True),
    (0.0, set(), 0.0, False),
    (-1.0, set(), -1.0, False),
    (-0.2, {"coach"}, 0.3, True),
])
def test_identification(preference, salient, expected, in_group):
    profile = Profile({"coach": preference})
    group = SocialGroup("coach", frozenset({"son"}))
    assert identification(profile, group, salient) == pytest.approx(expected)
    assert is_in_group(profile, group, salient) is in_group


def test_predict_resources():
    ltm = LongTermMemory({"librarian": LIBRARIAN, "student": STUDENT}, {})
    assert predict_resources(ranked("t", "librarian"), ltm) == frozenset({"shelving", "hush"})
    assert predict_resources([], ltm) == frozenset()
    assert predict_resources(ranked("t", "librarian", "student"), ltm) == frozenset({"shelving", "hush", "study"})


def test_identity_payload_in_trace(coach_father):
    simulation = Simulation(coach_father)
    update = next(e for e in simulation.step() if e.stage.value == "update")
    identity = update.payload["identity"]
    assert sorted(identity["ascriptions"]) == ["son", "striker"]
    assert identity["ascriptions"]["striker"]["predicted_resources"] == ["squad_knowledge", "team_selection"]
    assert identity["groups"] == [{
        "key_frame": "coach", "members": ["son", "striker"], "identification": 0.9, "in_group": True,
    }]


def test_mind_reading_can_be_switched_off(coach_father):
    simulation = Simulation(coach_father, params=coach_father.params.with_overrides(mind_reading=False))
    update = next(e for e in simulation.step() if e.stage.value == "update")
    assert "identity" not in update.payload
