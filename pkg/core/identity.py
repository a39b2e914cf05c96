"""
Social Identity System for csf-sim
Mind-reading (ascribing salient frames to other actors), social categorization
of actors by their ascribed frames, and the agent's identification with each group
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping

from core.errors import UnknownTarget
from core.frames import EngineParams, balanced_salience, effective_alpha, evaluate_fitness
from core.memory import WorkingMemory
from core.model import EntityId, FrameId, Profile, ResourceId, SocialContext

IDENTIFICATION_BONUS = 0.5


@dataclass(frozen=True)
class Ascription:
    """A frame the agent believes to be salient for another actor"""
    target: EntityId
    frame: FrameId
    estimated_salience: float

    def to_dict(self) -> Dict:
        return {"frame": self.frame, "estimated_salience": self.estimated_salience}


@dataclass(frozen=True)
class SocialGroup:
    key_frame: FrameId
    members: FrozenSet[EntityId]

    def to_dict(self) -> Dict:
        return {"key_frame": self.key_frame, "members": sorted(self.members)}


def ascribe_frames(agent_state, target: EntityId, ltm, params: EngineParams) -> List[Ascription]:
    """
    Project every frame onto what the agent perceives of the target.
    Others' preferences are unobservable, so they count as neutral (0).
    """
    about_target = agent_state.working.social_context.about(target)
    if not about_target:
        raise UnknownTarget(target)

    hypothetical = WorkingMemory(social_context=SocialContext(about_target))
    alpha = effective_alpha(agent_state.profile, params)
    ascriptions = []
    for frame_id in ltm.frame_ids():
        fitness = evaluate_fitness(ltm.frames[frame_id], hypothetical, params, owner=target)
        estimate = balanced_salience(fitness, 0.0, alpha)
        if estimate > params.epsilon_salience:
            ascriptions.append(Ascription(target, frame_id, estimate))
    ascriptions.sort(key=lambda item: (-item.estimated_salience, item.frame))
    return ascriptions


def categorize(ascriptions: Mapping[EntityId, List[Ascription]]) -> List[SocialGroup]:
    """
    Group actors by their top ascribed frame; actors with nothing ascribed are left out
    """
    members: Dict[FrameId, set] = {}
    for actor in sorted(ascriptions):
        ranked = ascriptions[actor]
        if not ranked:
            continue
        members.setdefault(ranked[0].frame, set()).add(actor)
    return [SocialGroup(frame_id, frozenset(members[frame_id])) for frame_id in sorted(members)]


def identification(profile: Profile, group: SocialGroup, agent_salient: Iterable[FrameId]) -> float:
    """
    How strongly the agent identifies with a group, in [-1, 1]; positive means in-group
    """
    score = profile.preferences.get(group.key_frame, 0.0)
    if group.key_frame in set(agent_salient):
        score += IDENTIFICATION_BONUS
    return max(-1.0, min(1.0, score))


def is_in_group(profile: Profile, group: SocialGroup, agent_salient: Iterable[FrameId]) -> bool:
    return identification(profile, group, agent_salient) > 0


def predict_resources(ascriptions: Iterable[Ascription], ltm) -> FrozenSet[ResourceId]:
    """The agent's model of what another actor has deployed"""
    predicted = set()
    for ascription in ascriptions:
        predicted |= ltm.frame(ascription.frame).resources
    return frozenset(predicted)


def read_minds(agent_state, ltm, params: EngineParams) -> Dict:
    """
    Identity snapshot for the trace: ascriptions for every other perceived actor,
    the groups they form, and the agent's identification with each group
    """
    context = agent_state.working.social_context
    table = {
        subject: ascribe_frames(agent_state, subject, ltm, params)
        for subject in context.subjects()
        if subject != agent_state.id
    }
    groups = categorize(table)
    salient = agent_state.working.salient_frames
    return {
        "ascriptions": {
            subject: {
                "frames": [item.to_dict() for item in table[subject]],
                "predicted_resources": sorted(predict_resources(table[subject], ltm)),
            }
            for subject in sorted(table)
        },
        "groups": [
            {
                **group.to_dict(),
                "identification": identification(agent_state.profile, group, salient),
                "in_group": is_in_group(agent_state.profile, group, salient),
            }
            for group in groups
        ],
    }
