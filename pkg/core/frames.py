"""
Frame System for csf-sim
Construal, fitness, preference and salience; the interpret and update steps of the
agent cycle; conflict detection; and the three resource deployment policies
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from core.conditions import EvalScope
from core.model import (
    CognitiveSocialFrame, FrameId, Percept, Profile, ResourceId,
    SocialContext, SocialPercept, conflicts,
)

logger = logging.getLogger(__name__)

# decimal places a decayed residual is rounded to
RESIDUAL_DIGITS = 12


class DeploymentPolicy(Enum):
    INSTANT = "instant"              # plain set substitution
    UNDEPLOY_HOOK = "undeploy_hook"  # substitution plus finalizers on removal
    DECAY = "decay"                  # residual salience fades out


class EngineParams(BaseModel):
    """Tunable constants of the frame mechanism"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon_salience: float = Field(0.0, ge=-1.0, le=1.0)
    alpha_default: float = Field(0.5, ge=0.0, le=1.0)
    fitness_floor: float = Field(1e-6, gt=0.0, le=1.0)
    policy: DeploymentPolicy = DeploymentPolicy.INSTANT
    decay_lambda: float = Field(0.25, gt=0.0, le=1.0)
    decay_theta: float = Field(0.0, ge=0.0, lt=1.0)
    mind_reading: bool = True

    def with_overrides(self, **overrides) -> "EngineParams":
        """New params with every non-None override applied (validated)"""
        values = self.model_dump()
        values.update({key: value for key, value in overrides.items() if value is not None})
        return EngineParams(**values)


class DeploymentEventKind(Enum):
    DEPLOYED = "deployed"
    REFRESHED = "refreshed"
    UNDEPLOYED = "undeployed"


@dataclass(frozen=True)
class DeploymentEvent:
    kind: DeploymentEventKind
    resource: ResourceId
    tick: int

    def to_dict(self) -> Dict:
        return {"kind": self.kind.value, "resource": self.resource, "tick": self.tick}


@dataclass(frozen=True)
class FrameScore:
    """One row of the salience decision for a frame"""
    frame: FrameId
    fitness: float
    preference: float
    salience: float
    salient: bool

    def to_dict(self) -> Dict:
        return {
            "frame": self.frame,
            "fitness": self.fitness,
            "preference": self.preference,
            "salience": self.salience,
            "salient": self.salient,
        }


@dataclass
class UpdateResult:
    salient: FrozenSet[FrameId]
    deployed: Dict[ResourceId, float]
    events: List[DeploymentEvent] = field(default_factory=list)
    scores: List[FrameScore] = field(default_factory=list)

    @property
    def deployed_ids(self) -> FrozenSet[ResourceId]:
        return frozenset(self.deployed)


# (fitness, preference, alpha) -> salience
SalienceCombiner = Callable[[float, float, float], float]


def balanced_salience(fitness: float, preference: float, alpha: float) -> float:
    """
    alpha * (2 * fitness - 1) + (1 - alpha) * preference
    Maps fitness onto [-1, 1] and weighs it against preference
    """
    return alpha * (2.0 * fitness - 1.0) + (1.0 - alpha) * preference


def _annotate_value(rule_value, percept: Percept):
    if rule_value == "$subject":
        return percept.subject
    if isinstance(rule_value, str) and rule_value.startswith("$attr:"):
        return percept.get(rule_value[len("$attr:"):])
    return rule_value


def construe(frame: CognitiveSocialFrame, percepts: Iterable[Percept],
             owner: Optional[str] = None) -> FrozenSet[SocialPercept]:
    """
    Attention then interpretation: every (percept, rule) pair whose filter passes
    emits one social percept attributed to the frame.
    owner is the perceiving agent, so filters can tell self from others.
    """
    emitted: List[SocialPercept] = []
    for percept in percepts:
        scope = EvalScope(percept=percept, subject=percept.subject, owner=owner)
        for rule in frame.construal:
            if not rule.filter.evaluate(scope):
                continue
            value = _annotate_value(rule.annotate.value, percept)
            if value is None:
                continue
            emitted.append(SocialPercept(
                subject=percept.subject,
                dimension=rule.annotate.dimension,
                value=value,
                sources=frozenset([frame.id]),
                strength=rule.annotate.strength,
            ))
    return frozenset(SocialContext(emitted).percepts)


def evaluate_fitness(frame: CognitiveSocialFrame, working_memory, params: Optional[EngineParams] = None,
                     facts: Optional[Mapping] = None, owner: Optional[str] = None) -> float:
    """Fitness of a frame on working memory, clamped into ]0, 1]"""
    params = params or EngineParams()
    scope = EvalScope(
        social_context=working_memory.social_context,
        facts=facts or {},
        deployed=frozenset(working_memory.deployed),
        scratch=working_memory.scratch,
        owner=owner,
    )
    total = frame.fitness.bias
    for term in frame.fitness.terms:
        if term.condition.evaluate(scope):
            total += term.weight
    return min(1.0, max(params.fitness_floor, total))


def evaluate_preference(profile: Profile, frame_id: FrameId) -> float:
    """The agent's context-free inclination toward a frame; 0 when unlisted"""
    return profile.preferences.get(frame_id, 0.0)


def effective_alpha(profile: Profile, params: EngineParams) -> float:
    return profile.alpha if profile.alpha is not None else params.alpha_default


def salience(frame: CognitiveSocialFrame, working_memory, profile: Profile, params: EngineParams,
             combiner: SalienceCombiner = balanced_salience, facts: Optional[Mapping] = None,
             owner: Optional[str] = None) -> float:
    fitness = evaluate_fitness(frame, working_memory, params, facts, owner)
    return combiner(fitness, evaluate_preference(profile, frame.id), effective_alpha(profile, params))


def score_frames(working_memory, ltm, profile: Profile, params: EngineParams,
                 combiner: SalienceCombiner = balanced_salience, owner: Optional[str] = None) -> List[FrameScore]:
    """Fitness, preference and salience of every frame, in frame id order"""
    facts = ltm.facts_of(working_memory.deployed)
    alpha = effective_alpha(profile, params)
    scores = []
    for frame_id in ltm.frame_ids():
        frame = ltm.frames[frame_id]
        fitness = evaluate_fitness(frame, working_memory, params, facts, owner)
        preference = evaluate_preference(profile, frame_id)
        value = combiner(fitness, preference, alpha)
        scores.append(FrameScore(frame_id, fitness, preference, value, value > params.epsilon_salience))
    return scores


def interpret(percepts: List[Percept], salient_frames: Iterable[FrameId], ltm,
              owner: Optional[str] = None) -> SocialContext:
    """
    Build a fresh social context as the merged union of the salient frames' construals.
    Conflicting readings are kept side by side.
    """
    context = SocialContext()
    for frame_id in sorted(salient_frames):
        frame = ltm.frame(frame_id)
        context = context.merge(SocialContext(construe(frame, percepts, owner)))
    return context


def apply_policy(prev_deployed: Mapping[ResourceId, float], target: Iterable[ResourceId],
                 params: EngineParams, tick: int) -> Tuple[Dict[ResourceId, float], List[DeploymentEvent]]:
    """
    Move the deployed set toward the target set.
    instant / undeploy_hook: deployed becomes the target.
    decay: targeted resources are refreshed to 1.0, the others lose decay_lambda and
    are dropped once below decay_theta; a full step (lambda = 1) drops them at once.
    """
    target = frozenset(target)
    previous = dict(prev_deployed)
    events: List[DeploymentEvent] = []

    if params.policy is not DeploymentPolicy.DECAY:
        for resource in sorted(set(previous) - target):
            events.append(DeploymentEvent(DeploymentEventKind.UNDEPLOYED, resource, tick))
        for resource in sorted(target - set(previous)):
            events.append(DeploymentEvent(DeploymentEventKind.DEPLOYED, resource, tick))
        return {resource: 1.0 for resource in sorted(target)}, events

    deployed: Dict[ResourceId, float] = {}
    for resource in sorted(set(previous) | target):
        if resource in target:
            kind = DeploymentEventKind.REFRESHED if resource in previous else DeploymentEventKind.DEPLOYED
            events.append(DeploymentEvent(kind, resource, tick))
            deployed[resource] = 1.0
            continue
        residual = round(previous[resource] - params.decay_lambda, RESIDUAL_DIGITS)
        if residual < params.decay_theta or params.decay_lambda >= 1.0:
            events.append(DeploymentEvent(DeploymentEventKind.UNDEPLOYED, resource, tick))
        else:
            deployed[resource] = residual
    return deployed, events


def update(social_context: SocialContext, ltm, profile: Profile, params: EngineParams, prev_working_memory,
           tick: int = 0, combiner: SalienceCombiner = balanced_salience, owner: Optional[str] = None) -> UpdateResult:
    """
    Re-select salient frames on the new context (strictly above epsilon) and
    deploy the union of their resources under the active policy
    """
    working = prev_working_memory.copy()
    working.social_context = social_context
    scores = score_frames(working, ltm, profile, params, combiner, owner)
    salient = frozenset(score.frame for score in scores if score.salient)

    target = set()
    for frame_id in sorted(salient):
        target |= ltm.frames[frame_id].resources
    deployed, events = apply_policy(prev_working_memory.deployed, target, params, tick)

    for event in events:
        logger.debug(f"tick {tick} {owner or '-'}: {event.kind.value} {event.resource}")
    return UpdateResult(salient=salient, deployed=deployed, events=events, scores=scores)


def run_finalizers(view, events: List[DeploymentEvent], ltm) -> List[ResourceId]:
    """
    Invoke the undeploy hook of every resource removed in this update
    Returns the resources whose hook wrote something
    """
    finalized = []
    for event in events:
        if event.kind is not DeploymentEventKind.UNDEPLOYED:
            continue
        resource = ltm.resources.get(event.resource)
        if resource is None or not resource.on_undeploy:
            continue
        for key, value in resource.on_undeploy.items():
            if value is None:
                view.clear_scratch(key)
            else:
                view.write_scratch(key, value)
        finalized.append(resource.id)
    return finalized


def detect_conflicts(context: SocialContext) -> List[Tuple[SocialPercept, SocialPercept]]:
    """All unordered conflicting pairs, each as (lower key, higher key)"""
    percepts = context.percepts
    pairs = []
    for i, first in enumerate(percepts):
        for second in percepts[i + 1:]:
            if conflicts(first, second):
                pairs.append((first, second))
    return pairs
