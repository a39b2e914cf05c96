"""
Simulation Engine for csf-sim
The five-stage agent cycle (perceive, interpret, update, execute, act) and a
deterministic synchronous scheduler over a shared entity environment
"""
import copy
import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Mapping, Optional

from core.conditions import EvalScope
from core.errors import ValidationError
from core.frames import (
    DeploymentPolicy, EngineParams, detect_conflicts, interpret, run_finalizers, update,
)
from core.identity import read_minds
from core.memory import (
    AgentState, LongTermMemory, ResourceView, open_resource_view, sensory_drain, sensory_write,
)
from core.model import Action, ActionTemplate, EntityId, Percept, ResourceId, Scalar
from scenario.validator import errors_only, validate

logger = logging.getLogger(__name__)

# A mechanism implemented in Python rather than declared as rules
NativeMechanism = Callable[[ResourceView], List[Action]]


class Stage(Enum):
    PERCEIVE = "perceive"
    INTERPRET = "interpret"
    UPDATE = "update"
    EXECUTE = "execute"
    ACT = "act"


STAGE_ORDER = [stage.value for stage in Stage]


@dataclass
class TraceEvent:
    tick: int
    agent: str
    stage: Stage
    payload: Dict

    def to_dict(self) -> Dict:
        return {"tick": self.tick, "agent": self.agent, "stage": self.stage.value, "payload": self.payload}

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


@dataclass
class Environment:
    """
    The shared world: entity attribute tables plus the actions waiting for the tick barrier
    """
    entities: Dict[EntityId, Dict[str, Scalar]]
    pending_actions: List[Action] = field(default_factory=list)
    tick: int = 0

    def location_of(self, entity: EntityId) -> Optional[str]:
        return self.entities.get(entity, {}).get("location")

    def colocated(self, entity: EntityId) -> List[EntityId]:
        """Entities sharing the given entity's location, itself included, in id order"""
        here = self.location_of(entity)
        return sorted(
            other for other, attributes in self.entities.items()
            if attributes.get("location") == here
        )

    def apply_event(self, event, rng: random.Random) -> bool:
        """Apply one scripted event; returns False when its probability gate rejects it"""
        if event.probability is not None and rng.random() >= event.probability:
            return False
        attributes = self.entities.setdefault(event.entity, {})
        attributes.update(event.set)
        for name in sorted(event.choose):
            attributes[name] = rng.choice(list(event.choose[name]))
        return True

    def apply_pending(self) -> List[Action]:
        """Tick barrier: apply every queued action's effects in emission order"""
        applied, self.pending_actions = self.pending_actions, []
        for action in applied:
            for effect in action.effects:
                entity = action.actor if effect.on == "actor" else action.target
                if entity is None or entity not in self.entities:
                    continue
                self.entities[entity].update(effect.set)
        return applied


def perceive(env: Environment, agent_state: AgentState) -> List[Percept]:
    """One percept per co-located entity, written to the agent's sensory memory"""
    percepts = [
        Percept(subject=entity, attributes=dict(env.entities[entity]), tick=env.tick)
        for entity in env.colocated(agent_state.id)
    ]
    sensory_write(agent_state, percepts)
    return percepts


def _substitute(value, subject: Optional[str], owner: str):
    if value == "$subject":
        return subject
    if value == "$self":
        return owner
    return value


def _instantiate(template: ActionTemplate, subject: Optional[str], owner: str) -> Action:
    return Action(
        actor=owner,
        verb=template.verb,
        target=_substitute(template.target, subject, owner),
        args={name: _substitute(value, subject, owner) for name, value in template.args.items()},
        effects=template.effects,
    )


def execute(view: ResourceView, deployed: Iterable[ResourceId], ltm: LongTermMemory,
            natives: Optional[Mapping[ResourceId, NativeMechanism]] = None) -> List[Action]:
    """
    Run the deployed mechanisms in id order. Within a mechanism every rule whose
    condition holds fires, highest priority first; knowledge is never executed.
    Identical actions are emitted once.
    """
    natives = natives or {}
    context = view.read_social_context()
    actions: List[Action] = []
    seen = set()

    def emit(action: Action):
        if action.key not in seen:
            seen.add(action.key)
            actions.append(action)

    for resource_id in sorted(deployed):
        resource = ltm.resources.get(resource_id)
        if resource is None or not resource.is_mechanism:
            continue
        if resource_id in natives:
            for action in natives[resource_id](view):
                emit(action)
            continue
        for rule in resource.ordered_rules():
            bound = rule.condition.needs_subject() or rule.action.mentions_subject()
            for subject in (context.subjects() if bound else [None]):
                scope = EvalScope(
                    subject=subject,
                    social_context=context,
                    facts=view.read_facts(),
                    deployed=view.read_deployed(),
                    scratch=view.read_scratch(),
                    owner=view.owner,
                )
                if not rule.condition.evaluate(scope):
                    continue
                for key, value in rule.action.memo.items():
                    view.write_scratch(key, _substitute(value, subject, view.owner))
                emit(_instantiate(rule.action, subject, view.owner))
    return actions


def _update_payload(result, agent_state: AgentState, ltm: LongTermMemory, params: EngineParams) -> Dict:
    payload = {
        "frames": [score.to_dict() for score in result.scores],
        "salient": sorted(result.salient),
        "deployed": [
            {"resource": resource, "residual": result.deployed[resource]} for resource in sorted(result.deployed)
        ],
        "events": [event.to_dict() for event in result.events],
    }
    if params.mind_reading:
        payload["identity"] = read_minds(agent_state, ltm, params)
    return payload


def cycle(agent_state: AgentState, env: Environment, params: EngineParams,
          natives: Optional[Mapping[ResourceId, NativeMechanism]] = None) -> List[TraceEvent]:
    """
    One pass of the agent mechanism. Interpretation uses the salient frames left
    by the previous cycle; actions are queued on the environment, not applied.
    """
    tick, agent = env.tick, agent_state.id
    ltm = agent_state.ltm
    view = open_resource_view(agent_state)
    trace = []

    percepts = perceive(env, agent_state)
    trace.append(TraceEvent(tick, agent, Stage.PERCEIVE, {"percepts": [p.to_dict() for p in percepts]}))

    context = interpret(sensory_drain(agent_state), agent_state.working.salient_frames, ltm, owner=agent)
    agent_state.working.social_context = context
    trace.append(TraceEvent(tick, agent, Stage.INTERPRET, {
        "social_context": context.to_list(),
        "conflicts": [[first.to_dict(), second.to_dict()] for first, second in detect_conflicts(context)],
    }))

    result = update(context, ltm, agent_state.profile, params, agent_state.working, tick, owner=agent)
    agent_state.working.salient_frames = result.salient
    agent_state.working.deployed = dict(result.deployed)
    if params.policy is DeploymentPolicy.UNDEPLOY_HOOK:
        run_finalizers(view, result.events, ltm)
    trace.append(TraceEvent(tick, agent, Stage.UPDATE, _update_payload(result, agent_state, ltm, params)))

    agent_state.executing = True
    try:
        actions = execute(view, result.deployed, ltm, natives)
    finally:
        agent_state.executing = False
    trace.append(TraceEvent(tick, agent, Stage.EXECUTE, {
        "actions": [action.to_dict() for action in actions],
        "scratch": {key: agent_state.working.scratch[key] for key in sorted(agent_state.working.scratch)},
    }))

    env.pending_actions.extend(actions)
    trace.append(TraceEvent(tick, agent, Stage.ACT, {"pending": len(actions)}))

    logger.debug(
        f"tick {tick} {agent}: salient={sorted(result.salient)} "
        f"deployed={sorted(result.deployed)} actions={len(actions)}"
    )
    return trace


def build_ltm(scenario, agent_id: str) -> LongTermMemory:
    """Long-term memory of one agent: its own frames and every declared resource"""
    spec = scenario.agents[agent_id]
    return LongTermMemory({frame_id: scenario.frames[frame_id] for frame_id in spec.frames}, scenario.resources)


class Simulation:
    """
    Steps a scenario tick by tick: scripted events, then every agent's cycle in id
    order against the same snapshot, then the action barrier
    """

    def __init__(self, scenario, seed: int = 0, params: Optional[EngineParams] = None,
                 natives: Optional[Mapping[ResourceId, NativeMechanism]] = None):
        problems = errors_only(validate(scenario))
        if problems:
            raise ValidationError(problems)

        self.scenario = scenario
        self.seed = seed
        self.params = params or scenario.params
        self.natives = dict(natives or {})
        self.rng = random.Random(seed)
        self.env = Environment(entities=copy.deepcopy(scenario.entities))
        self.agents: Dict[str, AgentState] = {
            agent_id: AgentState(scenario.agents[agent_id], build_ltm(scenario, agent_id))
            for agent_id in scenario.agent_ids()
        }
        self.trace: List[TraceEvent] = []
        self.applied: List[Action] = []

    @property
    def tick(self) -> int:
        return self.env.tick

    def step(self) -> List[TraceEvent]:
        """Advance one tick and return its trace events"""
        for event in self.scenario.events_at(self.env.tick):
            if self.env.apply_event(event, self.rng):
                logger.debug(f"tick {self.env.tick}: event on {event.entity} applied")

        tick_trace: List[TraceEvent] = []
        for agent_id in sorted(self.agents):
            tick_trace.extend(cycle(self.agents[agent_id], self.env, self.params, self.natives))

        self.applied.extend(self.env.apply_pending())
        self.trace.extend(tick_trace)
        self.env.tick += 1
        return tick_trace

    def run(self, ticks: int) -> List[TraceEvent]:
        if ticks < 0:
            raise ValueError("ticks must be non-negative")
        logger.info(f"running '{self.scenario.name}' for {ticks} ticks (seed {self.seed})")
        for _ in range(ticks):
            self.step()
        return self.trace


def run(scenario, ticks: int, seed: int = 0, params: Optional[EngineParams] = None,
        natives: Optional[Mapping[ResourceId, NativeMechanism]] = None) -> List[TraceEvent]:
    """Run a scenario and return its full trace"""
    return Simulation(scenario, seed, params, natives).run(ticks)
