"""
Scenario schema for csf-sim
The fully resolved, in-memory form of a scenario document
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from core.frames import EngineParams
from core.model import AgentSpec, CognitiveResource, CognitiveSocialFrame, EntityId, Scalar
from scenario.locator import SourceLocator


@dataclass(frozen=True)
class ScriptedEvent:
    """
    Attribute mutations applied to one entity at the start of a tick.
    probability gates the whole event; choose picks one value per attribute.
    Both draw from the run's seeded generator.
    """
    tick: int
    entity: EntityId
    set: Mapping[str, Scalar] = field(default_factory=dict)
    probability: Optional[float] = None
    choose: Mapping[str, Tuple[Scalar, ...]] = field(default_factory=dict)

    @property
    def stochastic(self) -> bool:
        return self.probability is not None or bool(self.choose)


@dataclass
class Scenario:
    name: str
    params: EngineParams
    entities: Dict[EntityId, Dict[str, Scalar]]
    frames: Dict[str, CognitiveSocialFrame]
    resources: Dict[str, CognitiveResource]
    agents: Dict[str, AgentSpec]
    events: List[ScriptedEvent] = field(default_factory=list)
    description: str = ""
    # source positions of the parsed document, if any
    locator: Optional[SourceLocator] = field(default=None, compare=False, repr=False)

    def agent_ids(self) -> List[str]:
        return sorted(self.agents)

    def events_at(self, tick: int) -> List[ScriptedEvent]:
        """Events of one tick in document order"""
        return [event for event in self.events if event.tick == tick]

    def last_event_tick(self) -> int:
        return max((event.tick for event in self.events), default=-1)
