"""
Memory System for csf-sim
Sensory, working and long-term memory, and the scoped view cognitive resources work through
"""
import hashlib
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Optional

from core.errors import AccessViolation, UnknownFrame
from core.model import (
    AgentSpec, CognitiveResource, CognitiveSocialFrame, FrameId, Percept,
    Profile, ResourceId, ResourceKind, Scalar, SocialContext,
)

logger = logging.getLogger(__name__)


class SensoryMemory:
    """
    Holds the raw percepts of the current cycle until they are interpreted
    """

    def __init__(self):
        self._percepts: List[Percept] = []

    def write(self, percepts: List[Percept]):
        """Replace any stale content with this cycle's percepts"""
        self._percepts = list(percepts)

    def drain(self) -> List[Percept]:
        """Return the held percepts and empty the store"""
        percepts, self._percepts = self._percepts, []
        return percepts

    def __len__(self) -> int:
        return len(self._percepts)


@dataclass
class WorkingMemory:
    """Social context, salient frames, deployed resources and resource-managed scratch data"""
    social_context: SocialContext = field(default_factory=SocialContext)
    salient_frames: FrozenSet[FrameId] = frozenset()
    deployed: Dict[ResourceId, float] = field(default_factory=dict)
    scratch: Dict[str, Scalar] = field(default_factory=dict)

    def deployed_ids(self) -> FrozenSet[ResourceId]:
        return frozenset(self.deployed)

    def copy(self) -> "WorkingMemory":
        return WorkingMemory(
            social_context=self.social_context,
            salient_frames=self.salient_frames,
            deployed=dict(self.deployed),
            scratch=dict(self.scratch),
        )


class LongTermMemory:
    """
    Frame and resource definitions; read-only for the whole run
    """

    def __init__(self, frames: Mapping[FrameId, CognitiveSocialFrame], resources: Mapping[ResourceId, CognitiveResource]):
        self.frames: Mapping[FrameId, CognitiveSocialFrame] = MappingProxyType(dict(frames))
        self.resources: Mapping[ResourceId, CognitiveResource] = MappingProxyType(dict(resources))

    def frame(self, frame_id: FrameId) -> CognitiveSocialFrame:
        if frame_id not in self.frames:
            raise UnknownFrame(frame_id)
        return self.frames[frame_id]

    def frame_ids(self) -> List[FrameId]:
        """Frame ids in lexicographic order"""
        return sorted(self.frames)

    def facts_of(self, resource_ids) -> Dict[str, Scalar]:
        """
        Facts of the given knowledge resources; on key clashes the first resource in id order wins
        """
        facts: Dict[str, Scalar] = {}
        for resource_id in sorted(resource_ids):
            resource = self.resources.get(resource_id)
            if resource is None or resource.kind is not ResourceKind.KNOWLEDGE:
                continue
            for key, value in resource.facts.items():
                facts.setdefault(key, value)
        return facts

    def fingerprint(self) -> str:
        """Content hash used to check that a run never mutates long-term memory"""
        digest = hashlib.sha256()
        for frame_id in sorted(self.frames):
            digest.update(repr(self.frames[frame_id]).encode("utf-8"))
        for resource_id in sorted(self.resources):
            digest.update(repr(self.resources[resource_id]).encode("utf-8"))
        return digest.hexdigest()


@dataclass
class AccessAudit:
    """Instrumentation for the memory access rules"""
    sensory_reads: int = 0
    denied: List[AccessViolation] = field(default_factory=list)


class AgentState:
    """
    Runtime state of one agent: its profile and its three memory stores
    """

    def __init__(self, spec: AgentSpec, ltm: LongTermMemory):
        self.id = spec.id
        self.profile: Profile = spec.profile
        self.sensory = SensoryMemory()
        self.working = WorkingMemory(salient_frames=frozenset(spec.profile.default_salient))
        self.ltm = ltm
        self.audit = AccessAudit()
        self.executing = False

    def __repr__(self) -> str:
        return f"AgentState({self.id!r}, salient={sorted(self.working.salient_frames)})"


def sensory_write(state: AgentState, percepts: List[Percept]) -> AgentState:
    """Perceive stage: store this cycle's percepts"""
    state.sensory.write(percepts)
    return state


def sensory_drain(state: AgentState) -> List[Percept]:
    """Interpret stage: take the percepts out of sensory memory"""
    if state.executing:
        state.audit.sensory_reads += 1
    return state.sensory.drain()


class ResourceView:
    """
    The only handle a cognitive resource receives.
    Working memory is readable and writable, long-term frames are readable,
    sensory memory is never reachable.
    """

    __slots__ = ("__state",)

    def __init__(self, state: AgentState):
        self.__state = state

    @property
    def owner(self) -> str:
        return self.__state.id

    def read_social_context(self) -> SocialContext:
        return self.__state.working.social_context

    def read_salient_frames(self) -> FrozenSet[FrameId]:
        return self.__state.working.salient_frames

    def read_deployed(self) -> FrozenSet[ResourceId]:
        return self.__state.working.deployed_ids()

    def read_facts(self) -> Dict[str, Scalar]:
        """Facts of the deployed knowledge resources"""
        return self.__state.ltm.facts_of(self.__state.working.deployed)

    def read_scratch(self, key: Optional[str] = None):
        scratch = self.__state.working.scratch
        if key is None:
            return MappingProxyType(scratch)
        return scratch.get(key)

    def write_scratch(self, key: str, value: Scalar):
        self.__state.working.scratch[key] = value

    def clear_scratch(self, key: str):
        self.__state.working.scratch.pop(key, None)

    def read_frame(self, frame_id: FrameId) -> CognitiveSocialFrame:
        return self.__state.ltm.frame(frame_id)

    def list_frames(self) -> List[FrameId]:
        return self.__state.ltm.frame_ids()

    def write_frame(self, frame: CognitiveSocialFrame):
        self._deny(3, "write_frame")

    def read_sensory(self):
        self._deny(1, "read_sensory")

    def write_sensory(self, percepts):
        self._deny(1, "write_sensory")

    def _deny(self, rule: int, operation: str):
        violation = AccessViolation(rule, operation)
        self.__state.audit.denied.append(violation)
        logger.warning(f"{self.__state.id}: {violation}")
        raise violation


def open_resource_view(state: AgentState) -> ResourceView:
    """Scoped handle enforcing the memory access rules"""
    return ResourceView(state)
