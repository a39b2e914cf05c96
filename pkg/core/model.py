"""
Domain model for csf-sim
Percepts, social percepts, frames, resources and profiles shared by every module
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from core.conditions import Condition

Scalar = Union[str, int, float, bool]
EntityId = str
AgentId = str
FrameId = str
ResourceId = str

# The tag orders mixed scalars (bool < number < text) so keys always sort
_TAG_BOOL = 0
_TAG_NUMBER = 1
_TAG_TEXT = 2


def scalar_key(value: Scalar) -> Tuple[int, Scalar]:
    """
    Tag a scalar so that True and 1 never collide and mixed values sort
    """
    if isinstance(value, bool):
        return (_TAG_BOOL, value)
    if isinstance(value, (int, float)):
        return (_TAG_NUMBER, value)
    return (_TAG_TEXT, str(value))


def is_scalar(value) -> bool:
    """Check that a value is text, number or boolean"""
    return isinstance(value, (str, int, float, bool)) and value is not None


@dataclass(frozen=True)
class Percept:
    """A raw observation of one entity, as held by sensory memory"""
    subject: EntityId
    attributes: Mapping[str, Scalar] = field(default_factory=dict)
    tick: int = 0

    def get(self, name: str, default=None):
        """Look up one attribute"""
        return self.attributes.get(name, default)

    def to_dict(self) -> Dict:
        return {
            "subject": self.subject,
            "attributes": {name: self.attributes[name] for name in sorted(self.attributes)},
        }


def percept_identity(percept: Percept) -> Tuple:
    """
    Identity key of a percept: its subject plus the attribute list in canonical order
    """
    attrs = tuple(sorted((name, scalar_key(value)) for name, value in percept.attributes.items()))
    return (percept.subject, attrs)


@dataclass(frozen=True)
class SocialPercept:
    """
    An interpreted percept: a (dimension, value) reading of one subject,
    attributed to the frames whose construal produced it
    """
    subject: EntityId
    dimension: str
    value: Scalar
    sources: FrozenSet[FrameId]
    strength: float = 1.0

    def __post_init__(self):
        if not self.sources:
            raise ValueError(f"social percept ({self.subject}, {self.dimension}) has no source frame")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"strength {self.strength} outside [0, 1]")
        if not isinstance(self.sources, frozenset):
            object.__setattr__(self, "sources", frozenset(self.sources))

    @property
    def key(self) -> Tuple:
        return social_percept_identity(self)

    def merge(self, other: "SocialPercept") -> "SocialPercept":
        """
        Combine two readings with the same identity key
        """
        if self.key != other.key:
            raise ValueError(f"cannot merge {self.key} with {other.key}")
        return SocialPercept(
            subject=self.subject,
            dimension=self.dimension,
            value=self.value,
            sources=self.sources | other.sources,
            strength=max(self.strength, other.strength),
        )

    def to_dict(self) -> Dict:
        return {
            "subject": self.subject,
            "dimension": self.dimension,
            "value": self.value,
            "sources": sorted(self.sources),
            "strength": self.strength,
        }


def social_percept_identity(percept: SocialPercept) -> Tuple:
    """Identity key (subject, dimension, value); sources and strength are ignored"""
    return (percept.subject, percept.dimension, scalar_key(percept.value))


def conflicts(a: SocialPercept, b: SocialPercept) -> bool:
    """Two readings conflict when they give one subject different values on one dimension"""
    return (
        a.subject == b.subject
        and a.dimension == b.dimension
        and scalar_key(a.value) != scalar_key(b.value)
    )


class SocialContext:
    """
    The agent's interpretation of its surroundings: a set of social percepts
    in which equal identity keys are always merged
    """

    def __init__(self, percepts: Iterable[SocialPercept] = ()):
        self._percepts: Dict[Tuple, SocialPercept] = {}
        for percept in percepts:
            existing = self._percepts.get(percept.key)
            self._percepts[percept.key] = existing.merge(percept) if existing else percept

    def __iter__(self) -> Iterator[SocialPercept]:
        return iter(self.percepts)

    def __len__(self) -> int:
        return len(self._percepts)

    def __contains__(self, item) -> bool:
        if isinstance(item, SocialPercept):
            return item.key in self._percepts
        return item in self._percepts

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialContext):
            return NotImplemented
        return self._percepts == other._percepts

    def __repr__(self) -> str:
        return f"SocialContext({list(self.percepts)!r})"

    @property
    def percepts(self) -> Tuple[SocialPercept, ...]:
        """Percepts in identity-key order"""
        return tuple(self._percepts[key] for key in sorted(self._percepts))

    def get(self, key: Tuple) -> Optional[SocialPercept]:
        return self._percepts.get(key)

    def merge(self, other: "SocialContext") -> "SocialContext":
        """Identity-key merge of two contexts"""
        return SocialContext(list(self._percepts.values()) + list(other._percepts.values()))

    def subjects(self) -> List[EntityId]:
        return sorted({percept.subject for percept in self._percepts.values()})

    def about(self, subject: EntityId) -> List[SocialPercept]:
        return [percept for percept in self.percepts if percept.subject == subject]

    def values(self, subject: Optional[EntityId], dimension: str) -> List[Scalar]:
        """Values recorded on a dimension, for one subject or for any subject"""
        return [
            percept.value for percept in self.percepts
            if percept.dimension == dimension and (subject is None or percept.subject == subject)
        ]

    def has_conflict(self, subject: EntityId, dimension: str) -> bool:
        return len({scalar_key(value) for value in self.values(subject, dimension)}) > 1

    def to_list(self) -> List[Dict]:
        return [percept.to_dict() for percept in self.percepts]


@dataclass(frozen=True)
class Annotation:
    """
    Interpretation template of a construal rule
    value may be a literal, "$subject" or "$attr:<name>"
    """
    dimension: str
    value: Scalar
    strength: float = 1.0

    def referenced_attribute(self) -> Optional[str]:
        if isinstance(self.value, str) and self.value.startswith("$attr:"):
            return self.value[len("$attr:"):]
        return None


@dataclass(frozen=True)
class ConstrualRule:
    """Attention filter plus interpretation template"""
    filter: Condition
    annotate: Annotation


@dataclass(frozen=True)
class FitnessTerm:
    condition: Condition
    weight: float


@dataclass(frozen=True)
class FitnessExpr:
    """bias plus the weights of the terms whose conditions hold on working memory"""
    terms: Tuple[FitnessTerm, ...] = ()
    bias: float = 0.0


@dataclass(frozen=True)
class CognitiveSocialFrame:
    id: FrameId
    construal: Tuple[ConstrualRule, ...]
    fitness: FitnessExpr
    resources: FrozenSet[ResourceId] = frozenset()


class ResourceKind(Enum):
    KNOWLEDGE = "knowledge"
    MECHANISM = "mechanism"


@dataclass(frozen=True)
class Effect:
    """Attribute assignments applied to the actor or target at the tick barrier"""
    on: str
    set: Mapping[str, Scalar]


@dataclass(frozen=True)
class ActionTemplate:
    verb: str
    target: Optional[str] = None
    args: Mapping[str, Scalar] = field(default_factory=dict)
    memo: Mapping[str, Scalar] = field(default_factory=dict)
    effects: Tuple[Effect, ...] = ()

    def mentions_subject(self) -> bool:
        values = [self.target, *self.args.values(), *self.memo.values()]
        return any(value == "$subject" for value in values)


@dataclass(frozen=True)
class MechanismRule:
    condition: Condition
    action: ActionTemplate
    priority: int = 0
    name: str = ""


@dataclass(frozen=True)
class CognitiveResource:
    """
    A deployable unit of cognition: knowledge facts or condition-action rules
    """
    id: ResourceId
    kind: ResourceKind
    facts: Mapping[str, Scalar] = field(default_factory=dict)
    rules: Tuple[MechanismRule, ...] = ()
    on_undeploy: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind is ResourceKind.KNOWLEDGE and self.rules:
            raise ValueError(f"knowledge resource '{self.id}' cannot carry rules")
        if self.kind is ResourceKind.MECHANISM and self.facts:
            raise ValueError(f"mechanism resource '{self.id}' cannot carry facts")

    @property
    def is_mechanism(self) -> bool:
        return self.kind is ResourceKind.MECHANISM

    def ordered_rules(self) -> List[MechanismRule]:
        """Rules by descending priority; ties keep declaration order"""
        return sorted(self.rules, key=lambda rule: -rule.priority)


@dataclass(frozen=True)
class Profile:
    """alpha of None defers to the engine's alpha_default"""
    preferences: Mapping[FrameId, float] = field(default_factory=dict)
    alpha: Optional[float] = None
    default_salient: FrozenSet[FrameId] = frozenset()


@dataclass(frozen=True)
class AgentSpec:
    """An agent as declared by a scenario"""
    id: AgentId
    profile: Profile
    frames: Tuple[FrameId, ...]


@dataclass(frozen=True)
class Action:
    actor: AgentId
    verb: str
    target: Optional[EntityId] = None
    args: Mapping[str, Scalar] = field(default_factory=dict)
    effects: Tuple[Effect, ...] = ()

    @property
    def key(self) -> Tuple:
        """Dedup key: actor, verb, target and args (effects follow from the template)"""
        args = tuple(sorted((name, scalar_key(value)) for name, value in self.args.items()))
        return (self.actor, self.verb, self.target, args)

    def to_dict(self) -> Dict:
        return {
            "actor": self.actor,
            "verb": self.verb,
            "target": self.target,
            "args": {name: self.args[name] for name in sorted(self.args)},
        }
