"""
Condition evaluation for csf-sim
Conjunctions of (selector, comparator, literal) atoms used by construal filters,
fitness terms and mechanism rules. Evaluation is total: anything unresolvable is absent.
"""
from dataclasses import dataclass, field
from typing import Any, FrozenSet, List, Mapping, Optional, Tuple


OPERATORS = ("==", "!=", "<", "<=", ">", ">=", "exists")

# Selector kinds and whether they need a bound subject
SELECTOR_KINDS = {
    "subject": True,
    "attr": False,
    "social": True,
    "context": False,
    "conflict": True,
    "fact": False,
    "deployed": False,
    "scratch": False,
    "self": True,
}
_BARE_SELECTORS = ("subject", "self")


def split_selector(selector: str) -> Tuple[str, str]:
    """
    Split "kind:argument" into its parts; bare selectors have an empty argument
    Raises ValueError for unknown kinds or missing arguments
    """
    if selector in _BARE_SELECTORS:
        return selector, ""
    kind, sep, argument = selector.partition(":")
    if not sep or kind not in SELECTOR_KINDS or kind in _BARE_SELECTORS or not argument:
        raise ValueError(f"unknown selector '{selector}'")
    return kind, argument


@dataclass(frozen=True)
class Atom:
    selector: str
    op: str
    value: Any = None

    def __post_init__(self):
        split_selector(self.selector)
        if self.op not in OPERATORS:
            raise ValueError(f"unknown comparator '{self.op}'")

    @property
    def kind(self) -> str:
        return split_selector(self.selector)[0]

    @property
    def argument(self) -> str:
        return split_selector(self.selector)[1]

    def to_dict(self) -> dict:
        data = {"sel": self.selector, "op": self.op}
        if self.op != "exists":
            data["value"] = self.value
        return data


@dataclass(frozen=True)
class Condition:
    """A conjunction of atoms; the empty conjunction always holds"""
    atoms: Tuple[Atom, ...] = ()

    def needs_subject(self) -> bool:
        """True when some atom reads the bound subject"""
        return any(SELECTOR_KINDS[atom.kind] for atom in self.atoms)

    def attributes_guaranteed(self) -> FrozenSet[str]:
        """Percept attributes that must be present whenever this condition holds"""
        return frozenset(atom.argument for atom in self.atoms if atom.kind == "attr")

    def evaluate(self, scope: "EvalScope") -> bool:
        return all(_holds(atom, scope) for atom in self.atoms)

    def to_list(self) -> List[dict]:
        return [atom.to_dict() for atom in self.atoms]


@dataclass
class EvalScope:
    """
    Everything a condition may look at; every field is optional
    percept: raw percept under a construal filter
    subject: bound subject (percept subject or mechanism binding)
    """
    percept: Any = None
    subject: Optional[str] = None
    social_context: Any = None
    facts: Mapping[str, Any] = field(default_factory=dict)
    deployed: FrozenSet[str] = frozenset()
    scratch: Mapping[str, Any] = field(default_factory=dict)
    owner: Optional[str] = None


_ABSENT: List[Any] = []


def _resolve(atom: Atom, scope: EvalScope) -> List[Any]:
    """Candidate values a selector yields; an empty list means absent"""
    kind, argument = split_selector(atom.selector)
    if kind == "subject":
        subject = scope.subject if scope.subject is not None else getattr(scope.percept, "subject", None)
        return [subject] if subject is not None else _ABSENT
    if kind == "attr":
        attributes = getattr(scope.percept, "attributes", None) or {}
        return [attributes[argument]] if argument in attributes else _ABSENT
    if kind == "social":
        if scope.social_context is None or scope.subject is None:
            return _ABSENT
        return scope.social_context.values(scope.subject, argument)
    if kind == "context":
        if scope.social_context is None:
            return _ABSENT
        return scope.social_context.values(None, argument)
    if kind == "conflict":
        if scope.social_context is None or scope.subject is None:
            return _ABSENT
        return [True] if scope.social_context.has_conflict(scope.subject, argument) else _ABSENT
    if kind == "fact":
        return [scope.facts[argument]] if argument in scope.facts else _ABSENT
    if kind == "deployed":
        return [True] if argument in scope.deployed else _ABSENT
    if kind == "scratch":
        return [scope.scratch[argument]] if argument in scope.scratch else _ABSENT
    if kind == "self":
        subject = scope.subject if scope.subject is not None else getattr(scope.percept, "subject", None)
        if subject is None or scope.owner is None:
            return _ABSENT
        return [subject == scope.owner]
    return _ABSENT


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _same_type(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool)
    if _is_number(a) or _is_number(b):
        return _is_number(a) and _is_number(b)
    return isinstance(a, str) and isinstance(b, str)


def compare(actual, op: str, expected) -> bool:
    """Compare one present value; ordering across incompatible types is false"""
    if op == "exists":
        return True
    if op == "==":
        return _same_type(actual, expected) and actual == expected
    if op == "!=":
        return not (_same_type(actual, expected) and actual == expected)
    if not _same_type(actual, expected) or isinstance(actual, bool):
        return False
    if op == "<":
        return actual < expected
    if op == "<=":
        return actual <= expected
    if op == ">":
        return actual > expected
    if op == ">=":
        return actual >= expected
    return False


def _holds(atom: Atom, scope: EvalScope) -> bool:
    candidates = _resolve(atom, scope)
    return any(compare(candidate, atom.op, atom.value) for candidate in candidates)
