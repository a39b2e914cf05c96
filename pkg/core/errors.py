"""
Error types for csf-sim
All domain failures derive from CSFError so the CLI can map them to exit codes
"""
from typing import List, Optional


class CSFError(Exception):
    """Base class for every simulation-domain failure"""


class AccessViolation(CSFError):
    """A cognitive resource attempted a memory operation its view denies"""

    RULES = {
        1: "a cognitive resource does not have access to the sensory memory",
        2: "a cognitive resource may only read and write working memory",
        3: "a cognitive resource may only read frames in long-term memory",
    }

    def __init__(self, rule: int, operation: str):
        self.rule = rule
        self.operation = operation
        super().__init__(f"access rule {rule} violated by '{operation}': {self.RULES.get(rule, 'unknown rule')}")


class UnknownFrame(CSFError):
    """A frame id was used that long-term memory does not declare"""

    def __init__(self, frame_id: str):
        self.frame_id = frame_id
        super().__init__(f"unknown frame '{frame_id}'")


class UnknownTarget(CSFError):
    """Mind-reading was asked about an actor the agent has no percept of"""

    def __init__(self, target: str):
        self.target = target
        super().__init__(f"no social percept about '{target}'")


class UnknownScenario(CSFError):
    """A built-in scenario name was not recognised"""

    def __init__(self, name: str, known: Optional[List[str]] = None):
        self.name = name
        hint = f" (known: {', '.join(known)})" if known else ""
        super().__init__(f"unknown built-in scenario '{name}'{hint}")


class ScenarioError(CSFError):
    """
    Base for scenario document failures
    Carries the JSON path of the offending node and, when known, its line/column
    """

    def __init__(self, message: str, path: str = "", line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        super().__init__(self._format())

    def _format(self) -> str:
        where = ""
        if self.line is not None:
            where = f"line {self.line}"
            if self.column is not None:
                where += f", column {self.column}"
            where += ": "
        at = f" (at {self.path})" if self.path else ""
        return f"{where}{self.message}{at}"


class ParseError(ScenarioError):
    """Malformed JSON or a node of the wrong shape"""


class DanglingReference(ScenarioError):
    """A cross-reference names an id that is not declared"""

    def __init__(self, ref: str, kind: str, path: str = "", line: Optional[int] = None, column: Optional[int] = None):
        self.ref = ref
        self.kind = kind
        super().__init__(f"undeclared {kind} '{ref}'", path, line, column)


class DomainError(ScenarioError):
    """A number or identifier outside its permitted range"""


class ValidationError(CSFError):
    """A scenario with error diagnostics was handed to the engine"""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "invalid scenario"
        super().__init__(f"scenario failed validation: {first}")
