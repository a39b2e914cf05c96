"""
Built-in scenarios shipped with csf-sim
"""
import logging
from pathlib import Path
from typing import Dict, List

from core.errors import UnknownScenario
from scenario.parser import load_scenario
from scenario.schema import Scenario

logger = logging.getLogger(__name__)

BUILTIN_DIR = Path(__file__).parent / "builtin"

BUILTINS: Dict[str, str] = {
    "library_dance": "the same peer is a dance partner at home and a quiet fellow reader in a library",
    "coach_father": "a coaching father holds two conflicting readings of his son at once",
}


def builtin_names() -> List[str]:
    return sorted(BUILTINS)


def builtin_path(name: str) -> Path:
    if name not in BUILTINS:
        raise UnknownScenario(name, builtin_names())
    return BUILTIN_DIR / f"{name}.json"


def builtin(name: str) -> Scenario:
    """Load a built-in scenario by name"""
    path = builtin_path(name)
    logger.debug(f"loading built-in scenario {name} from {path}")
    return load_scenario(path)
