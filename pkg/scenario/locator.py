"""
Source positions for scenario documents
Maps JSON paths such as ("frames", "coach", "resources", 0) to line/column in the text
"""
import re
from json.decoder import scanstring
from typing import Dict, Optional, Tuple, Union

PathPart = Union[str, int]
Path = Tuple[PathPart, ...]

_LITERAL = re.compile(r'-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][-+]?\d+)?|true|false|null')
_WHITESPACE = re.compile(r'[ \t\n\r]*')


def format_path(path: Path) -> str:
    """("frames", "coach", "resources", 0) -> frames.coach.resources[0]"""
    text = ""
    for part in path:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else part
    return text


class SourceLocator:
    """
    Records where every value of a well-formed JSON document starts.
    Only used after json.loads accepted the text, so the scan can be forgiving.
    """

    def __init__(self, text: str):
        self.text = text
        self.offsets: Dict[Path, int] = {}
        try:
            self._value(self._skip(0), ())
        except (IndexError, ValueError):
            pass

    def _skip(self, index: int) -> int:
        return _WHITESPACE.match(self.text, index).end()

    def _value(self, index: int, path: Path) -> int:
        self.offsets[path] = index
        char = self.text[index]
        if char == "{":
            return self._object(index + 1, path)
        if char == "[":
            return self._array(index + 1, path)
        if char == '"':
            return scanstring(self.text, index + 1)[1]
        match = _LITERAL.match(self.text, index)
        if not match:
            raise ValueError(f"unexpected character at {index}")
        return match.end()

    def _object(self, index: int, path: Path) -> int:
        index = self._skip(index)
        if self.text[index] == "}":
            return index + 1
        while True:
            key, index = scanstring(self.text, self._skip(index) + 1)
            index = self._skip(index)  # at ':'
            index = self._value(self._skip(index + 1), path + (key,))
            index = self._skip(index)
            if self.text[index] == "}":
                return index + 1
            index += 1  # ','

    def _array(self, index: int, path: Path) -> int:
        index = self._skip(index)
        if self.text[index] == "]":
            return index + 1
        position = 0
        while True:
            index = self._value(self._skip(index), path + (position,))
            position += 1
            index = self._skip(index)
            if self.text[index] == "]":
                return index + 1
            index += 1

    def position(self, path: Path) -> Tuple[Optional[int], Optional[int]]:
        """
        1-based (line, column) of the value at path, or of its nearest recorded ancestor
        """
        path = tuple(path)
        while path not in self.offsets and path:
            path = path[:-1]
        offset = self.offsets.get(path)
        if offset is None:
            return None, None
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column
