"""
ANSI Color System for Terminal Output
Provides colors and bars for csf-sim summaries and explain tables
"""
import os
import sys
from typing import Optional, TextIO

NO_COLOR_ENV = "CSFSIM_NO_COLOR"


class Colors:
    """ANSI color codes and text effects"""

    RESET = '\033[0m'

    RED = '\033[31m'
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    CYAN = '\033[36m'

    BRIGHT_BLACK = '\033[90m'
    BRIGHT_RED = '\033[91m'
    BRIGHT_GREEN = '\033[92m'
    BRIGHT_YELLOW = '\033[93m'
    BRIGHT_CYAN = '\033[96m'
    BRIGHT_MAGENTA = '\033[95m'

    BOLD = '\033[1m'
    DIM = '\033[2m'


class ColorThemes:
    """Colors for the parts of a report"""

    HEADING = Colors.BOLD + Colors.BRIGHT_CYAN
    SALIENT = Colors.BRIGHT_GREEN
    NOT_SALIENT = Colors.DIM
    DEPLOYED = Colors.BRIGHT_MAGENTA
    CONFLICT = Colors.BRIGHT_YELLOW
    ERROR = Colors.BRIGHT_RED
    WARNING = Colors.YELLOW


def colors_enabled(stream: Optional[TextIO] = None) -> bool:
    """Styling is off when CSFSIM_NO_COLOR is set or the stream is not a terminal"""
    if os.environ.get(NO_COLOR_ENV):
        return False
    stream = stream or sys.stdout
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def paint(text: str, color: str, stream: Optional[TextIO] = None) -> str:
    if not colors_enabled(stream):
        return text
    return f"{color}{text}{Colors.RESET}"


class StatusBar:
    """Proportional bars for summary tables"""

    @staticmethod
    def share_bar(count: int, total: int, width: int = 20, stream: Optional[TextIO] = None) -> str:
        """Bar showing count out of total, e.g. how many ticks a frame was salient"""
        share = count / total if total else 0.0
        filled = int(round(width * share))
        bar = paint('█' * filled, ColorThemes.SALIENT, stream) + paint('░' * (width - filled), Colors.DIM, stream)
        return f"[{bar}] {count}/{total}"
