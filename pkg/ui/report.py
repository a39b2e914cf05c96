"""
Trace reports for csf-sim
Summary statistics over a run and the per-tick salience table used by explain.
Both work on trace records as dictionaries, so a trace file can be reported on
without re-running its scenario.
"""
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO

from ui.colors import ColorThemes, StatusBar, paint


def write_trace(events: Iterable, path: Path) -> Path:
    """One JSON object per line, in emission order"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for event in events:
            f.write(event.to_json_line() + "\n")
    return path


def read_trace(path: Path) -> List[Dict]:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


@dataclass
class AgentSummary:
    salient: Counter = field(default_factory=Counter)
    actions: Counter = field(default_factory=Counter)
    conflicts: int = 0
    deployed: int = 0


@dataclass
class RunSummary:
    ticks: int
    agents: Dict[str, AgentSummary]


def summarize(records: Iterable[Dict]) -> RunSummary:
    ticks = set()
    agents: Dict[str, AgentSummary] = {}
    for record in records:
        ticks.add(record["tick"])
        agent = agents.setdefault(record["agent"], AgentSummary())
        payload = record["payload"]
        if record["stage"] == "interpret":
            agent.conflicts += len(payload["conflicts"])
        elif record["stage"] == "update":
            agent.salient.update(payload["salient"])
            agent.deployed += len(payload["deployed"])
        elif record["stage"] == "execute":
            agent.actions.update(action["verb"] for action in payload["actions"])
    return RunSummary(ticks=len(ticks), agents=agents)


def format_summary(summary: RunSummary, stream: Optional[TextIO] = None) -> List[str]:
    lines = [paint(f"ticks: {summary.ticks}", ColorThemes.HEADING, stream)]
    for agent_id in sorted(summary.agents):
        agent = summary.agents[agent_id]
        lines.append(paint(f"agent {agent_id}", ColorThemes.HEADING, stream))
        lines.append("  salient frames:")
        if not agent.salient:
            lines.append("    (none)")
        for frame_id in sorted(agent.salient):
            bar = StatusBar.share_bar(agent.salient[frame_id], summary.ticks, stream=stream)
            lines.append(f"    {frame_id:<20} {bar}")
        lines.append("  actions:")
        if not agent.actions:
            lines.append("    (none)")
        for verb in sorted(agent.actions):
            lines.append(f"    {verb:<20} {agent.actions[verb]}")
        lines.append(paint(f"  conflicts: {agent.conflicts}", ColorThemes.CONFLICT, stream))
        lines.append(paint(f"  deployed resources: {agent.deployed}", ColorThemes.DEPLOYED, stream))
    return lines


def find_update(records: Iterable[Dict], tick: int, agent: str) -> Optional[Dict]:
    """The update payload of one agent at one tick, or None"""
    for record in records:
        if record["tick"] == tick and record["agent"] == agent and record["stage"] == "update":
            return record["payload"]
    return None


def format_explain(payload: Dict, tick: int, agent: str, stream: Optional[TextIO] = None) -> List[str]:
    """Fitness, preference, salience and verdict of every frame, then the deployed set"""
    lines = [
        paint(f"tick {tick}, agent {agent}", ColorThemes.HEADING, stream),
        f"{'frame':<20} {'fitness':>22} {'preference':>22} {'salience':>22}  verdict",
    ]
    for row in payload["frames"]:
        verdict = paint("salient", ColorThemes.SALIENT, stream) if row["salient"] else \
            paint("below threshold", ColorThemes.NOT_SALIENT, stream)
        lines.append(
            f"{row['frame']:<20} {row['fitness']!r:>22} {row['preference']!r:>22} {row['salience']!r:>22}  {verdict}"
        )
    deployed = ", ".join(f"{item['resource']} ({item['residual']!r})" for item in payload["deployed"])
    lines.append(paint(f"deployed: {deployed or '(none)'}", ColorThemes.DEPLOYED, stream))
    return lines
