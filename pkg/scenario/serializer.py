"""
Scenario serializer for csf-sim
Writes a Scenario back out as a document parse_scenario reads to an equal Scenario
"""
import json
from typing import Dict

from core.conditions import Condition
from core.model import ActionTemplate, AgentSpec, CognitiveResource, CognitiveSocialFrame
from scenario.schema import Scenario, ScriptedEvent


def _condition(condition: Condition):
    return condition.to_list()


def _frame(frame: CognitiveSocialFrame) -> Dict:
    return {
        "construal": [
            {
                "filter": _condition(rule.filter),
                "annotate": {
                    "dimension": rule.annotate.dimension,
                    "value": rule.annotate.value,
                    "strength": rule.annotate.strength,
                },
            }
            for rule in frame.construal
        ],
        "fitness": {
            "bias": frame.fitness.bias,
            "terms": [{"when": _condition(term.condition), "weight": term.weight} for term in frame.fitness.terms],
        },
        "resources": sorted(frame.resources),
    }


def _template(template: ActionTemplate) -> Dict:
    data = {"verb": template.verb}
    if template.target is not None:
        data["target"] = template.target
    if template.args:
        data["args"] = dict(template.args)
    if template.memo:
        data["memo"] = dict(template.memo)
    if template.effects:
        data["effects"] = [{"on": effect.on, "set": dict(effect.set)} for effect in template.effects]
    return data


def _resource(resource: CognitiveResource) -> Dict:
    data = {"kind": resource.kind.value}
    if resource.is_mechanism:
        data["rules"] = [
            {
                "name": rule.name,
                "priority": rule.priority,
                "when": _condition(rule.condition),
                "do": _template(rule.action),
            }
            for rule in resource.rules
        ]
    else:
        data["facts"] = dict(resource.facts)
    if resource.on_undeploy:
        data["on_undeploy"] = dict(resource.on_undeploy)
    return data


def _agent(agent: AgentSpec) -> Dict:
    data = {
        "frames": list(agent.frames),
        "preferences": dict(agent.profile.preferences),
        "default_salient": sorted(agent.profile.default_salient),
    }
    if agent.profile.alpha is not None:
        data["alpha"] = agent.profile.alpha
    return data


def _event(event: ScriptedEvent) -> Dict:
    data = {"tick": event.tick, "entity": event.entity, "set": dict(event.set)}
    if event.probability is not None:
        data["probability"] = event.probability
    if event.choose:
        data["choose"] = {name: list(options) for name, options in event.choose.items()}
    return data


def scenario_to_dict(scenario: Scenario) -> Dict:
    return {
        "name": scenario.name,
        "description": scenario.description,
        "params": scenario.params.model_dump(mode="json"),
        "entities": {entity_id: dict(attributes) for entity_id, attributes in scenario.entities.items()},
        "frames": {frame_id: _frame(frame) for frame_id, frame in scenario.frames.items()},
        "resources": {resource_id: _resource(resource) for resource_id, resource in scenario.resources.items()},
        "agents": {agent_id: _agent(agent) for agent_id, agent in scenario.agents.items()},
        "events": [_event(event) for event in scenario.events],
    }


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, ensure_ascii=False) + "\n"
