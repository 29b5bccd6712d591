"""Strict JSON instance files.

Schema (unknown keys are rejected everywhere):

    {
      "layers": [{"detection": 0.2, "cost": 1}, ...],
      "alpha": 2,
      "budget": 10,                  // or "budgets": [5, 10, ...]
      "presets": {"name": {"weight": ..., "attack_prob": ...}},   // optional
      "devices": [
        {"id": "dev_1", "name": "...", "weight": 1, "attack_prob": 0.998,
         "critical": false, "max_layer": 3},
        {"id": "dev_2", "preset": "router", "critical": true}
      ]
    }

A device names either a preset or explicit weight + attack_prob. The built-in
presets cover five common device roles; a file-level ``presets`` block adds to
or overrides them.
"""

from __future__ import annotations

import json
from typing import Any

from .model import Device, Instance, LayerSchedule, validate_instance

BUILTIN_PRESETS: dict[str, dict[str, float]] = {
    "database_server": {"weight": 10.0, "attack_prob": 0.6},
    "router": {"weight": 8.0, "attack_prob": 0.4},
    "matter_door_lock": {"weight": 6.0, "attack_prob": 0.8},
    "laptop": {"weight": 4.0, "attack_prob": 0.2},
    "iot_sensor": {"weight": 2.0, "attack_prob": 0.3},
}


class InstanceFileError(ValueError):
    """Malformed instance document."""


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceFileError(f"{where}: unknown key(s) {sorted(unknown)}")
    absent = required - set(obj)
    if absent:
        raise InstanceFileError(f"{where}: missing key(s) {sorted(absent)}")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFileError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFileError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_device(
    entry: Any, idx: int, presets: dict[str, dict[str, float]]
) -> Device:
    where = f"devices[{idx}]"
    if not isinstance(entry, dict):
        raise InstanceFileError(f"{where}: expected an object")
    _require_keys(
        entry,
        allowed={"id", "name", "weight", "attack_prob", "critical", "max_layer", "preset"},
        required={"id"},
        where=where,
    )
    if not isinstance(entry["id"], str) or not entry["id"]:
        raise InstanceFileError(f"{where}: 'id' must be a non-empty string")

    if "preset" in entry:
        if "weight" in entry or "attack_prob" in entry:
            raise InstanceFileError(
                f"{where}: 'preset' excludes explicit 'weight'/'attack_prob'"
            )
        name = entry["preset"]
        if name not in presets:
            raise InstanceFileError(
                f"{where}: unknown preset {name!r} (known: {sorted(presets)})"
            )
        weight = presets[name]["weight"]
        attack_prob = presets[name]["attack_prob"]
    else:
        if "weight" not in entry or "attack_prob" not in entry:
            raise InstanceFileError(
                f"{where}: need 'weight' and 'attack_prob' (or a 'preset')"
            )
        weight = _number(entry["weight"], f"{where}.weight")
        attack_prob = _number(entry["attack_prob"], f"{where}.attack_prob")

    critical = entry.get("critical", False)
    if not isinstance(critical, bool):
        raise InstanceFileError(f"{where}: 'critical' must be a boolean")
    max_layer = entry.get("max_layer")
    if max_layer is not None:
        max_layer = _integer(max_layer, f"{where}.max_layer")
    name = entry.get("name", "")
    if not isinstance(name, str):
        raise InstanceFileError(f"{where}: 'name' must be a string")
    return Device(
        id=entry["id"],
        weight=weight,
        attack_prob=attack_prob,
        critical=critical,
        max_layer=max_layer,
        name=name,
    )


def parse_instance_document(text: str) -> tuple[Instance, list[float] | None]:
    """Parse instance JSON; returns the instance plus the budget list, if any.

    With a single ``budget`` the list is ``None`` and the instance carries the
    budget; with ``budgets`` the instance carries the first entry and the full
    list is returned for sweeps.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFileError("top level: expected an object")
    _require_keys(
        doc,
        allowed={"layers", "alpha", "budget", "budgets", "devices", "presets"},
        required={"layers", "alpha", "devices"},
        where="top level",
    )
    if ("budget" in doc) == ("budgets" in doc):
        raise InstanceFileError("top level: provide exactly one of 'budget'/'budgets'")

    layers_doc = doc["layers"]
    if not isinstance(layers_doc, list) or not layers_doc:
        raise InstanceFileError("'layers' must be a non-empty list")
    detections = []
    costs = []
    for idx, layer in enumerate(layers_doc):
        where = f"layers[{idx}]"
        if not isinstance(layer, dict):
            raise InstanceFileError(f"{where}: expected an object")
        _require_keys(layer, allowed={"detection", "cost"}, required={"detection", "cost"}, where=where)
        detections.append(_number(layer["detection"], f"{where}.detection"))
        costs.append(_number(layer["cost"], f"{where}.cost"))

    presets = {name: dict(spec) for name, spec in BUILTIN_PRESETS.items()}
    if "presets" in doc:
        presets_doc = doc["presets"]
        if not isinstance(presets_doc, dict):
            raise InstanceFileError("'presets' must be an object")
        for name, spec in presets_doc.items():
            where = f"presets.{name}"
            if not isinstance(spec, dict):
                raise InstanceFileError(f"{where}: expected an object")
            _require_keys(
                spec,
                allowed={"weight", "attack_prob"},
                required={"weight", "attack_prob"},
                where=where,
            )
            presets[name] = {
                "weight": _number(spec["weight"], f"{where}.weight"),
                "attack_prob": _number(spec["attack_prob"], f"{where}.attack_prob"),
            }

    devices_doc = doc["devices"]
    if not isinstance(devices_doc, list):
        raise InstanceFileError("'devices' must be a list")
    devices = tuple(
        _parse_device(entry, idx, presets) for idx, entry in enumerate(devices_doc)
    )

    alpha = _integer(doc["alpha"], "alpha")
    budgets: list[float] | None
    if "budget" in doc:
        budget = _number(doc["budget"], "budget")
        budgets = None
    else:
        budgets_doc = doc["budgets"]
        if not isinstance(budgets_doc, list) or not budgets_doc:
            raise InstanceFileError("'budgets' must be a non-empty list")
        budgets = [
            _number(b, f"budgets[{i}]") for i, b in enumerate(budgets_doc)
        ]
        budget = budgets[0]

    instance = Instance(
        schedule=LayerSchedule.from_lists(detections, costs),
        devices=devices,
        alpha=alpha,
        budget=budget,
    )
    return validate_instance(instance), budgets


def load_instance_file(path: str) -> tuple[Instance, list[float] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance_document(fh.read())


def serialize_instance(instance: Instance) -> str:
    """Render an instance back to instance-file JSON.

    Devices are written with explicit weights, so parsing the output
    reproduces the instance exactly.
    """
    doc: dict[str, Any] = {
        "layers": [
            {"detection": layer.detection, "cost": layer.cost}
            for layer in instance.schedule.layers
        ],
        "alpha": instance.alpha,
        "budget": instance.budget,
        "devices": [],
    }
    for device in instance.devices:
        entry: dict[str, Any] = {
            "id": device.id,
            "weight": device.weight,
            "attack_prob": device.attack_prob,
        }
        if device.name:
            entry["name"] = device.name
        if device.critical:
            entry["critical"] = True
        if device.max_layer is not None:
            entry["max_layer"] = device.max_layer
        doc["devices"].append(entry)
    return json.dumps(doc, indent=2) + "\n"
