"""Domain types for the monitoring-depth allocation problem.

A network instance pairs a schedule of monitoring layers (detection rate and
cost per layer) with a set of devices, a minimum layer for critical devices,
and a global resource budget. An allocation assigns exactly one layer to every
device.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping, Sequence


class InstanceValidationError(ValueError):
    """Base class for instance validation failures."""


class DuplicateDeviceId(InstanceValidationError):
    pass


class DetectionRatesNotIncreasing(InstanceValidationError):
    pass


class ProbabilityOutOfRange(InstanceValidationError):
    pass


class CriticalCapConflict(InstanceValidationError):
    pass


class EmptyDeviceList(InstanceValidationError):
    pass


class NegativeCostOrWeight(InstanceValidationError):
    pass


@dataclass(frozen=True)
class Layer:
    """One monitoring depth: fraction of attacks detected and resource cost."""

    detection: float
    cost: float


@dataclass(frozen=True)
class LayerSchedule:
    """Ordered monitoring layers, indexed 1..num_layers."""

    layers: tuple[Layer, ...]

    @classmethod
    def from_lists(cls, detections: Sequence[float], costs: Sequence[float]) -> "LayerSchedule":
        if len(detections) != len(costs):
            raise InstanceValidationError(
                f"{len(detections)} detection rates but {len(costs)} costs"
            )
        return cls(tuple(Layer(float(d), float(c)) for d, c in zip(detections, costs)))

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def detection(self, layer: int) -> float:
        return self.layers[layer - 1].detection

    def cost(self, layer: int) -> float:
        return self.layers[layer - 1].cost


@dataclass(frozen=True)
class Device:
    """A monitored device.

    ``max_layer`` is the deepest layer that can be enabled on the device;
    ``None`` means the schedule's deepest layer. Critical devices must be
    monitored at least up to the instance's ``alpha`` layer.
    """

    id: str
    weight: float
    attack_prob: float
    critical: bool = False
    max_layer: int | None = None
    name: str = ""


@dataclass(frozen=True)
class Instance:
    """A complete allocation problem: schedule, devices, alpha, budget."""

    schedule: LayerSchedule
    devices: tuple[Device, ...]
    alpha: int
    budget: float

    @property
    def num_layers(self) -> int:
        return self.schedule.num_layers

    def device_cap(self, device: Device) -> int:
        """Deepest admissible layer for ``device``."""
        return device.max_layer if device.max_layer is not None else self.num_layers

    def device_floor(self, device: Device) -> int:
        """Shallowest admissible layer for ``device``."""
        return self.alpha if device.critical else 1

    def with_budget(self, budget: float) -> "Instance":
        return replace(self, budget=budget)


@dataclass(frozen=True)
class Allocation:
    """One chosen layer per device, with its total cost and objective value.

    The objective is the sum of weight * attack_prob * detection over devices,
    accumulated in device input order; all solver engines report allocations
    built through :meth:`from_layers`, so equal assignments always carry
    bit-identical cost and objective values.
    """

    assignment: Mapping[str, int]
    total_cost: float
    objective: float

    @classmethod
    def from_layers(cls, instance: Instance, layers: Sequence[int]) -> "Allocation":
        """Build an allocation from a per-device layer vector in input order."""
        if len(layers) != len(instance.devices):
            raise ValueError(
                f"expected {len(instance.devices)} layers, got {len(layers)}"
            )
        assignment: dict[str, int] = {}
        total_cost = 0.0
        objective = 0.0
        for device, layer in zip(instance.devices, layers):
            assignment[device.id] = int(layer)
            # Fixed accumulation order and (w * p) * d association: every
            # engine must produce bit-identical numbers for equal assignments.
            total_cost = total_cost + instance.schedule.cost(layer)
            objective = objective + device_profit(device, instance.schedule, layer)
        return cls(
            assignment=MappingProxyType(assignment),
            total_cost=total_cost,
            objective=objective,
        )

    def layer_vector(self, instance: Instance) -> tuple[int, ...]:
        """Layers in device input order."""
        return tuple(self.assignment[d.id] for d in instance.devices)


def device_profit(device: Device, schedule: LayerSchedule, layer: int) -> float:
    """Objective contribution of monitoring ``device`` up to ``layer``."""
    return (device.weight * device.attack_prob) * schedule.detection(layer)


def validate_instance(instance: Instance) -> Instance:
    """Check every type invariant; return the instance unchanged if valid.

    Idempotent: validating an already validated instance is a no-op.
    """
    schedule = instance.schedule
    if schedule.num_layers < 1:
        raise InstanceValidationError("schedule must define at least one layer")
    for idx, layer in enumerate(schedule.layers, start=1):
        if not 0.0 < layer.detection <= 1.0:
            raise InstanceValidationError(
                f"layer {idx}: detection rate {layer.detection} outside (0, 1]"
            )
        if layer.cost < 0.0:
            raise NegativeCostOrWeight(f"layer {idx}: negative cost {layer.cost}")
    for idx in range(1, schedule.num_layers):
        if not schedule.layers[idx - 1].detection < schedule.layers[idx].detection:
            raise DetectionRatesNotIncreasing(
                f"detection rates must strictly increase: layer {idx} has "
                f"{schedule.layers[idx - 1].detection}, layer {idx + 1} has "
                f"{schedule.layers[idx].detection}"
            )

    if not instance.devices:
        raise EmptyDeviceList("instance has no devices")
    seen: set[str] = set()
    for device in instance.devices:
        if device.id in seen:
            raise DuplicateDeviceId(f"duplicate device id {device.id!r}")
        seen.add(device.id)
        if device.weight < 0.0:
            raise NegativeCostOrWeight(
                f"device {device.id}: negative weight {device.weight}"
            )
        if not 0.0 <= device.attack_prob <= 1.0:
            raise ProbabilityOutOfRange(
                f"device {device.id}: attack probability {device.attack_prob} "
                f"outside [0, 1]"
            )
        if device.max_layer is not None and not 1 <= device.max_layer <= schedule.num_layers:
            raise InstanceValidationError(
                f"device {device.id}: max_layer {device.max_layer} outside "
                f"[1, {schedule.num_layers}]"
            )

    if not 1 <= instance.alpha <= schedule.num_layers:
        raise InstanceValidationError(
            f"alpha {instance.alpha} outside [1, {schedule.num_layers}]"
        )
    if instance.budget < 0.0:
        raise InstanceValidationError(f"negative budget {instance.budget}")

    for device in instance.devices:
        if device.critical and instance.device_cap(device) < instance.alpha:
            raise CriticalCapConflict(
                f"critical device {device.id} has max_layer "
                f"{instance.device_cap(device)} below alpha {instance.alpha}"
            )
    return instance


def min_feasible_budget(instance: Instance) -> float:
    """Smallest budget for which any feasible allocation exists.

    Sums, per device, the cheapest cost among its admissible layers. When
    layer costs increase with depth this is the cost of putting critical
    devices at the alpha layer and everything else at layer 1.
    """
    total = 0.0
    for device in instance.devices:
        floor = instance.device_floor(device)
        cap = instance.device_cap(device)
        total += min(instance.schedule.cost(l) for l in range(floor, cap + 1))
    return total
