"""Monte Carlo check of the objective's probabilistic meaning.

Each trial attacks device i with probability ``attack_prob`` and, when
attacked, detects the attack with probability equal to the detection rate of
the device's assigned layer; the trial score is the summed weight of devices
with detected attacks. The expected score equals the allocation objective.

Randomness comes from numpy's PCG64 generator seeded directly with the given
seed; draws depend only on (seed, trials, device count), never on the
allocation, so two allocations simulated with the same seed share one random
stream (common random numbers). Per 65536-trial chunk the attack uniforms are
drawn before the detection uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Allocation, Instance
from .sweep import UnknownDevice

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    mean_detected_weight: float
    sample_std_error: float
    seed: int


def estimate_detection(
    allocation: Allocation, instance: Instance, trials: int, seed: int
) -> SimulationResult:
    """Estimate the expected total weight of detected attacks.

    Deterministic for a fixed (allocation, instance, trials, seed); the
    standard error is the sample standard deviation over trials divided by
    sqrt(trials), and 0.0 for a single trial.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ids = {d.id for d in instance.devices}
    extra = set(allocation.assignment) - ids
    missing = ids - set(allocation.assignment)
    if extra or missing:
        raise UnknownDevice(
            f"allocation does not match instance devices "
            f"(unknown: {sorted(extra)}, missing: {sorted(missing)})"
        )
    for device in instance.devices:
        layer = allocation.assignment[device.id]
        if not 1 <= layer <= instance.num_layers:
            raise ValueError(f"device {device.id}: layer {layer} outside the schedule")

    probs = np.array([d.attack_prob for d in instance.devices], dtype=np.float64)
    weights = np.array([d.weight for d in instance.devices], dtype=np.float64)
    rates = np.array(
        [
            instance.schedule.detection(allocation.assignment[d.id])
            for d in instance.devices
        ],
        dtype=np.float64,
    )

    rng = np.random.Generator(np.random.PCG64(seed))
    score_sum = 0.0
    score_sq_sum = 0.0
    remaining = trials
    while remaining > 0:
        block = min(remaining, _CHUNK)
        u_attack = rng.random((block, probs.size))
        u_detect = rng.random((block, probs.size))
        detected = (u_attack < probs) & (u_detect < rates)
        scores = (detected * weights).sum(axis=1)
        score_sum += float(scores.sum())
        score_sq_sum += float((scores * scores).sum())
        remaining -= block

    mean = score_sum / trials
    if trials == 1:
        std_error = 0.0
    else:
        variance = max(0.0, (score_sq_sum - trials * mean * mean) / (trials - 1))
        std_error = math.sqrt(variance / trials)
    return SimulationResult(
        trials=trials, mean_detected_weight=mean, sample_std_error=std_error, seed=seed
    )
