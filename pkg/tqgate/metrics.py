import math
from dataclasses import dataclass

from .custom_exceptions import NumericalFailure


def clamp_unit(raw, name):
    """Clip a formula value into [0, 1].

    Returns
    -------
    value : float
    flag : str or None
        ``"<name>_clamped"`` when the raw value fell outside [0, 1].
    """
    raw = float(raw)
    if math.isnan(raw):
        raise NumericalFailure("formula produced NaN", path=name)
    if raw < 0.0:
        return 0.0, f"{name}_clamped"
    if raw > 1.0:
        return 1.0, f"{name}_clamped"
    return raw, None


def merge_flags(*groups):
    """Concatenate flag groups, dropping `None` and duplicates in order."""
    merged = []
    for group in groups:
        if group is None:
            continue
        if isinstance(group, str):
            group = (group,)
        for flag in group:
            if flag is not None and flag not in merged:
                merged.append(flag)
    return tuple(merged)


@dataclass(frozen=True)
class GateMetrics:
    """Outcome of evaluating one scheme at one parameter point.

    `raw_fidelity` and `raw_efficiency` keep the unclipped formula values
    so that plots can show where a perturbative expression broke down.
    """

    fidelity: float
    efficiency: float
    gate_time: float
    flags: tuple = ()
    raw_fidelity: float = None
    raw_efficiency: float = None

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0:
            raise NumericalFailure(f"fidelity {self.fidelity} outside [0, 1]")
        if not 0.0 <= self.efficiency <= 1.0:
            raise NumericalFailure(f"efficiency {self.efficiency} outside [0, 1]")
        if not self.gate_time >= 0.0:
            raise NumericalFailure(f"negative gate time {self.gate_time}")

    @classmethod
    def from_raw(cls, fidelity, efficiency, gate_time, flags=()):
        """Clamp raw formula values and record any clipping in `flags`."""
        clamped_fidelity, fidelity_flag = clamp_unit(fidelity, "fidelity")
        clamped_efficiency, efficiency_flag = clamp_unit(efficiency, "efficiency")
        return cls(
            fidelity=clamped_fidelity,
            efficiency=clamped_efficiency,
            gate_time=float(gate_time),
            flags=merge_flags(flags, fidelity_flag, efficiency_flag),
            raw_fidelity=float(fidelity),
            raw_efficiency=float(efficiency),
        )
