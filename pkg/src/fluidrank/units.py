"""Physical units, measured valve constants, and valve parameter records.

Conventions used everywhere in this package:

* pressures are gauge kilopascals (atmosphere = 0 kPa, vacuum not modeled),
* gas flow is standard liters per minute (slm),
* volumes are milliliters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

# Measured characterization values for the soft valve population (means and
# spread across the five characterized valves).
SNAP_UP_KPA = 11.44
SNAP_UP_STD_KPA = 2.29
OPEN_FLOW_SLM = 2.76
OPEN_FLOW_STD_SLM = 0.28
CONTROL_VOLUME_ML = 8.58
SNAP_FILL_VOLUME_ML = 1.75

# Release threshold as a fraction of the snap-through threshold. The release
# side of the hysteresis band was not characterized; a Schmitt-style band is
# required for stable oscillation, so this stays configurable.
SNAP_DOWN_RATIO = 0.6

# Operating points of the logic stage and the displays.
LOGIC_SUPPLY_KPA = 20.68
DISPLAY_LIMIT_KPA = 34.47
POUCH_VOLUME_ML = 1.25


def slm_to_ml_per_s(flow_slm: float) -> float:
    """Convert standard liters per minute to milliliters per second."""
    if flow_slm < 0:
        raise ValueError(f"flow must be non-negative, got {flow_slm}")
    return flow_slm * 1000.0 / 60.0


def ml_per_s_to_slm(flow_ml_s: float) -> float:
    """Convert milliliters per second back to standard liters per minute."""
    if flow_ml_s < 0:
        raise ValueError(f"flow must be non-negative, got {flow_ml_s}")
    return flow_ml_s * 60.0 / 1000.0


@dataclass(frozen=True)
class ValveParams:
    """Physical parameters of one soft valve.

    snap_up_kpa / snap_down_kpa bound the hysteresis band of the membrane;
    open_flow_slm is the flow through the open channel after snap-through;
    control_volume_ml is the upper chamber volume at rest and
    snap_fill_volume_ml the air required to move it from atmospheric to
    snap-through. bistable=False models the modified membrane that reverts
    when its control chamber is depressurized.
    """

    snap_up_kpa: float = SNAP_UP_KPA
    snap_down_kpa: float = SNAP_DOWN_RATIO * SNAP_UP_KPA
    open_flow_slm: float = OPEN_FLOW_SLM
    control_volume_ml: float = CONTROL_VOLUME_ML
    snap_fill_volume_ml: float = SNAP_FILL_VOLUME_ML
    bistable: bool = False

    def problems(self) -> list[str]:
        """Return human-readable invariant violations (empty when valid)."""
        out = []
        if not (0 < self.snap_down_kpa <= self.snap_up_kpa):
            out.append(
                f"require 0 < snap_down ({self.snap_down_kpa}) <= snap_up ({self.snap_up_kpa})"
            )
        if self.open_flow_slm <= 0:
            out.append(f"open_flow must be positive, got {self.open_flow_slm}")
        if self.control_volume_ml <= 0:
            out.append(f"control_volume must be positive, got {self.control_volume_ml}")
        if self.snap_fill_volume_ml <= 0:
            out.append(f"snap_fill_volume must be positive, got {self.snap_fill_volume_ml}")
        return out

    @property
    def control_compliance_ml_per_kpa(self) -> float:
        """Air volume absorbed by the control chamber per unit pressure rise.

        Calibrated so delivering snap_fill_volume raises the chamber from
        atmospheric exactly to the snap-through threshold.
        """
        return self.snap_fill_volume_ml / self.snap_up_kpa

    def with_snap_down_ratio(self, ratio: float) -> "ValveParams":
        return replace(self, snap_down_kpa=ratio * self.snap_up_kpa)


def default_valve_params(snap_down_ratio: float = SNAP_DOWN_RATIO) -> ValveParams:
    """Valve parameters at the characterized population means."""
    return ValveParams(
        snap_up_kpa=SNAP_UP_KPA,
        snap_down_kpa=snap_down_ratio * SNAP_UP_KPA,
        open_flow_slm=OPEN_FLOW_SLM,
        control_volume_ml=CONTROL_VOLUME_ML,
        snap_fill_volume_ml=SNAP_FILL_VOLUME_ML,
        bistable=False,
    )


# Linear pressurization constant for passive volumes (chambers, pouches,
# sensor dead volume): milliliters of delivered air per milliliter of element
# volume per kPa of pressure rise, calibrated on the valve chamber datapoint
# (8.58 mL chamber absorbs 1.75 mL reaching 11.44 kPa).
COMPLIANCE_PER_ML = SNAP_FILL_VOLUME_ML / (CONTROL_VOLUME_ML * SNAP_UP_KPA)
