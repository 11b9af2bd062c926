"""Modalities, configurations, the discrete signal space, and timeline rendering.

A modality is one physical axis of haptic variation with an ordered list of
discrete levels. A configuration is an ordered selection of modalities; the
channel order encodes the axis assignment (channel k renders task axis k),
so enumerating ordered selections covers both assignments of every pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .engine import OscillatorSpec, cascade_delay
from .errors import InsufficientModalities
from .units import DISPLAY_LIMIT_KPA, LOGIC_SUPPLY_KPA, POUCH_VOLUME_ML, ValveParams, default_valve_params

PRESSURE = "pressure"
FREQUENCY = "frequency"
AREA = "area"
MODALITY_KINDS = (PRESSURE, FREQUENCY, AREA)

DEFAULT_PRESSURE_LEVELS_KPA = (6.89, 13.79, 20.68, 27.58)
DEFAULT_FREQUENCY_LEVELS_HZ = (4.0, 7.0)
DEFAULT_AREA_LEVELS_POUCHES = (1, 2, 3)

# Measured-vs-ideal cascade slowdown observed on the bench; rendering uses
# the measured timing by default so previews match hardware behavior.
MEASURED_LOSS_MULTIPLIER = 3.85


@dataclass(frozen=True)
class Modality:
    kind: str
    levels: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in MODALITY_KINDS:
            raise ValueError(f"unknown modality kind {self.kind!r}")
        if len(self.levels) < 2:
            raise ValueError(f"{self.kind}: at least 2 levels required")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"{self.kind}: levels must be strictly increasing, got {self.levels}")

    @property
    def level_count(self) -> int:
        return len(self.levels)


def default_modalities() -> list[Modality]:
    return [
        Modality(PRESSURE, DEFAULT_PRESSURE_LEVELS_KPA),
        Modality(FREQUENCY, DEFAULT_FREQUENCY_LEVELS_HZ),
        Modality(AREA, tuple(float(x) for x in DEFAULT_AREA_LEVELS_POUCHES)),
    ]


@dataclass(frozen=True)
class Configuration:
    """Ordered modality channels; channel k is assigned to task axis k."""

    id: str
    channels: tuple[Modality, ...]

    def __post_init__(self):
        if len(self.channels) < 1:
            raise ValueError("a configuration needs at least one channel")

    @property
    def dimensions(self) -> int:
        return len(self.channels)

    @property
    def space_size(self) -> int:
        out = 1
        for m in self.channels:
            out *= m.level_count
        return out


@dataclass(frozen=True)
class SignalPoint:
    """One renderable point of a configuration's signal space."""

    indices: tuple[int, ...]
    coords: tuple[float, ...]  # per-channel index/(L-1), exactly 0 and 1 at the ends


def make_point(config: Configuration, indices) -> SignalPoint:
    idx = tuple(int(i) for i in indices)
    if len(idx) != config.dimensions:
        raise ValueError(f"expected {config.dimensions} indices, got {len(idx)}")
    coords = []
    for i, m in zip(idx, config.channels):
        if not (0 <= i < m.level_count):
            raise ValueError(f"index {i} out of range for {m.kind} ({m.level_count} levels)")
        coords.append(i / (m.level_count - 1))
    return SignalPoint(indices=idx, coords=tuple(coords))


def signal_space(config: Configuration) -> list[SignalPoint]:
    """All signal points in lexicographic order of their level indices."""
    ranges = [range(m.level_count) for m in config.channels]
    return [make_point(config, idx) for idx in product(*ranges)]


def _config_id(mods) -> str:
    return "".join(m.kind[0].upper() for m in mods)


def enumerate_configurations(modalities: list[Modality], d: int) -> list[Configuration]:
    """Every ordered selection of d distinct modalities.

    Both orderings of each modality pair appear, so both assignments of the
    pair to task axes get ranked.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if d > len(modalities):
        raise InsufficientModalities(
            f"cannot build {d}-channel configurations from {len(modalities)} modalities"
        )
    return [Configuration(_config_id(sel), tuple(sel)) for sel in permutations(modalities, d)]


@dataclass(frozen=True)
class TimelineSeries:
    display_id: str
    times: np.ndarray
    kpa: np.ndarray


@dataclass
class Timeline:
    series: list[TimelineSeries] = field(default_factory=list)

    def to_csv(self) -> str:
        cols = sorted(self.series, key=lambda s: s.display_id)
        lines = ["time_s," + ",".join(f"{s.display_id}_kPa" for s in cols)]
        times = cols[0].times
        for k, t in enumerate(times):
            lines.append(f"{t:.6f}," + ",".join(f"{s.kpa[k]:.6f}" for s in cols))
        return "\n".join(lines) + "\n"

    def to_payload(self) -> dict:
        return {
            "series": [
                {
                    "display_id": s.display_id,
                    "times_s": [round(float(t), 6) for t in s.times],
                    "kpa": [round(float(p), 6) for p in s.kpa],
                }
                for s in self.series
            ]
        }


AREA_STEP_KPA = LOGIC_SUPPLY_KPA


def render_timeline(
    config: Configuration,
    point: SignalPoint,
    seconds_per_channel: float = 3.0,
    dt: float = 1e-3,
    osc_spec: OscillatorSpec | None = None,
    valve: ValveParams | None = None,
    loss_multiplier: float = MEASURED_LOSS_MULTIPLIER,
) -> Timeline:
    """Pressure-vs-time rendering of one signal point.

    Channel k occupies the window [k*T, (k+1)*T). Pressure channels hold a
    constant level; frequency channels render a square oscillation between
    the oscillator's measured amplitude bounds; area channels step each
    pouch on with cascaded onsets spaced by the per-stage inflation delay.
    """
    if seconds_per_channel <= 0:
        raise ValueError(f"seconds_per_channel must be positive, got {seconds_per_channel}")
    spec = osc_spec or OscillatorSpec()
    v = valve or default_valve_params()
    total = seconds_per_channel * config.dimensions
    n = int(round(total / dt))
    times = np.arange(n) * dt

    series: list[TimelineSeries] = []
    for k, (m, idx) in enumerate(zip(config.channels, point.indices)):
        w0, w1 = k * seconds_per_channel, (k + 1) * seconds_per_channel
        in_window = (times >= w0) & (times < w1)
        local = times - w0
        if m.kind == PRESSURE:
            kpa = np.where(in_window, m.levels[idx], 0.0)
            series.append(TimelineSeries(f"ch{k}_pressure", times, kpa))
        elif m.kind == FREQUENCY:
            hz = m.levels[idx]
            phase = np.floor(2.0 * hz * local).astype(int) % 2
            wave = np.where(phase == 0, spec.amplitude_high_kpa, spec.amplitude_low_kpa)
            kpa = np.where(in_window, wave, 0.0)
            series.append(TimelineSeries(f"ch{k}_frequency", times, kpa))
        elif m.kind == AREA:
            pouches = int(round(m.levels[idx]))
            stage = cascade_delay(1, v, POUCH_VOLUME_ML, loss_multiplier)[0]
            for p in range(pouches):
                onset = p * stage
                kpa = np.where(in_window & (local >= onset), AREA_STEP_KPA, 0.0)
                series.append(TimelineSeries(f"ch{k}_area_pouch{p + 1}", times, kpa))
            # Unused pouches of the 3-DoF display stay flat for completeness.
            max_pouches = int(round(m.levels[-1]))
            for p in range(pouches, max_pouches):
                series.append(TimelineSeries(f"ch{k}_area_pouch{p + 1}", times, np.zeros_like(times)))
        else:
            raise ValueError(f"unknown modality kind {m.kind!r}")

    for s in series:
        if s.kpa.max(initial=0.0) > DISPLAY_LIMIT_KPA:
            raise ValueError(f"{s.display_id} exceeds the {DISPLAY_LIMIT_KPA} kPa display limit")
    return Timeline(series=series)
