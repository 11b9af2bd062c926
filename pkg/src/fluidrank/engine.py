"""Fixed-timestep simulation of pneumatic netlists and behavioral block maps.

Two fidelity tiers live here. `simulate` is the explicit-Euler network
simulator used for timing verification and logic soundness checks. The
behavioral maps (`oscillator_frequency`, `cascade_delay`) are closed-form
models of the output-logic blocks; they are what the signal renderer and the
study harness call in their inner loops.

Network model
-------------
Every channel (a valve's main path, its vent path, or an edge) carries flow
from its higher-pressure endpoint to its lower one. Channels are linear
conductances rated at the characterization point: a channel carries exactly
its rated open flow at a 20.68 kPa differential, proportionally less or
more at other differentials, first-order lagged from the moment the channel
opens, and divided by the loss multiplier. Chambers, probes, and valve
control chambers integrate delivered air through a linear compliance;
per-step transfers are capped at equalization so pressures never overshoot
their drivers.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidNetlist, InvalidSchedule, NonConvergence
from .netlist import (
    ATMOSPHERE,
    BLOCK_WHEN_SNAPPED,
    CHAMBER,
    PASS_WHEN_SNAPPED,
    PROBE,
    SOURCE,
    Edge,
    Netlist,
    Node,
    Valve,
    validate_netlist,
)
from .units import (
    COMPLIANCE_PER_ML,
    LOGIC_SUPPLY_KPA,
    OPEN_FLOW_SLM,
    ValveParams,
    default_valve_params,
    slm_to_ml_per_s,
)

# Sensor dead volume attributed to probe/junction nodes (mL).
PROBE_VOLUME_ML = 0.2

# Characteristic flow assigned to edges; tubing in the rig is matched to the
# valve channel, so both conductance classes share the rated flow for now.
EDGE_FLOW_SLM = OPEN_FLOW_SLM

# Driving differential at which a channel carries its rated flow.
REFERENCE_DIFFERENTIAL_KPA = LOGIC_SUPPLY_KPA

# Fault threshold: no healthy circuit in this system exceeds this pressure.
RUNAWAY_PRESSURE_KPA = 200.0

# Probe threshold separating logic-high from logic-low at steady state:
# above oscillation amplitude extremes, below the 20.68 kPa code-logic supply
# with at least 2x margin each way.
LOGIC_THRESHOLD_KPA = 10.0


@dataclass(frozen=True)
class SimConfig:
    """Numerical configuration for one simulation run.

    The default rise-time constant of 0.232 s makes the 10-90% rise of a
    lagged channel equal the measured 0.51 s. loss_multiplier >= 1 absorbs
    unmodeled plumbing losses by dividing every channel's flow.
    """

    duration: float
    dt: float = 1e-3
    rise_time_constant: float = 0.232
    loss_multiplier: float = 1.0

    def __post_init__(self):
        if not (0 < self.dt <= 0.01):
            raise ValueError(f"dt must be in (0, 0.01], got {self.dt}")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.rise_time_constant <= 0:
            raise ValueError(f"rise_time_constant must be positive, got {self.rise_time_constant}")
        if self.loss_multiplier < 1:
            raise ValueError(f"loss_multiplier must be >= 1, got {self.loss_multiplier}")


@dataclass(frozen=True)
class SourceEvent:
    node_id: str
    time_s: float
    pressure_kpa: float


@dataclass
class SourceSchedule:
    """Step events applied to source nodes; a source holds its last value.

    Sources never mentioned in the schedule are held at 0 kPa. A mentioned
    source must have its earliest event at t <= 0, otherwise the window
    before the first event would be uncovered.
    """

    events: list[SourceEvent] = field(default_factory=list)

    def set(self, node_id: str, time_s: float, pressure_kpa: float) -> "SourceSchedule":
        self.events.append(SourceEvent(node_id, time_s, pressure_kpa))
        return self

    def validate_against(self, netlist: Netlist) -> None:
        sources = {n.id for n in netlist.nodes if n.kind == SOURCE}
        earliest: dict[str, float] = {}
        for ev in self.events:
            if ev.node_id not in sources:
                raise InvalidSchedule(f"schedule targets {ev.node_id!r}, which is not a source node")
            if ev.pressure_kpa < 0:
                raise InvalidSchedule(f"negative pressure {ev.pressure_kpa} for source {ev.node_id!r}")
            earliest[ev.node_id] = min(earliest.get(ev.node_id, math.inf), ev.time_s)
        for node_id, t0 in earliest.items():
            if t0 > 0:
                raise InvalidSchedule(
                    f"source {node_id!r} has no pressure before t={t0}; schedule must cover the run from t=0"
                )

    def to_dicts(self) -> list[dict]:
        return [
            {"node_id": ev.node_id, "time_s": ev.time_s, "pressure_kPa": ev.pressure_kpa}
            for ev in self.events
        ]

    @classmethod
    def from_dicts(cls, rows: list[dict]) -> "SourceSchedule":
        return cls([SourceEvent(r["node_id"], r["time_s"], r["pressure_kPa"]) for r in rows])


@dataclass(frozen=True)
class Trace:
    """Time series produced by one simulation run.

    pressures carries every probe and chamber node; valve_states is the
    snapped flag per valve; valve flows (slm, through the main channel) are
    recorded for flow-meter style checks. CSV export follows the documented
    column contract: time, probes sorted by id, then valve states sorted.
    """

    times: np.ndarray
    pressures: dict[str, np.ndarray]
    valve_states: dict[str, np.ndarray]
    valve_flows_slm: dict[str, np.ndarray]
    probe_ids: tuple[str, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        probe_cols = list(self.probe_ids)
        valve_cols = sorted(self.valve_states)
        header = ["time_s"] + [f"{p}_kPa" for p in probe_cols] + [f"{v}_state" for v in valve_cols]
        buf.write(",".join(header) + "\n")
        for k, t in enumerate(self.times):
            row = [f"{t:.6f}"]
            row += [f"{self.pressures[p][k]:.6f}" for p in probe_cols]
            row += [str(int(self.valve_states[v][k])) for v in valve_cols]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def save_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())

    def final_pressure(self, node_id: str) -> float:
        return float(self.pressures[node_id][-1])


class _ChannelKind:
    VALVE = 0
    VENT = 1
    EDGE = 2


def simulate(netlist: Netlist, schedule: SourceSchedule, cfg: SimConfig) -> Trace:
    """Run the explicit-Euler network simulation.

    Raises InvalidNetlist when the netlist fails validation, InvalidSchedule
    for uncovered or misdirected schedules, and NonConvergence when any
    pressure exceeds the runaway threshold. Bit-exact reproducible for
    identical inputs.
    """
    violations = validate_netlist(netlist)
    if violations:
        raise InvalidNetlist(violations)
    schedule.validate_against(netlist)

    node_index = {n.id: i for i, n in enumerate(netlist.nodes)}
    n_nodes = len(netlist.nodes)

    fixed = np.zeros(n_nodes, dtype=bool)
    pressure = np.zeros(n_nodes)
    compliance = np.zeros(n_nodes)
    for i, node in enumerate(netlist.nodes):
        if node.kind in (SOURCE, ATMOSPHERE):
            fixed[i] = True
        elif node.kind == CHAMBER:
            compliance[i] = COMPLIANCE_PER_ML * node.volume_ml
        elif node.kind == PROBE:
            compliance[i] = COMPLIANCE_PER_ML * PROBE_VOLUME_ML

    # Valve control chambers load whatever node they hang on.
    for v in netlist.valves:
        ci = node_index[v.control_node]
        if not fixed[ci]:
            compliance[ci] += v.params.control_compliance_ml_per_kpa

    inv_compliance = np.where(fixed, 0.0, np.divide(1.0, compliance, out=np.zeros(n_nodes), where=compliance > 0))

    # Channel tables: valve main channels, valve vents, then edges.
    atmosphere_idx = next(i for i, n in enumerate(netlist.nodes) if n.kind == ATMOSPHERE)
    ch_a, ch_b, ch_flow, ch_kind, ch_owner = [], [], [], [], []
    for vi, v in enumerate(netlist.valves):
        ch_a.append(node_index[v.inlet_node])
        ch_b.append(node_index[v.outlet_node])
        ch_flow.append(slm_to_ml_per_s(v.params.open_flow_slm))
        ch_kind.append(_ChannelKind.VALVE)
        ch_owner.append(vi)
    for vi, v in enumerate(netlist.valves):
        if v.vent_when_closed:
            ch_a.append(node_index[v.outlet_node])
            ch_b.append(atmosphere_idx)
            ch_flow.append(slm_to_ml_per_s(v.params.open_flow_slm))
            ch_kind.append(_ChannelKind.VENT)
            ch_owner.append(vi)
    for e in netlist.edges:
        ch_a.append(node_index[e.from_node])
        ch_b.append(node_index[e.to_node])
        ch_flow.append(slm_to_ml_per_s(EDGE_FLOW_SLM))
        ch_kind.append(_ChannelKind.EDGE)
        ch_owner.append(-1)

    ch_a = np.array(ch_a, dtype=np.int64)
    ch_b = np.array(ch_b, dtype=np.int64)
    ch_flow = np.array(ch_flow) / cfg.loss_multiplier
    ch_kind = np.array(ch_kind, dtype=np.int64)
    ch_owner = np.array(ch_owner, dtype=np.int64)
    n_channels = len(ch_a)
    lag = np.zeros(n_channels)

    v_control = np.array([node_index[v.control_node] for v in netlist.valves], dtype=np.int64)
    v_snap_up = np.array([v.params.snap_up_kpa for v in netlist.valves])
    v_snap_down = np.array([v.params.snap_down_kpa for v in netlist.valves])
    v_bistable = np.array([v.params.bistable for v in netlist.valves], dtype=bool)
    v_pass = np.array([v.polarity == PASS_WHEN_SNAPPED for v in netlist.valves], dtype=bool)
    snapped = np.zeros(len(netlist.valves), dtype=bool)
    is_valve_ch = ch_kind == _ChannelKind.VALVE
    valve_ch_index = np.flatnonzero(is_valve_ch)

    events = sorted(schedule.events, key=lambda ev: (ev.time_s, ev.node_id))
    ev_ptr = 0

    steps = int(round(cfg.duration / cfg.dt))
    times = np.arange(steps + 1) * cfg.dt
    recorded_nodes = [n.id for n in netlist.nodes if n.kind in (PROBE, CHAMBER)]
    rec_idx = np.array([node_index[nid] for nid in recorded_nodes], dtype=np.int64)
    press_out = np.zeros((steps + 1, len(recorded_nodes)))
    state_out = np.zeros((steps + 1, len(netlist.valves)), dtype=bool)
    flow_out = np.zeros((steps + 1, len(netlist.valves)))

    dt = cfg.dt
    lag_gain = dt / cfg.rise_time_constant
    valve_ids = [v.id for v in netlist.valves]

    def apply_events(upto: float) -> None:
        nonlocal ev_ptr
        while ev_ptr < len(events) and events[ev_ptr].time_s <= upto + 1e-12:
            pressure[node_index[events[ev_ptr].node_id]] = events[ev_ptr].pressure_kpa
            ev_ptr += 1

    # Row 0 is the initial state at t=0, before any transfer.
    apply_events(0.0)
    press_out[0] = pressure[rec_idx]
    state_out[0] = snapped

    for k in range(1, steps + 1):
        # Sources hold the value they had at the start of the step interval.
        apply_events(times[k - 1])

        # Channel openness from current valve states.
        ch_open = np.ones(n_channels, dtype=bool)
        if len(netlist.valves):
            main_open = np.where(v_pass, snapped, ~snapped)
            ch_open[is_valve_ch] = main_open[ch_owner[is_valve_ch]]
            vent_mask = ch_kind == _ChannelKind.VENT
            ch_open[vent_mask] = ~main_open[ch_owner[vent_mask]]

        # First-order lag toward the open/closed target. A pinched channel
        # carries no flow regardless of lag state; the lag models how the
        # supply line re-establishes flow after the channel opens.
        lag = lag + lag_gain * (np.where(ch_open, 1.0, 0.0) - lag)

        pa = pressure[ch_a]
        pb = pressure[ch_b]
        dp = pa - pb
        mag = np.abs(dp)
        hi = np.where(dp >= 0, ch_a, ch_b)
        lo = np.where(dp >= 0, ch_b, ch_a)

        factor = mag / REFERENCE_DIFFERENTIAL_KPA
        desired = ch_flow * lag * factor * dt * ch_open  # mL this step
        # Equalization cap: a transfer may not push the pair past balance.
        inv_hi = inv_compliance[hi]
        inv_lo = inv_compliance[lo]
        denom = inv_hi + inv_lo
        with np.errstate(divide="ignore", invalid="ignore"):
            dv_eq = np.where(denom > 0, mag / np.where(denom > 0, denom, 1.0), np.inf)
        dv = np.minimum(desired, dv_eq)
        dv[mag <= 0] = 0.0

        # Collective caps: total inflow may not push a node past its best
        # upstream pressure; total outflow may not pull it below its best sink.
        inflow = np.zeros(n_nodes)
        outflow = np.zeros(n_nodes)
        np.add.at(inflow, lo, dv)
        np.add.at(outflow, hi, dv)
        up_best = np.zeros(n_nodes)
        np.maximum.at(up_best, lo, pressure[hi])
        down_best = np.full(n_nodes, np.inf)
        np.minimum.at(down_best, hi, pressure[lo])

        with np.errstate(divide="ignore", invalid="ignore"):
            cap_in = np.maximum(up_best - pressure, 0.0) * compliance
            scale_in = np.where((inflow > 0) & ~fixed, np.minimum(1.0, cap_in / np.where(inflow > 0, inflow, 1.0)), 1.0)
            cap_out = np.maximum(pressure - np.where(np.isfinite(down_best), down_best, 0.0), 0.0) * compliance
            scale_out = np.where((outflow > 0) & ~fixed, np.minimum(1.0, cap_out / np.where(outflow > 0, outflow, 1.0)), 1.0)

        dv = dv * scale_in[lo] * scale_out[hi]

        delta = np.zeros(n_nodes)
        np.add.at(delta, lo, dv)
        np.subtract.at(delta, hi, dv)
        pressure = pressure + delta * inv_compliance
        np.maximum(pressure, 0.0, out=pressure)

        # Valve state machine on post-transfer control pressures.
        if len(netlist.valves):
            ctrl = pressure[v_control]
            snap = (~snapped) & (ctrl >= v_snap_up)
            revert = snapped & (~v_bistable) & (ctrl < v_snap_down)
            snapped = (snapped | snap) & ~revert

        press_out[k] = pressure[rec_idx]
        state_out[k] = snapped
        flow_out[k] = dv[valve_ch_index] / dt * (60.0 / 1000.0)  # back to slm

        peak = pressure.max() if n_nodes else 0.0
        if peak > RUNAWAY_PRESSURE_KPA:
            worst = netlist.nodes[int(pressure.argmax())].id
            raise NonConvergence(
                f"pressure at node {worst!r} reached {peak:.1f} kPa at t={times[k]:.3f}s"
            )

    probe_ids = tuple(sorted(n.id for n in netlist.nodes if n.kind == PROBE))
    pressures = {nid: press_out[:, j].copy() for j, nid in enumerate(recorded_nodes)}
    states = {vid: state_out[:, j].copy() for j, vid in enumerate(valve_ids)}
    flows = {vid: flow_out[:, j].copy() for j, vid in enumerate(valve_ids)}
    return Trace(times=times, pressures=pressures, valve_states=states, valve_flows_slm=flows, probe_ids=probe_ids)


def cascade_delay(
    stage_count: int,
    valve: ValveParams | None = None,
    pouch_volume_ml: float = 1.25,
    loss_multiplier: float = 1.0,
) -> list[float]:
    """Cumulative onset time of each stage in a cascaded-inflation chain.

    Each stage must fill the next valve's snap volume plus its display pouch
    at the channel's delivered flow, so the per-stage delay is
    (snap_fill + pouch) / (open_flow / loss_multiplier).
    """
    if stage_count < 1:
        raise ValueError(f"stage_count must be >= 1, got {stage_count}")
    if pouch_volume_ml <= 0:
        raise ValueError(f"pouch_volume_ml must be positive, got {pouch_volume_ml}")
    if loss_multiplier < 1:
        raise ValueError(f"loss_multiplier must be >= 1, got {loss_multiplier}")
    v = valve or default_valve_params()
    flow_ml_s = slm_to_ml_per_s(v.open_flow_slm) / loss_multiplier
    per_stage = (v.snap_fill_volume_ml + pouch_volume_ml) / flow_ml_s
    return [per_stage * (k + 1) for k in range(stage_count)]


@dataclass(frozen=True)
class OscillatorSpec:
    """Measured operating envelope of the soft oscillator block."""

    onset_pressure_kpa: float = 22.41
    max_pressure_kpa: float = 75.84
    onset_freq_hz: float = 1.8
    max_freq_hz: float = 7.41
    amplitude_low_kpa: float = 3.48
    amplitude_high_kpa: float = 13.79

    def __post_init__(self):
        if not self.onset_pressure_kpa < self.max_pressure_kpa:
            raise ValueError("onset pressure must be below max pressure")
        if not self.onset_freq_hz < self.max_freq_hz:
            raise ValueError("onset frequency must be below max frequency")
        if not self.amplitude_low_kpa < self.amplitude_high_kpa:
            raise ValueError("amplitude_low must be below amplitude_high")


def oscillator_frequency(supply_kpa: float, spec: OscillatorSpec | None = None) -> float | None:
    """Oscillation frequency at a supply pressure, or None when quiescent.

    Linear between the two measured endpoints; the block does not oscillate
    below onset or above the maximum stable pressure.
    """
    if supply_kpa < 0:
        raise ValueError(f"supply must be non-negative, got {supply_kpa}")
    s = spec or OscillatorSpec()
    if supply_kpa < s.onset_pressure_kpa or supply_kpa > s.max_pressure_kpa:
        return None
    span = s.max_pressure_kpa - s.onset_pressure_kpa
    frac = (supply_kpa - s.onset_pressure_kpa) / span
    return s.onset_freq_hz + frac * (s.max_freq_hz - s.onset_freq_hz)


RING_STAGE_VOLUME_ML = 8.0
RING_SUPPLY_ID = "supply"
RING_PROBE_ID = "ring_probe"


def build_ring_oscillator(
    valve: ValveParams | None = None,
    stages: int = 3,
    stage_volume_ml: float = RING_STAGE_VOLUME_ML,
) -> Netlist:
    """Netlist of valve pairs in an inverting feedback ring.

    Each stage chamber is charged from the supply through a pair of valves:
    a self-cutoff valve that blocks once the stage itself snaps (clamping
    the stage peak just above snap-through, independent of supply), and the
    ring valve, controlled by the previous stage, which blocks and vents the
    stage while its controller is high. An odd number of inverting stages
    has no rest state, so the probe pressure is sustained-periodic. Because
    the discharge leg runs between the fixed snap thresholds while the
    charge leg speeds up with supply differential, the emergent frequency
    increases with supply pressure.
    """
    if stages < 1 or stages % 2 == 0:
        raise ValueError(f"stages must be odd and >= 1, got {stages}")
    v = valve or default_valve_params()
    nodes = [
        Node(RING_SUPPLY_ID, SOURCE, pressure_kpa=0.0),
        Node("atm", ATMOSPHERE),
        Node(RING_PROBE_ID, PROBE),
    ]
    valves = []
    for i in range(stages):
        nodes.append(Node(f"stage{i}", CHAMBER, volume_ml=stage_volume_ml))
        nodes.append(Node(f"junction{i}", PROBE))
    for i in range(stages):
        prev = (i - 1) % stages
        valves.append(
            Valve(
                id=f"cutoff{i}",
                params=v,
                control_node=f"stage{i}",
                inlet_node=RING_SUPPLY_ID,
                outlet_node=f"junction{i}",
                polarity=BLOCK_WHEN_SNAPPED,
                vent_when_closed=False,
            )
        )
        valves.append(
            Valve(
                id=f"ring{i}",
                params=v,
                control_node=f"stage{prev}",
                inlet_node=f"junction{i}",
                outlet_node=f"stage{i}",
                polarity=BLOCK_WHEN_SNAPPED,
                vent_when_closed=True,
            )
        )
    edges = [Edge("probe_tap", "stage0", RING_PROBE_ID)]
    return Netlist(nodes=nodes, valves=valves, edges=edges)


def ring_schedule(supply_kpa: float) -> SourceSchedule:
    return SourceSchedule().set(RING_SUPPLY_ID, 0.0, supply_kpa)


def oscillation_periods(times: np.ndarray, series: np.ndarray, level: float) -> list[float]:
    """Durations between successive upward crossings of `level`."""
    above = series >= level
    rising = np.flatnonzero(~above[:-1] & above[1:]) + 1
    crossing_times = times[rising]
    return list(np.diff(crossing_times))
