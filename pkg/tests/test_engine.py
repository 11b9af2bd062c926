import numpy as np
import pytest

from fluidrank.engine import (
    OscillatorSpec,
    SimConfig,
    SourceSchedule,
    build_ring_oscillator,
    cascade_delay,
    oscillation_periods,
    oscillator_frequency,
    ring_schedule,
    simulate,
)
from fluidrank.errors import InvalidNetlist, InvalidSchedule, NonConvergence
from fluidrank.netlist import (
    ATMOSPHERE,
    CHAMBER,
    PASS_WHEN_SNAPPED,
    PROBE,
    SOURCE,
    Edge,
    Netlist,
    Node,
    Valve,
)
from fluidrank.units import default_valve_params


def single_valve_rig(outlet_to_atmosphere=True):
    """Control source charges the valve's control chamber through a tube;
    a 20.68 kPa inlet feeds the channel, venting through a flow meter."""
    v = default_valve_params()
    nodes = [
        Node("ctrl_src", SOURCE, pressure_kpa=0.0),
        Node("inlet_src", SOURCE, pressure_kpa=20.68),
        Node("ctrl", PROBE),
        Node("atm", ATMOSPHERE),
    ]
    outlet = "atm" if outlet_to_atmosphere else "sink"
    if not outlet_to_atmosphere:
        nodes.append(Node("sink", CHAMBER, volume_ml=50.0))
    return Netlist(
        nodes=nodes,
        valves=[Valve("v1", v, "ctrl", "inlet_src", outlet, PASS_WHEN_SNAPPED)],
        edges=[Edge("e1", "ctrl_src", "ctrl")],
    )


def step_schedule(**kpa_by_source):
    sched = SourceSchedule()
    for node_id, kpa in kpa_by_source.items():
        sched.set(node_id, 0.0, kpa)
    return sched


class TestSingleValveTiming:
    def run_trace(self):
        net = single_valve_rig()
        sched = step_schedule(ctrl_src=20.68, inlet_src=20.68)
        return simulate(net, sched, SimConfig(duration=3.0))

    def test_valve_flips_when_control_crosses_snap_threshold(self):
        trace = self.run_trace()
        states = trace.valve_states["v1"]
        flips = np.flatnonzero(~states[:-1] & states[1:]) + 1
        assert len(flips) == 1
        k = int(flips[0])
        ctrl = trace.pressures["ctrl"]
        assert ctrl[k - 1] < 11.44 <= ctrl[k]

    def test_flow_reaches_90pct_within_rise_time(self):
        trace = self.run_trace()
        states = trace.valve_states["v1"]
        k_flip = int(np.flatnonzero(~states[:-1] & states[1:])[0]) + 1
        flow = trace.valve_flows_slm["v1"]
        k_90 = int(np.flatnonzero(flow >= 0.9 * 2.76)[0])
        delta = trace.times[k_90] - trace.times[k_flip]
        assert 0.51 * 0.9 <= delta <= 0.51 * 1.1
        assert flow[-1] == pytest.approx(2.76, rel=1e-4)


def test_dead_circuit_stays_at_zero():
    net = single_valve_rig()
    sched = step_schedule(ctrl_src=0.0, inlet_src=0.0)
    trace = simulate(net, sched, SimConfig(duration=1.0))
    for series in trace.pressures.values():
        assert np.all(series == 0.0)
    assert not trace.valve_states["v1"].any()


def test_determinism_bit_for_bit():
    net = single_valve_rig()
    sched = step_schedule(ctrl_src=20.68, inlet_src=20.68)
    a = simulate(net, sched, SimConfig(duration=1.5))
    b = simulate(net, sched, SimConfig(duration=1.5))
    for key in a.pressures:
        assert np.array_equal(a.pressures[key], b.pressures[key])
    for key in a.valve_flows_slm:
        assert np.array_equal(a.valve_flows_slm[key], b.valve_flows_slm[key])


def test_mass_flow_sanity_dead_end_chamber():
    """Delivered volume equals the trapezoidal integral of recorded flow."""
    net = single_valve_rig(outlet_to_atmosphere=False)
    sched = step_schedule(ctrl_src=20.68, inlet_src=20.68)
    trace = simulate(net, sched, SimConfig(duration=6.0, loss_multiplier=1.0))
    flow_ml_s = trace.valve_flows_slm["v1"] * 1000.0 / 60.0
    integral = np.trapezoid(flow_ml_s, trace.times)
    from fluidrank.units import COMPLIANCE_PER_ML

    delivered = trace.pressures["sink"][-1] * COMPLIANCE_PER_ML * 50.0
    assert integral == pytest.approx(delivered, rel=5e-3)


def test_hysteresis_band_dwell_never_switches():
    net = single_valve_rig()
    sched = SourceSchedule()
    sched.set("inlet_src", 0.0, 20.68)
    sched.set("ctrl_src", 0.0, 9.0)   # inside (6.864, 11.44)
    sched.set("ctrl_src", 2.0, 7.2)   # still inside
    sched.set("ctrl_src", 4.0, 10.9)  # still inside
    trace = simulate(net, sched, SimConfig(duration=6.0))
    assert not trace.valve_states["v1"].any()
    assert trace.pressures["ctrl"].max() < 11.44


def test_bistable_valve_latches():
    v = default_valve_params()
    from dataclasses import replace

    latching = replace(v, bistable=True)
    net = single_valve_rig()
    net.valves[0] = Valve("v1", latching, "ctrl", "inlet_src", "atm", PASS_WHEN_SNAPPED)
    sched = SourceSchedule()
    sched.set("inlet_src", 0.0, 20.68)
    sched.set("ctrl_src", 0.0, 20.68)
    sched.set("ctrl_src", 1.5, 0.0)  # depressurize the control line
    trace = simulate(net, sched, SimConfig(duration=4.0))
    states = trace.valve_states["v1"]
    assert states[-1]  # stays snapped
    # the monostable variant reverts under the same schedule
    net.valves[0] = Valve("v1", v, "ctrl", "inlet_src", "atm", PASS_WHEN_SNAPPED)
    trace2 = simulate(net, sched, SimConfig(duration=4.0))
    assert not trace2.valve_states["v1"][-1]


def test_invalid_netlist_rejected():
    net = single_valve_rig()
    net.nodes.append(Node("atm2", ATMOSPHERE))
    with pytest.raises(InvalidNetlist):
        simulate(net, step_schedule(ctrl_src=0.0, inlet_src=0.0), SimConfig(duration=0.5))


def test_schedule_validation():
    net = single_valve_rig()
    late = SourceSchedule().set("ctrl_src", 1.0, 20.68)
    with pytest.raises(InvalidSchedule):
        simulate(net, late, SimConfig(duration=2.0))
    wrong_node = SourceSchedule().set("ctrl", 0.0, 20.68)
    with pytest.raises(InvalidSchedule):
        simulate(net, wrong_node, SimConfig(duration=2.0))
    negative = SourceSchedule().set("ctrl_src", 0.0, -5.0)
    with pytest.raises(InvalidSchedule):
        simulate(net, negative, SimConfig(duration=2.0))


def test_runaway_pressure_raises():
    net = single_valve_rig(outlet_to_atmosphere=False)
    sched = step_schedule(ctrl_src=20.68, inlet_src=500.0)
    with pytest.raises(NonConvergence):
        simulate(net, sched, SimConfig(duration=10.0))


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(duration=1.0, dt=0.02)
    with pytest.raises(ValueError):
        SimConfig(duration=-1.0)
    with pytest.raises(ValueError):
        SimConfig(duration=1.0, loss_multiplier=0.5)


def test_trace_csv_format():
    net = single_valve_rig()
    sched = step_schedule(ctrl_src=20.68, inlet_src=20.68)
    trace = simulate(net, sched, SimConfig(duration=0.05))
    lines = trace.to_csv().strip().split("\n")
    assert lines[0] == "time_s,ctrl_kPa,v1_state"
    assert len(lines) == 52  # header + 51 samples
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert first[2] in ("0", "1")


class TestCascadeDelay:
    def test_ideal_single_stage(self):
        delays = cascade_delay(1)
        assert delays[0] == pytest.approx(0.065, abs=1e-3)

    def test_measured_loss_multiplier(self):
        delays = cascade_delay(1, loss_multiplier=3.85)
        assert delays[0] == pytest.approx(0.25, abs=5e-3)

    def test_three_stage_cumulative(self):
        delays = cascade_delay(3)
        assert delays == pytest.approx([0.065, 0.130, 0.196], abs=1e-3)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            cascade_delay(0)
        with pytest.raises(ValueError):
            cascade_delay(1, pouch_volume_ml=0.0)
        with pytest.raises(ValueError):
            cascade_delay(1, loss_multiplier=0.9)


class TestOscillatorMap:
    def test_measured_endpoints(self):
        assert oscillator_frequency(22.41) == pytest.approx(1.8, abs=1e-12)
        assert oscillator_frequency(75.84) == pytest.approx(7.41, abs=1e-12)

    def test_quiescent_outside_envelope(self):
        assert oscillator_frequency(10.0) is None
        assert oscillator_frequency(22.40) is None
        assert oscillator_frequency(75.85) is None

    def test_monotone_within_envelope(self):
        supplies = np.linspace(22.41, 75.84, 40)
        freqs = [oscillator_frequency(s) for s in supplies]
        assert all(b >= a for a, b in zip(freqs, freqs[1:]))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            OscillatorSpec(onset_pressure_kpa=80.0)
        with pytest.raises(ValueError):
            oscillator_frequency(-1.0)


@pytest.mark.slow
class TestRingOscillator:
    def periods_at(self, supply):
        net = build_ring_oscillator()
        trace = simulate(net, ring_schedule(supply), SimConfig(duration=5.0))
        return trace, oscillation_periods(trace.times, trace.pressures["stage0"], 9.0)

    def test_sustained_oscillation_at_30kpa(self):
        trace, periods = self.periods_at(30.0)
        assert len(periods) >= 3
        steady = np.array(periods[1:])
        assert steady.std() / steady.mean() < 0.05
        probe = trace.pressures["ring_probe"]
        assert probe.max() - probe.min() > 2.0

    def test_no_switching_below_snap_threshold(self):
        trace, periods = self.periods_at(5.0)
        assert periods == []
        for states in trace.valve_states.values():
            assert not states.any()

    def test_frequency_increases_with_supply(self):
        freqs = []
        for supply in (30.0, 45.0, 60.0):
            _, periods = self.periods_at(supply)
            steady = np.array(periods[1:])
            freqs.append(1.0 / steady.mean())
        assert freqs[0] < freqs[1] < freqs[2]


def test_ring_oscillator_requires_odd_stage_count():
    with pytest.raises(ValueError):
        build_ring_oscillator(stages=2)
