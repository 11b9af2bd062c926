"""Gate-level synthesis from truth tables and lowering to valve netlists.

Synthesis is sum-of-products with shared input inverters and shared minterm
AND trees; no further boolean minimization is applied, which keeps valve
counts predictable. Lowering maps NOT to a single normally-open valve that
vents its output once snapped, AND to two pass valves in series (both
venting when closed), and OR to two pass valves in parallel whose closed
channels provide the flow isolation between branches.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SupplyTooLow, UnsupportedWidth, WidthMismatch
from .netlist import (
    ATMOSPHERE,
    BLOCK_WHEN_SNAPPED,
    PASS_WHEN_SNAPPED,
    PROBE,
    SOURCE,
    Edge,
    Netlist,
    Node,
    Valve,
)
from .units import LOGIC_SUPPLY_KPA, ValveParams, default_valve_params, slm_to_ml_per_s
from .engine import SourceSchedule

MIN_INPUTS = 2
MAX_INPUTS = 4

NOT = "NOT"
AND = "AND"
OR = "OR"
GATE_KINDS = (NOT, AND, OR)


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    inputs: tuple[str, ...]  # references to ports or earlier gate ids


@dataclass
class GateCircuit:
    """Combinational circuit over named boolean ports, fan-in <= 2."""

    inputs: list[str]
    gates: list[Gate] = field(default_factory=list)
    outputs: list[tuple[str, str]] = field(default_factory=list)  # (name, ref)

    def gate_map(self) -> dict[str, Gate]:
        return {g.id: g for g in self.gates}

    def to_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "gates": [{"id": g.id, "kind": g.kind, "inputs": list(g.inputs)} for g in self.gates],
            "outputs": [{"name": name, "ref": ref} for name, ref in self.outputs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GateCircuit":
        return cls(
            inputs=list(data["inputs"]),
            gates=[Gate(g["id"], g["kind"], tuple(g["inputs"])) for g in data["gates"]],
            outputs=[(o["name"], o["ref"]) for o in data["outputs"]],
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GateCircuit":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TruthTable:
    """Complete mapping from every input code to an output bit-vector.

    outputs[code] is the bit-vector for the input code with that value,
    most-significant input first (code (1,0,1) on inputs A,B,C has value 5).
    """

    n_inputs: int
    outputs: list[list[int]]

    def __post_init__(self):
        if not (MIN_INPUTS <= self.n_inputs <= MAX_INPUTS):
            raise UnsupportedWidth(
                f"truth tables support {MIN_INPUTS}-{MAX_INPUTS} inputs, got {self.n_inputs}"
            )
        if len(self.outputs) != 2**self.n_inputs:
            raise ValueError(
                f"expected {2 ** self.n_inputs} rows for {self.n_inputs} inputs, got {len(self.outputs)}"
            )
        widths = {len(row) for row in self.outputs}
        if len(widths) != 1:
            raise ValueError("all output rows must share one width")

    @property
    def n_outputs(self) -> int:
        return len(self.outputs[0])

    def to_dict(self) -> dict:
        return {"n_inputs": self.n_inputs, "outputs": [list(r) for r in self.outputs]}

    @classmethod
    def from_dict(cls, data: dict) -> "TruthTable":
        return cls(n_inputs=data["n_inputs"], outputs=[list(r) for r in data["outputs"]])

    @classmethod
    def demux(cls, n_inputs: int) -> "TruthTable":
        size = 2**n_inputs
        rows = [[1 if j == code else 0 for j in range(size)] for code in range(size)]
        return cls(n_inputs=n_inputs, outputs=rows)


INPUT_NAMES = ("A", "B", "C", "D")


def _input_names(n: int) -> list[str]:
    return list(INPUT_NAMES[:n])


class _Builder:
    """Deterministic gate construction with structural sharing."""

    def __init__(self, inputs: list[str]):
        self.inputs = inputs
        self.gates: list[Gate] = []
        self._cache: dict[tuple, str] = {}
        self._counter = 0

    def _emit(self, kind: str, refs: tuple[str, ...]) -> str:
        key = (kind, refs)
        if key in self._cache:
            return self._cache[key]
        gid = f"g{self._counter}_{kind.lower()}"
        self._counter += 1
        self.gates.append(Gate(gid, kind, refs))
        self._cache[key] = gid
        return gid

    def inv(self, ref: str) -> str:
        return self._emit(NOT, (ref,))

    def conj(self, refs: list[str]) -> str:
        """Balanced AND tree over one or more literals."""
        level = list(refs)
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level) - 1, 2):
                nxt.append(self._emit(AND, (level[i], level[i + 1])))
            if len(level) % 2 == 1:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    def disj(self, refs: list[str]) -> str:
        """Balanced OR tree over one or more terms."""
        level = list(refs)
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level) - 1, 2):
                nxt.append(self._emit(OR, (level[i], level[i + 1])))
            if len(level) % 2 == 1:
                nxt.append(level[-1])
            level = nxt
        return level[0]


def _minterm_refs(builder: _Builder, code: int, names: list[str]) -> list[str]:
    n = len(names)
    refs = []
    for bit_pos, name in enumerate(names):
        bit = (code >> (n - 1 - bit_pos)) & 1
        refs.append(name if bit else builder.inv(name))
    return refs


def synth_demux(n_inputs: int) -> GateCircuit:
    """One-hot demultiplexer: output k is the minterm of input code k."""
    if not (MIN_INPUTS <= n_inputs <= MAX_INPUTS):
        raise UnsupportedWidth(
            f"demux synthesis supports {MIN_INPUTS}-{MAX_INPUTS} inputs "
            f"(2 input / 4 output up to 4 input / 16 output), got {n_inputs}"
        )
    names = _input_names(n_inputs)
    builder = _Builder(names)
    outputs = []
    for code in range(2**n_inputs):
        ref = builder.conj(_minterm_refs(builder, code, names))
        outputs.append((f"S{code}", ref))
    return GateCircuit(inputs=names, gates=builder.gates, outputs=outputs)


def synth_truth_table(table: TruthTable) -> GateCircuit:
    """Sum-of-products circuit for an arbitrary table, sharing minterms."""
    names = _input_names(table.n_inputs)
    builder = _Builder(names)
    minterms = {
        code: builder.conj(_minterm_refs(builder, code, names))
        for code in range(2**table.n_inputs)
        if any(table.outputs[code])
    }
    outputs = []
    for j in range(table.n_outputs):
        terms = [minterms[code] for code in sorted(minterms) if table.outputs[code][j]]
        if not terms:
            # Constant-low output: ground it through an uncontrolled contradiction
            # A AND (NOT A) keeps the circuit purely combinational.
            a = names[0]
            terms = [builder.conj([a, builder.inv(a)])]
        outputs.append((f"S{j}", builder.disj(terms)))
    return GateCircuit(inputs=names, gates=builder.gates, outputs=outputs)


def evaluate_logic(circuit: GateCircuit, code) -> list[int]:
    """Pure boolean evaluation in topological (definition) order."""
    bits = list(code)
    if len(bits) != len(circuit.inputs):
        raise WidthMismatch(
            f"code width {len(bits)} does not match circuit input count {len(circuit.inputs)}"
        )
    values: dict[str, int] = {name: 1 if b else 0 for name, b in zip(circuit.inputs, bits)}
    for gate in circuit.gates:
        _check_arity(gate)
        unresolved = [r for r in gate.inputs if r not in values]
        if unresolved:
            raise ValueError(
                f"gate {gate.id} references {unresolved} before definition; circuit must be topologically ordered"
            )
        ins = [values[r] for r in gate.inputs]
        if gate.kind == NOT:
            values[gate.id] = 1 - ins[0]
        elif gate.kind == AND:
            values[gate.id] = 1 if all(ins) else 0
        elif gate.kind == OR:
            values[gate.id] = 1 if any(ins) else 0
        else:
            raise ValueError(f"unknown gate kind {gate.kind!r}")
    return [values[ref] for _, ref in circuit.outputs]


def _check_arity(gate: Gate) -> None:
    expected = 1 if gate.kind == NOT else 2
    if gate.kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    if len(gate.inputs) != expected:
        raise ValueError(
            f"gate {gate.id} ({gate.kind}) needs {expected} input(s), has {len(gate.inputs)}"
        )


PZ_SOURCE_ID = "pz"
ATMOSPHERE_ID = "atm"


def input_source_id(port: str) -> str:
    return f"src_{port}"


def compile_to_netlist(
    circuit: GateCircuit,
    valve: ValveParams | None = None,
    supply_kpa: float = LOGIC_SUPPLY_KPA,
) -> Netlist:
    """Lower a gate circuit to soft valves fed by one logic-high source.

    Every gate output becomes a junction node driven from the P_z source
    through the gate's valves; circuit outputs are probe nodes. Input ports
    become schedulable source nodes wired directly as valve controls.
    """
    v = valve or default_valve_params()
    if supply_kpa <= v.snap_up_kpa:
        raise SupplyTooLow(
            f"logic supply {supply_kpa} kPa must exceed snap-through {v.snap_up_kpa} kPa"
        )

    nodes: list[Node] = [
        Node(PZ_SOURCE_ID, SOURCE, pressure_kpa=supply_kpa),
        Node(ATMOSPHERE_ID, ATMOSPHERE),
    ]
    valves: list[Valve] = []
    signal_node: dict[str, str] = {}

    for port in circuit.inputs:
        sid = input_source_id(port)
        nodes.append(Node(sid, SOURCE, pressure_kpa=0.0))
        signal_node[port] = sid

    for gate in circuit.gates:
        _check_arity(gate)
        out = f"n_{gate.id}"
        nodes.append(Node(out, PROBE))
        signal_node[gate.id] = out
        ctrl = [signal_node[r] for r in gate.inputs]
        if gate.kind == NOT:
            valves.append(
                Valve(
                    id=f"v_{gate.id}",
                    params=v,
                    control_node=ctrl[0],
                    inlet_node=PZ_SOURCE_ID,
                    outlet_node=out,
                    polarity=BLOCK_WHEN_SNAPPED,
                    vent_when_closed=True,
                )
            )
        elif gate.kind == AND:
            mid = f"n_{gate.id}_mid"
            nodes.append(Node(mid, PROBE))
            valves.append(
                Valve(
                    id=f"v_{gate.id}_a",
                    params=v,
                    control_node=ctrl[0],
                    inlet_node=PZ_SOURCE_ID,
                    outlet_node=mid,
                    polarity=PASS_WHEN_SNAPPED,
                    vent_when_closed=True,
                )
            )
            valves.append(
                Valve(
                    id=f"v_{gate.id}_b",
                    params=v,
                    control_node=ctrl[1],
                    inlet_node=mid,
                    outlet_node=out,
                    polarity=PASS_WHEN_SNAPPED,
                    vent_when_closed=True,
                )
            )
        elif gate.kind == OR:
            # Parallel pass valves; a closed channel blocks backflow, which is
            # the flow isolation between branches. No vent: from a discharged
            # start the output only charges when some branch drives it.
            for suffix, c in zip(("a", "b"), ctrl):
                valves.append(
                    Valve(
                        id=f"v_{gate.id}_{suffix}",
                        params=v,
                        control_node=c,
                        inlet_node=PZ_SOURCE_ID,
                        outlet_node=out,
                        polarity=PASS_WHEN_SNAPPED,
                        vent_when_closed=False,
                    )
                )
        else:
            raise ValueError(f"unknown gate kind {gate.kind!r}")

    # Named output probes, tied to their driving signal nodes with tubes.
    edges = []
    for name, ref in circuit.outputs:
        nodes.append(Node(name, PROBE))
        edges.append(Edge(f"e_{name}", signal_node[ref], name))

    return Netlist(nodes=nodes, valves=valves, edges=edges)


def input_schedule(circuit: GateCircuit, code, supply_kpa: float = LOGIC_SUPPLY_KPA) -> SourceSchedule:
    """Schedule applying one input code at t=0 alongside the logic supply."""
    bits = list(code)
    if len(bits) != len(circuit.inputs):
        raise WidthMismatch(
            f"code width {len(bits)} does not match circuit input count {len(circuit.inputs)}"
        )
    sched = SourceSchedule()
    sched.set(PZ_SOURCE_ID, 0.0, supply_kpa)
    for port, bit in zip(circuit.inputs, bits):
        sched.set(input_source_id(port), 0.0, supply_kpa if bit else 0.0)
    return sched


def propagation_delay_estimate(circuit: GateCircuit, valve: ValveParams | None = None) -> float:
    """Lower-bound settle estimate: deepest gate path times one snap fill."""
    v = valve or default_valve_params()
    depth: dict[str, int] = {name: 0 for name in circuit.inputs}
    for gate in circuit.gates:
        depth[gate.id] = 1 + max(depth[r] for r in gate.inputs)
    max_depth = max((depth[ref] for _, ref in circuit.outputs), default=0)
    per_gate = v.snap_fill_volume_ml / slm_to_ml_per_s(v.open_flow_slm)
    return max_depth * per_gate
