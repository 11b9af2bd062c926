"""Pneumatic circuit graph: nodes, valves, edges, validation, JSON I/O.

A netlist is the shared representation between the logic compiler and the
timestep simulator. Nodes are pressure points (regulated sources, passive
chambers, the single atmosphere, and probe/junction points). Valves are
three-way elements: a switched channel from inlet to outlet, plus an
optional vent channel that opens the outlet to atmosphere whenever the main
channel is closed (this is the second channel of the physical valve and is
what lets gate outputs discharge instead of holding stale pressure).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .units import ValveParams

SOURCE = "source"
CHAMBER = "chamber"
ATMOSPHERE = "atmosphere"
PROBE = "probe"
NODE_KINDS = (SOURCE, CHAMBER, ATMOSPHERE, PROBE)

PASS_WHEN_SNAPPED = "pass-when-snapped"
BLOCK_WHEN_SNAPPED = "block-when-snapped"
POLARITIES = (PASS_WHEN_SNAPPED, BLOCK_WHEN_SNAPPED)

TUBE = "tube"
OPEN_VALVE_CHANNEL = "open-valve-channel"
CONDUCTANCE_CLASSES = (TUBE, OPEN_VALVE_CHANNEL)


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    pressure_kpa: float | None = None  # sources only
    volume_ml: float | None = None  # chambers only


@dataclass(frozen=True)
class Valve:
    id: str
    params: ValveParams
    control_node: str
    inlet_node: str
    outlet_node: str
    polarity: str = PASS_WHEN_SNAPPED
    vent_when_closed: bool = False


@dataclass(frozen=True)
class Edge:
    id: str
    from_node: str
    to_node: str
    conductance_class: str = TUBE


@dataclass
class Netlist:
    nodes: list[Node] = field(default_factory=list)
    valves: list[Valve] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    def source_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes if n.kind == SOURCE)

    def probe_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes if n.kind == PROBE)

    def to_dict(self) -> dict:
        return {
            "nodes": [_node_to_dict(n) for n in self.nodes],
            "valves": [_valve_to_dict(v) for v in self.valves],
            "edges": [
                {
                    "id": e.id,
                    "from_node": e.from_node,
                    "to_node": e.to_node,
                    "conductance_class": e.conductance_class,
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Netlist":
        nodes = [_node_from_dict(d) for d in data.get("nodes", [])]
        valves = [_valve_from_dict(d) for d in data.get("valves", [])]
        edges = [
            Edge(
                id=d["id"],
                from_node=d["from_node"],
                to_node=d["to_node"],
                conductance_class=d.get("conductance_class", TUBE),
            )
            for d in data.get("edges", [])
        ]
        return cls(nodes=nodes, valves=valves, edges=edges)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Netlist":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _node_to_dict(n: Node) -> dict:
    d = {"id": n.id, "kind": n.kind}
    if n.pressure_kpa is not None:
        d["pressure_kPa"] = n.pressure_kpa
    if n.volume_ml is not None:
        d["volume_mL"] = n.volume_ml
    return d


def _node_from_dict(d: dict) -> Node:
    return Node(
        id=d["id"],
        kind=d["kind"],
        pressure_kpa=d.get("pressure_kPa"),
        volume_ml=d.get("volume_mL"),
    )


def _valve_to_dict(v: Valve) -> dict:
    return {
        "id": v.id,
        "control_node": v.control_node,
        "inlet_node": v.inlet_node,
        "outlet_node": v.outlet_node,
        "polarity": v.polarity,
        "vent_when_closed": v.vent_when_closed,
        "params": {
            "snap_up_kPa": v.params.snap_up_kpa,
            "snap_down_kPa": v.params.snap_down_kpa,
            "open_flow_slm": v.params.open_flow_slm,
            "control_volume_mL": v.params.control_volume_ml,
            "snap_fill_volume_mL": v.params.snap_fill_volume_ml,
            "bistable": v.params.bistable,
        },
    }


def _valve_from_dict(d: dict) -> Valve:
    p = d["params"]
    return Valve(
        id=d["id"],
        params=ValveParams(
            snap_up_kpa=p["snap_up_kPa"],
            snap_down_kpa=p["snap_down_kPa"],
            open_flow_slm=p["open_flow_slm"],
            control_volume_ml=p["control_volume_mL"],
            snap_fill_volume_ml=p["snap_fill_volume_mL"],
            bistable=p.get("bistable", False),
        ),
        control_node=d["control_node"],
        inlet_node=d["inlet_node"],
        outlet_node=d["outlet_node"],
        polarity=d.get("polarity", PASS_WHEN_SNAPPED),
        vent_when_closed=d.get("vent_when_closed", False),
    )


# Validation rule identifiers. Violations are data, not exceptions: the
# simulator refuses invalid netlists, but inspection tools report them all.
UNRESOLVED_REFERENCE = "UnresolvedReference"
DUPLICATE_ID = "DuplicateId"
MULTIPLE_ATMOSPHERE = "MultipleAtmosphere"
MISSING_ATMOSPHERE = "MissingAtmosphere"
BAD_NODE_KIND = "BadNodeKind"
BAD_POLARITY = "BadPolarity"
BAD_CONDUCTANCE_CLASS = "BadConductanceClass"
NONPOSITIVE_VOLUME = "NonPositiveVolume"
NEGATIVE_PRESSURE = "NegativePressure"
INVALID_VALVE_PARAMS = "InvalidValveParams"
TUBE_ONLY_FEEDBACK = "TubeOnlyFeedback"


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    detail: str = ""

    def __str__(self) -> str:
        if self.detail:
            return f"{self.rule}({self.element}): {self.detail}"
        return f"{self.rule}({self.element})"


def validate_netlist(netlist: Netlist) -> list[Violation]:
    """Check every structural invariant; returns an empty list iff valid.

    Pure and idempotent: the same netlist always yields the same list.
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    for n in netlist.nodes:
        if n.id in seen:
            violations.append(Violation(DUPLICATE_ID, n.id, "node id reused"))
        seen.add(n.id)
        if n.kind not in NODE_KINDS:
            violations.append(Violation(BAD_NODE_KIND, n.id, f"unknown kind {n.kind!r}"))
        if n.kind == CHAMBER and (n.volume_ml is None or n.volume_ml <= 0):
            violations.append(
                Violation(NONPOSITIVE_VOLUME, n.id, f"chamber volume must be > 0, got {n.volume_ml}")
            )
        if n.kind == SOURCE and (n.pressure_kpa is None or n.pressure_kpa < 0):
            violations.append(
                Violation(NEGATIVE_PRESSURE, n.id, f"source pressure must be >= 0, got {n.pressure_kpa}")
            )

    node_ids = {n.id for n in netlist.nodes}
    atmospheres = [n for n in netlist.nodes if n.kind == ATMOSPHERE]
    if len(atmospheres) > 1:
        violations.append(
            Violation(MULTIPLE_ATMOSPHERE, ",".join(a.id for a in atmospheres), "exactly one atmosphere node required")
        )
    elif not atmospheres:
        violations.append(Violation(MISSING_ATMOSPHERE, "<netlist>", "exactly one atmosphere node required"))

    element_ids = set()
    for v in netlist.valves:
        if v.id in element_ids:
            violations.append(Violation(DUPLICATE_ID, v.id, "valve id reused"))
        element_ids.add(v.id)
        for ref in (v.control_node, v.inlet_node, v.outlet_node):
            if ref not in node_ids:
                violations.append(Violation(UNRESOLVED_REFERENCE, ref, f"referenced by valve {v.id}"))
        if v.polarity not in POLARITIES:
            violations.append(Violation(BAD_POLARITY, v.id, f"unknown polarity {v.polarity!r}"))
        for problem in v.params.problems():
            violations.append(Violation(INVALID_VALVE_PARAMS, v.id, problem))

    for e in netlist.edges:
        if e.id in element_ids:
            violations.append(Violation(DUPLICATE_ID, e.id, "edge id reused"))
        element_ids.add(e.id)
        for ref in (e.from_node, e.to_node):
            if ref not in node_ids:
                violations.append(Violation(UNRESOLVED_REFERENCE, ref, f"referenced by edge {e.id}"))
        if e.conductance_class not in CONDUCTANCE_CLASSES:
            violations.append(
                Violation(BAD_CONDUCTANCE_CLASS, e.id, f"unknown class {e.conductance_class!r}")
            )

    violations.extend(_tube_feedback_violations(netlist, node_ids))
    return violations


def _tube_feedback_violations(netlist: Netlist, node_ids: set[str]) -> list[Violation]:
    """Flag valves whose outlet reaches their own control over tubes alone.

    Feedback must pass through at least one chamber so the loop has state;
    a tube-only loop would make the snap decision depend on itself within a
    single step. Traversal passes through probe/junction nodes only: any
    chamber, source, or atmosphere on the path breaks the instantaneous loop.
    """
    kinds = {n.id: n.kind for n in netlist.nodes}
    adjacency: dict[str, list[str]] = {}
    for e in netlist.edges:
        if e.conductance_class != TUBE:
            continue
        if e.from_node in node_ids and e.to_node in node_ids:
            adjacency.setdefault(e.from_node, []).append(e.to_node)
            adjacency.setdefault(e.to_node, []).append(e.from_node)

    out = []
    for v in netlist.valves:
        if v.outlet_node not in node_ids or v.control_node not in node_ids:
            continue
        if v.outlet_node == v.control_node:
            if kinds[v.outlet_node] != CHAMBER:
                out.append(Violation(TUBE_ONLY_FEEDBACK, v.id, "outlet wired directly to own control"))
            continue
        # breadth-first over tube edges, passing through probes only
        frontier = [v.outlet_node]
        visited = {v.outlet_node}
        found = False
        while frontier and not found:
            nxt = []
            for nid in frontier:
                for nb in adjacency.get(nid, []):
                    if nb in visited:
                        continue
                    if nb == v.control_node:
                        found = True
                        break
                    visited.add(nb)
                    if kinds.get(nb) == PROBE:
                        nxt.append(nb)
                if found:
                    break
            frontier = nxt
        if found:
            out.append(
                Violation(TUBE_ONLY_FEEDBACK, v.id, "outlet reaches own control through tubes without a chamber")
            )
    return out
