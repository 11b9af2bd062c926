"""Command-line entry points: thin clients over the core package.

Exit codes: 0 success, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import json
import sys

import click

from .catalog import load_catalog
from .engine import SimConfig, SourceSchedule, simulate
from .errors import FluidrankError
from .logic import (
    GateCircuit,
    TruthTable,
    compile_to_netlist,
    synth_demux,
    synth_truth_table,
)
from .netlist import Netlist, validate_netlist
from .perception import PerceptionProfile
from .store import RunStore, canonical_json, resolve_store_root
from .units import LOGIC_SUPPLY_KPA
from .workflows import preview_payload, rank_payload, run_study_payload, study_inputs_payload


@click.group()
def cli():
    """Fluidic-logic simulation, compilation, and haptic configuration ranking."""


@cli.command()
@click.option("--inputs", "n_inputs", type=int, default=None, help="Demultiplexer input count (2-4).")
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Truth table JSON to synthesize instead of a demux.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def synth(n_inputs, table_path, out_path):
    """Synthesize a gate circuit from a demux width or a truth table."""
    if (n_inputs is None) == (table_path is None):
        raise click.UsageError("provide exactly one of --inputs or --table")
    if table_path is not None:
        with open(table_path) as fh:
            circuit = synth_truth_table(TruthTable.from_dict(json.load(fh)))
    else:
        circuit = synth_demux(n_inputs)
    circuit.save(out_path)
    click.echo(f"wrote {out_path} ({len(circuit.gates)} gates, {len(circuit.outputs)} outputs)")


@cli.command()
@click.option("--gates", "gates_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--supply", type=float, default=LOGIC_SUPPLY_KPA, show_default=True,
              help="Logic-high supply pressure (kPa).")
def lower(gates_path, out_path, supply):
    """Lower a gate circuit JSON to a valve netlist JSON."""
    circuit = GateCircuit.load(gates_path)
    netlist = compile_to_netlist(circuit, supply_kpa=supply)
    violations = validate_netlist(netlist)
    if violations:
        raise FluidrankError("; ".join(str(v) for v in violations))
    netlist.save(out_path)
    click.echo(f"wrote {out_path} ({len(netlist.valves)} valves, {len(netlist.nodes)} nodes)")


@cli.command("simulate")
@click.option("--netlist", "netlist_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--code", default=None, help="Input bit string (e.g. 101) applied at t=0.")
@click.option("--schedule", "schedule_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Source schedule JSON instead of --code.")
@click.option("--duration", type=float, default=3.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--loss-multiplier", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Trace CSV path (stdout when omitted).")
def simulate_cmd(netlist_path, code, schedule_path, duration, dt, loss_multiplier, out_path):
    """Simulate a netlist and emit the probe/valve trace as CSV."""
    if (code is None) == (schedule_path is None):
        raise click.UsageError("provide exactly one of --code or --schedule")
    netlist = Netlist.load(netlist_path)
    if code is not None:
        bits = [int(c) for c in code.strip()]
        source_ids = {n.id for n in netlist.nodes if n.kind == "source"}
        input_sources = sorted(s for s in source_ids if s.startswith("src_"))
        if len(bits) != len(input_sources):
            raise FluidrankError(
                f"code width {len(bits)} does not match input sources {input_sources}"
            )
        schedule = SourceSchedule()
        if "pz" in source_ids:
            schedule.set("pz", 0.0, LOGIC_SUPPLY_KPA)
        for sid, bit in zip(input_sources, bits):
            schedule.set(sid, 0.0, LOGIC_SUPPLY_KPA if bit else 0.0)
    else:
        with open(schedule_path) as fh:
            schedule = SourceSchedule.from_dicts(json.load(fh))
    cfg = SimConfig(duration=duration, dt=dt, loss_multiplier=loss_multiplier)
    trace = simulate(netlist, schedule, cfg)
    csv_text = trace.to_csv()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(csv_text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(csv_text, nl=False)


@cli.command()
@click.option("--config", "config_id", required=True, help="Configuration id, e.g. PF.")
@click.option("--theta", required=True, help="Comma-separated task axis values, e.g. 3,1.")
@click.option("--task", "task_id", default="search", show_default=True)
@click.option("--seconds", type=float, default=3.0, show_default=True)
@click.option("--modalities", "modalities_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--csv", "as_csv", is_flag=True, help="Emit the trace-style CSV instead of JSON.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Timeline path (stdout when omitted).")
def preview(config_id, theta, task_id, seconds, modalities_path, as_csv, out_path):
    """Render the signal timeline a configuration presents for a task value."""
    catalog = load_catalog(modalities_path)
    theta_values = [int(x) for x in theta.split(",")]
    if as_csv:
        from .perception import encode_nearest
        from .signals import render_timeline

        config = catalog.configuration(config_id)
        task = catalog.task(task_id)
        point = encode_nearest(config, task, tuple(theta_values))
        text = render_timeline(config, point, seconds_per_channel=seconds, dt=0.01).to_csv()
    else:
        payload = preview_payload(catalog, config_id, theta_values, task_id, seconds)
        text = canonical_json(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--prefs", "prefs_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Preference JSON: slider values plus optional alpha/beta.")
@click.option("--task", "task_id", default="search", show_default=True)
@click.option("--modalities", "modalities_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def rank(prefs_path, task_id, modalities_path, out_path):
    """Rank every catalog configuration for a preference profile.

    The JSON report goes to stdout (or --out); a readable table goes to
    stderr so stdout stays pipeable.
    """
    catalog = load_catalog(modalities_path)
    profile = PerceptionProfile.load(prefs_path)
    payload = rank_payload(
        catalog, preferences=profile.preferences, task_id=task_id,
        alpha=profile.alpha, beta=profile.beta,
    )
    text = canonical_json(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)
    click.echo(f"{'rank':>4}  {'configuration':<14}{'MI (nats)':>12}{'MI (bits)':>12}", err=True)
    for row in payload["rows"]:
        click.echo(
            f"{row['rank']:>4}  {row['configuration_id']:<14}"
            f"{row['mi_nats']:>12.6f}{row['mi_bits']:>12.6f}",
            err=True,
        )


@cli.command()
@click.option("--config", "study_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Study config JSON.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Report directory (defaults to the run store).")
@click.option("--seed", type=int, default=None, help="Override the master seed.")
@click.option("--store", "store_flag", default=None, help="Run store root (env FLUIDRANK_STORE).")
@click.option("--modalities", "modalities_path", type=click.Path(exists=True, dir_okay=False), default=None)
def study(study_path, out_dir, seed, store_flag, modalities_path):
    """Run a simulated study and persist report + trial CSV."""
    catalog = load_catalog(modalities_path)
    with open(study_path) as fh:
        spec = json.load(fh)
    if seed is not None:
        spec["master_seed"] = seed
    tasks = spec.get("tasks", ["search"])
    trials = spec.get("trials_per_config", 1000)
    decode_mode = spec.get("decode_mode", "map")
    master_seed = spec.get("master_seed", 0)
    jitter = spec.get("jitter", False)
    profiles_spec = spec.get("profiles", 1)
    config_ids = spec.get("configuration_ids")
    report, payload = run_study_payload(
        catalog, tasks=tasks, trials_per_config=trials, decode_mode=decode_mode,
        master_seed=master_seed, jitter=jitter, profiles_spec=profiles_spec,
        configuration_ids=config_ids, collect_trials=True,
    )
    inputs = study_inputs_payload(
        tasks, trials, decode_mode, master_seed, jitter, profiles_spec,
        config_ids or [c.id for c in catalog.study_configurations()],
    )
    store = RunStore(out_dir or resolve_store_root(store_flag))
    run_id = store.persist(
        "study", inputs, {"report.json": canonical_json(payload), "trials.csv": report.trials_csv()}
    )
    click.echo(f"study run {run_id} written to {store.root}")


@cli.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_flag", default=None, help="Run store root (env FLUIDRANK_STORE).")
@click.option("--modalities", "modalities_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False), default=None,
              help="Static directory with the operator console build.")
def serve(port, host, store_flag, modalities_path, ui_dir):
    """Start the HTTP/JSON service."""
    import uvicorn

    from .service.app import create_app

    catalog = load_catalog(modalities_path)
    store = RunStore(resolve_store_root(store_flag))
    app = create_app(catalog=catalog, store=store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except FluidrankError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
