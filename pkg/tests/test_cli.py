import json
import os

import pytest

from fluidrank.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_prefs(tmp_path, **overrides):
    prefs = {"pressure": 1.0, "frequency": 1.0, "area": 1.0, "alpha": 0.25, "beta": 24.0}
    prefs.update(overrides)
    path = tmp_path / "prefs.json"
    path.write_text(json.dumps(prefs))
    return str(path)


class TestSynthLower:
    def test_synth_demux_and_lower(self, tmp_path, capsys):
        gates = tmp_path / "demux3.json"
        code, out, _ = run_cli(["synth", "--inputs", "3", "--out", str(gates)], capsys)
        assert code == 0
        assert gates.exists()
        netlist = tmp_path / "demux3.netlist.json"
        code, out, _ = run_cli(["lower", "--gates", str(gates), "--out", str(netlist)], capsys)
        assert code == 0
        data = json.loads(netlist.read_text())
        assert set(data) == {"nodes", "valves", "edges"}

    def test_synth_width_out_of_range_is_domain_error(self, tmp_path, capsys):
        code, _, err = run_cli(["synth", "--inputs", "5", "--out", str(tmp_path / "x.json")], capsys)
        assert code == 2
        assert "2-4" in err

    def test_usage_error_exit_code(self, tmp_path, capsys):
        code, _, err = run_cli(["synth", "--out", str(tmp_path / "x.json")], capsys)
        assert code == 1
        code2, _, err2 = run_cli(["synth", "--inputs", "3"], capsys)
        assert code2 == 1
        assert "--out" in err2

    def test_synth_from_truth_table(self, tmp_path, capsys):
        table = {"n_inputs": 2, "outputs": [[1, 0], [0, 1], [0, 1], [1, 1]]}
        tpath = tmp_path / "table.json"
        tpath.write_text(json.dumps(table))
        gates = tmp_path / "gates.json"
        code, _, _ = run_cli(["synth", "--table", str(tpath), "--out", str(gates)], capsys)
        assert code == 0
        from fluidrank.logic import GateCircuit, evaluate_logic

        circuit = GateCircuit.load(gates)
        assert evaluate_logic(circuit, (0, 0)) == [1, 0]
        assert evaluate_logic(circuit, (1, 1)) == [1, 1]


class TestSimulateCommand:
    @pytest.mark.slow
    def test_demux_code_101_drives_s5(self, tmp_path, capsys):
        gates = tmp_path / "demux3.json"
        netlist = tmp_path / "demux3.netlist.json"
        assert main(["synth", "--inputs", "3", "--out", str(gates)]) == 0
        assert main(["lower", "--gates", str(gates), "--out", str(netlist)]) == 0
        capsys.readouterr()
        trace_csv = tmp_path / "trace.csv"
        code, out, _ = run_cli(
            ["simulate", "--netlist", str(netlist), "--code", "101",
             "--duration", "3", "--out", str(trace_csv)],
            capsys,
        )
        assert code == 0
        lines = trace_csv.read_text().strip().split("\n")
        header = lines[0].split(",")
        final = lines[-1].split(",")
        by_col = dict(zip(header, final))
        assert float(by_col["S5_kPa"]) > 10.0
        for k in range(8):
            if k != 5:
                assert float(by_col[f"S{k}_kPa"]) < 10.0

    def test_requires_code_or_schedule(self, tmp_path, capsys):
        netlist = tmp_path / "n.json"
        netlist.write_text("{}")
        code, _, err = run_cli(["simulate", "--netlist", str(netlist)], capsys)
        assert code == 1


class TestRankCommand:
    def test_rank_outputs_report_json(self, tmp_path, capsys):
        prefs = write_prefs(tmp_path)
        code, out, _ = run_cli(["rank", "--prefs", prefs, "--task", "search"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["task_id"] == "search"
        assert len(payload["rows"]) == 6
        assert payload["rows"][0]["rank"] == 1
        kinds = set(payload["rows"][0]["channel_kinds"])
        assert kinds == {"pressure", "area"}

    def test_unknown_task_is_domain_error(self, tmp_path, capsys):
        prefs = write_prefs(tmp_path)
        code, _, err = run_cli(["rank", "--prefs", prefs, "--task", "sorting"], capsys)
        assert code == 2

    def test_bad_preference_value_is_domain_error(self, tmp_path, capsys):
        prefs = write_prefs(tmp_path, pressure=1.4)
        code, _, err = run_cli(["rank", "--prefs", prefs, "--task", "search"], capsys)
        assert code == 2


class TestPreviewCommand:
    def test_preview_payload_shape(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["preview", "--config", "PF", "--theta", "3,1", "--task", "search"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["configuration_id"] == "PF"
        ids = [s["display_id"] for s in payload["series"]]
        assert "ch0_pressure" in ids

    def test_preview_csv_trace_format(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["preview", "--config", "PF", "--theta", "3,1", "--csv"], capsys
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "time_s,ch0_pressure_kPa,ch1_frequency_kPa"
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 27.58


class TestStudyCommand:
    def test_study_run_persists_report(self, tmp_path, capsys):
        spec = {
            "tasks": ["search"],
            "trials_per_config": 20,
            "decode_mode": "map",
            "master_seed": 5,
            "profiles": 2,
        }
        spath = tmp_path / "study.json"
        spath.write_text(json.dumps(spec))
        out_dir = tmp_path / "runs"
        code, out, _ = run_cli(
            ["study", "--config", str(spath), "--out", str(out_dir)], capsys
        )
        assert code == 0
        runs = os.listdir(out_dir)
        assert len(runs) == 1
        run_dir = out_dir / runs[0]
        report = json.loads((run_dir / "report.json").read_text())
        assert report["study"]["trials_per_config"] == 20
        assert (run_dir / "trials.csv").exists()
        assert (run_dir / "manifest.json").exists()


def test_modalities_override(tmp_path, capsys):
    catalog_file = tmp_path / "mods.json"
    catalog_file.write_text(
        json.dumps(
            {
                "modalities": [
                    {"kind": "pressure", "levels": [5.0, 10.0, 15.0]},
                    {"kind": "frequency", "levels": [4.0, 7.0]},
                    {"kind": "area", "levels": [1, 2, 3]},
                ]
            }
        )
    )
    prefs = write_prefs(tmp_path)
    code, out, _ = run_cli(
        ["rank", "--prefs", prefs, "--task", "search", "--modalities", str(catalog_file)], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert len(payload["rows"]) == 6
