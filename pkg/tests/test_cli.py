"""Command-line plumbing: config validation, CSV round trips, exit codes."""

import csv
import json

import pytest
import yaml

from msfslab.cli import (
    ConfigFileError,
    SCHEMA_TAG,
    format_cell,
    main,
    parse_experiment,
)

BASE_DOC = {
    "case_study": "collective_decision",
    "strategy": "random_total",
    "seed": 5,
    "horizon": 60,
    "repetitions": 2,
    "parameters": {"n_agents": 2, "n_sources": 2},
}


def write_config(tmp_path, name="cfg.yaml", **overrides):
    doc = dict(BASE_DOC)
    doc.update(overrides)
    for key, value in list(doc.items()):
        if value is None:
            del doc[key]
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return path


def read_rows(path):
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


class TestFormatting:
    def test_na_for_missing(self):
        assert format_cell(None) == "NA"

    def test_nine_significant_digits(self):
        assert format_cell(0.12345678912345) == "0.123456789"
        assert format_cell(3) == "3"
        assert format_cell(-1.5e-7) == "-1.5e-07"


class TestParseExperiment:
    def test_one_config_per_strategy(self):
        doc = dict(BASE_DOC, strategies=["consensus", "random_total"])
        del doc["strategy"]
        configs = parse_experiment(doc)
        assert [cfg.strategy for cfg in configs] == ["consensus", "random_total"]
        assert all(cfg.seed == 5 and cfg.horizon == 60 for cfg in configs)

    def test_seed_override(self):
        assert parse_experiment(dict(BASE_DOC), seed_override=99)[0].seed == 99

    @pytest.mark.parametrize(
        "patch,field",
        [
            ({"case_study": None}, "case_study"),
            ({"case_study": "swarm_of_swans"}, "case_study"),
            ({"strategy": "majority"}, "strategy"),
            ({"strategies": ["consensus"]}, "strategy"),
            ({"horizon": None}, "horizon"),
            ({"horizon": -3}, "horizon"),
            ({"horizon": True}, "horizon"),
            ({"seed": "abc"}, "seed"),
            ({"repetitions": 0}, "repetitions"),
            ({"parameters": [1, 2]}, "parameters"),
            ({"colour": "red"}, "colour"),
        ],
    )
    def test_field_level_messages(self, patch, field):
        doc = dict(BASE_DOC)
        for key, value in patch.items():
            if value is None:
                del doc[key]
            else:
                doc[key] = value
        with pytest.raises(ConfigFileError, match=field):
            parse_experiment(doc)

    def test_vector_parameters_rejected(self):
        doc = dict(BASE_DOC, parameters={"n_agents": [1, 2]})
        with pytest.raises(ConfigFileError, match="parameters"):
            parse_experiment(doc)


class TestRunCommand:
    def test_writes_csv_and_manifest(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        rows = read_rows(out / "measures.csv")
        assert rows[0] == SCHEMA_TAG
        header = rows[1]
        assert header[:4] == ["case_study", "strategy", "stream", "time"]
        assert header[4:] == sorted(header[4:])
        assert {row[2] for row in rows[2:]} == {"0", "1"}
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["case_study"] == "collective_decision"
        assert manifest["strategies"] == ["random_total"]
        assert manifest["rows"] == len(rows) - 2
        assert len(manifest["config_hash"]) == 64
        assert "wrote" in capsys.readouterr().out

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path)
        for out in ("a", "b"):
            assert main(["run", "--config", str(cfg), "--out", str(tmp_path / out)]) == 0
        first = (tmp_path / "a" / "measures.csv").read_bytes()
        second = (tmp_path / "b" / "measures.csv").read_bytes()
        assert first == second
        assert b"\r" not in first

    def test_parallel_jobs_change_nothing(self, tmp_path):
        cfg = write_config(tmp_path)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "serial")])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "par"), "--jobs", "2"])
        assert (tmp_path / "serial" / "measures.csv").read_bytes() == (
            tmp_path / "par" / "measures.csv"
        ).read_bytes()

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "base")])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "re"), "--seed", "5"])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "new"), "--seed", "6"])
        base = (tmp_path / "base" / "measures.csv").read_bytes()
        assert base == (tmp_path / "re" / "measures.csv").read_bytes()
        assert base != (tmp_path / "new" / "measures.csv").read_bytes()
        assert json.loads((tmp_path / "new" / "manifest.json").read_text())["seed"] == 6

    def test_full_trace_writes_snapshots(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--full-trace"]) == 0
        snapshots = json.loads((out / "snapshots.json").read_text())
        assert set(snapshots) == {"random_total/0", "random_total/1"}
        assert all(isinstance(track, list) and track for track in snapshots.values())

    def test_invalid_strategy_exits_2_without_output(self, tmp_path, capsys):
        cfg = write_config(tmp_path, strategy="majority")
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 2
        assert not out.exists()
        assert "strategy" in capsys.readouterr().err

    def test_unreadable_config_exits_2(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == 2
        assert "config" in capsys.readouterr().err

    def test_non_mapping_config_exits_2(self, tmp_path, capsys):
        path = tmp_path / "cfg.yaml"
        path.write_text("- just\n- a list\n", encoding="utf-8")
        assert main(["run", "--config", str(path)]) == 2
        capsys.readouterr()

    def test_model_error_exits_3(self, tmp_path, capsys):
        # n_sources beyond the scan table is caught inside the model,
        # not by the config schema
        cfg = write_config(tmp_path, parameters={"n_agents": 2, "n_sources": 82})
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 3
        assert not out.exists()
        assert "model error" in capsys.readouterr().err


class TestVerifyCommand:
    def run_once(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "golden"
        main(["run", "--config", str(cfg), "--out", str(out)])
        return out / "measures.csv"

    def test_self_verify_at_zero_tolerance(self, tmp_path, capsys):
        path = self.run_once(tmp_path)
        assert main(["verify", str(path), str(path)]) == 0
        assert "all" in capsys.readouterr().out

    def perturb(self, path, target, column=7, replacement=None):
        rows = read_rows(path)
        value = float(rows[2][column])
        rows[2][column] = replacement if replacement else "%.9g" % (value + 1e-3)
        with target.open("w", encoding="utf-8", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)

    def test_perturbed_cell_fails_and_names_itself(self, tmp_path, capsys):
        golden = self.run_once(tmp_path)
        bad = tmp_path / "bad.csv"
        self.perturb(golden, bad)
        assert main(["verify", str(golden), str(bad)]) == 1
        out = capsys.readouterr().out
        assert "FAIL row 1" in out
        assert "1 cell(s)" in out

    def test_tolerance_absorbs_small_differences(self, tmp_path):
        golden = self.run_once(tmp_path)
        bad = tmp_path / "bad.csv"
        self.perturb(golden, bad)
        assert main(["verify", str(golden), str(bad), "--tolerance", "0.002"]) == 0
        assert main(["verify", str(golden), str(bad), "--tolerance", "0.0005"]) == 1

    def test_na_never_matches_a_number(self, tmp_path, capsys):
        golden = self.run_once(tmp_path)
        bad = tmp_path / "bad.csv"
        self.perturb(golden, bad, replacement="NA")
        assert main(["verify", str(golden), str(bad), "--tolerance", "99"]) == 1
        capsys.readouterr()

    def test_schema_tag_checked(self, tmp_path, capsys):
        golden = self.run_once(tmp_path)
        rows = read_rows(golden)
        rows[0] = ["schema", "someone-elses-2"]
        other = tmp_path / "other.csv"
        with other.open("w", encoding="utf-8", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)
        assert main(["verify", str(golden), str(other)]) == 2
        assert "schema" in capsys.readouterr().err

    def test_header_and_shape_mismatches_exit_2(self, tmp_path, capsys):
        golden = self.run_once(tmp_path)
        rows = read_rows(golden)
        short = tmp_path / "short.csv"
        with short.open("w", encoding="utf-8", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows[:-1])
        assert main(["verify", str(golden), str(short)]) == 2
        renamed = tmp_path / "renamed.csv"
        rows2 = read_rows(golden)
        rows2[1][4] = "delta_something"
        with renamed.open("w", encoding="utf-8", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows2)
        assert main(["verify", str(golden), str(renamed)]) == 2
        capsys.readouterr()

    def test_empty_results_exit_2(self, tmp_path, capsys):
        golden = self.run_once(tmp_path)
        empty = tmp_path / "empty.csv"
        empty.write_text("", encoding="utf-8")
        assert main(["verify", str(golden), str(empty)]) == 2
        assert "empty" in capsys.readouterr().err


class TestListCommand:
    def test_enumerates_registered_models(self, capsys):
        assert main(["list"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        names = [line.split(":")[0] for line in lines]
        assert names == sorted(names)
        assert len(names) == 4
        listing = dict(line.split(": ", 1) for line in lines)
        assert len(listing["robotic_collective"].split(", ")) == 4
        assert len(listing["task_distribution"].split(", ")) == 5
