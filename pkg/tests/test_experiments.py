"""Experiment grid runner: config parsing, determinism, CSV, and plots."""

import csv
import json
import re

import pytest

from entcause import (
    DataFormatError,
    InvalidParameterError,
    dag_to_json,
    line_graph,
    load_config,
    plot,
    run_experiment,
    write_results,
)
from entcause.experiments import CSV_FIELDS, results_csv


def _config(**overrides):
    base = {
        "version": 1,
        "id": "unit",
        "graph": "line-2",
        "model": "anm",
        "n_states": 6,
        "noise": [1],
        "samples": [300],
        "methods": ["anm-baseline"],
        "replicates": 1,
        "seed": 11,
    }
    base.update(overrides)
    return load_config(base)


class TestLoadConfig:
    def test_defaults_and_method_parsing(self):
        cfg = _config(methods=["peel", "enumerate:exogenous", "anm-baseline"])
        assert cfg.methods == (("peel", "total"), ("enumerate", "exogenous"),
                               ("anm-baseline", ""))
        assert cfg.n_states == 6 and cfg.m_states == 16
        assert cfg.alpha == 0.05 and cfg.record_timing is False

    def test_accepts_json_text(self):
        cfg = load_config(json.dumps({
            "version": 1, "graph": "triangle", "model": "unconstrained",
            "noise": [1.0], "samples": [100], "methods": ["peel"],
        }))
        assert cfg.graph == "triangle"

    def test_graph_file_reference(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(dag_to_json(line_graph(3)))
        cfg = _config(graph={"path": str(path)})
        assert cfg.graph == str(path)
        assert '"edges"' in cfg.graph_json

    def test_validation_errors(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            load_config({"version": 2, "noise": [1], "samples": [1],
                         "methods": ["peel"]})
        with pytest.raises(InvalidParameterError):
            _config(model="linear")
        with pytest.raises(InvalidParameterError):
            _config(methods=["gradient-descent"])
        with pytest.raises(InvalidParameterError):
            _config(methods=["anm-baseline:total"])
        with pytest.raises(InvalidParameterError):
            _config(methods=["peel:sideways"])
        with pytest.raises(InvalidParameterError):
            _config(noise=[])
        with pytest.raises(InvalidParameterError):
            _config(replicates=0)
        with pytest.raises(InvalidParameterError):
            _config(noise=[0.5])  # anm sweeps hold integer half-widths
        with pytest.raises(InvalidParameterError):
            _config(graph={"nodes": []})
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        with pytest.raises(InvalidParameterError):
            _config(graph={"path": str(bad)})


class TestRunExperiment:
    def test_single_cell_single_replicate(self):
        records = run_experiment(_config())
        assert len(records) == 1
        rec = records[0]
        assert rec.method == "anm-baseline" and rec.measure == ""
        assert rec.shd in (0, 1, 2)
        assert rec.error == "" and rec.runtime_ms == 0.0

    def test_grid_arithmetic(self):
        cfg = _config(noise=[0, 1, 2], methods=["peel", "anm-baseline"],
                      replicates=25, samples=[200])
        records = run_experiment(cfg)
        assert len(records) == 3 * 2 * 25

    def test_rerun_is_byte_identical(self):
        cfg = _config(noise=[0, 1], replicates=3,
                      methods=["peel:total", "anm-baseline"])
        assert results_csv(run_experiment(cfg)) == results_csv(run_experiment(cfg))

    def test_parallel_matches_serial(self):
        cfg = _config(noise=[0, 1], replicates=4,
                      methods=["peel:total", "anm-baseline"])
        serial = results_csv(run_experiment(cfg, jobs=1))
        parallel = results_csv(run_experiment(cfg, jobs=3))
        assert serial == parallel

    def test_same_replicate_shares_its_dataset_across_methods(self):
        cfg = _config(methods=["peel:total", "peel:exogenous", "anm-baseline"])
        records = run_experiment(cfg)
        assert len({r.seed for r in records}) == 1

    def test_timing_recorded_on_request(self):
        records = run_experiment(_config(record_timing=True))
        assert records[0].runtime_ms > 0.0

    def test_generation_failure_writes_error_rows(self):
        # noise window wider than the state space fails inside the replicate
        cfg = _config(n_states=3, noise=[5], methods=["peel", "anm-baseline"])
        records = run_experiment(cfg)
        assert len(records) == 2
        for rec in records:
            assert rec.shd == ""
            assert "InvalidParameterError" in rec.error

    def test_written_csv_shape(self, tmp_path):
        out = tmp_path / "res.csv"
        write_results(run_experiment(_config(replicates=2)), out)
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CSV_FIELDS
        assert len(rows) == 3
        assert rows[1][rows[0].index("noise")] == "1"


def _results_fixture(tmp_path):
    cfg = _config(noise=[0, 1, 2], methods=["peel:total", "anm-baseline"],
                  replicates=3, samples=[200])
    path = tmp_path / "results.csv"
    write_results(run_experiment(cfg), path)
    return path


class TestPlot:
    def test_svg_structure(self, tmp_path):
        results = _results_fixture(tmp_path)
        out = tmp_path / "plot.svg"
        plot(results, x="noise", y="shd", group="method", out_path=out)
        svg = out.read_text()
        assert svg.startswith("<svg")
        polylines = re.findall(r'<polyline points="([^"]*)"', svg)
        assert len(polylines) == 2
        for pts in polylines:
            assert len(pts.split()) == 3  # one vertex per noise level
        assert "anm-baseline" in svg and "peel" in svg
        assert svg.count("<circle") == 6

    def test_deterministic_output(self, tmp_path):
        results = _results_fixture(tmp_path)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        plot(results, x="noise", y="shd", group="method", out_path=a)
        plot(results, x="noise", y="shd", group="method", out_path=b)
        assert a.read_text() == b.read_text()

    def test_missing_column_named(self, tmp_path):
        results = _results_fixture(tmp_path)
        with pytest.raises(InvalidParameterError, match="wrong"):
            plot(results, x="noise", y="wrong", group="method",
                 out_path=tmp_path / "x.svg")

    def test_empty_results_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(",".join(CSV_FIELDS) + "\n")
        with pytest.raises(DataFormatError):
            plot(empty, x="noise", y="shd", group="method",
                 out_path=tmp_path / "x.svg")

    def test_error_rows_skipped(self, tmp_path):
        cfg = _config(n_states=3, noise=[5], methods=["peel"])
        bad = tmp_path / "allerr.csv"
        write_results(run_experiment(cfg), bad)
        with pytest.raises(DataFormatError):
            plot(bad, x="noise", y="shd", group="method",
                 out_path=tmp_path / "x.svg")

    def test_constant_y_padded_axis(self, tmp_path):
        results = _results_fixture(tmp_path)
        # runtime_ms is identically zero without record_timing
        out = tmp_path / "flat.svg"
        plot(results, x="noise", y="runtime_ms", group="method", out_path=out)
        assert "<polyline" in out.read_text()
