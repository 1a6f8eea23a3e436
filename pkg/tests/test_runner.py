"""Tests for config parsing, batch execution, CSV output and the CLI."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decolab.cli import main
from decolab.errors import ConfigError
from decolab.runner import (
    RunConfig, parse_config, emit_config, execute,
    read_trace_csv, write_trace_csv, summarize, format_summary_table, fit_exponent,
)
from decolab.localization import ObservableTrace

CHARGE_CFG = """\
# quick superselection sweep
[charge-shells]
seed = 7
shells = 200
overlap = 0.95
"""


# ---------------------------------------------------------------- parsing

def test_parse_minimal_config():
    runs = parse_config(CHARGE_CFG)
    assert len(runs) == 1
    cfg = runs[0]
    assert cfg.scenario == "charge-shells"
    assert cfg.seed == 7
    assert cfg.parameters["shells"] == 200
    assert cfg.parameters["overlap"] == 0.95
    assert cfg.parameters["n_charges"] == 2  # default filled in


def test_parse_multiple_sections():
    runs = parse_config("[charge-shells]\nshells = 10\n[born-chain]\nruns = 100\n")
    assert [r.scenario for r in runs] == ["charge-shells", "born-chain"]


def test_parse_error_messages_name_lines():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("[no-such-scenario]\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("[charge-shells]\nnonsense\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("shells = 10\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("[charge-shells]\nwrong_name = 3\n")
    with pytest.raises(ConfigError):
        parse_config("")


def test_parse_rejects_out_of_bounds_values():
    with pytest.raises(ConfigError, match="out of bounds"):
        parse_config("[charge-shells]\noverlap = 1.5\n")
    with pytest.raises(ConfigError, match="out of bounds"):
        parse_config("[two-slit]\nlambda = -1.0\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config("[charge-shells]\nshells = many\n")


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("no-such", {})
    with pytest.raises(ConfigError):
        RunConfig("charge-shells", {"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig("charge-shells", {}, seed=-1)
    with pytest.raises(ConfigError):
        RunConfig("charge-shells", {}, record_stride=0)


def test_emit_parse_roundtrip_including_inf():
    cfg = RunConfig("two-slit", {"mass": math.inf, "lambda": 0.5}, seed=3,
                    record_stride=5)
    text = emit_config(cfg)
    back = parse_config(text)[0]
    assert back.scenario == cfg.scenario
    assert back.seed == 3 and back.record_stride == 5
    assert back.parameters == cfg.parameters


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**64 - 1),
       shells=st.integers(0, 10_000),
       overlap=st.floats(0.0, 1.0),
       stride=st.integers(1, 500))
def test_roundtrip_property(seed, shells, overlap, stride):
    cfg = RunConfig("charge-shells", {"shells": shells, "overlap": overlap},
                    seed=seed, record_stride=stride)
    back = parse_config(emit_config(cfg))[0]
    assert back.seed == cfg.seed
    assert back.record_stride == cfg.record_stride
    assert back.parameters == cfg.parameters


# ---------------------------------------------------------------- CSV I/O

def _toy_trace():
    tr = ObservableTrace()
    for i in range(5):
        tr.append(0.1 * i if i else 0.0, {"y": math.exp(-0.1 * i), "z": float(i)})
    return tr


def test_csv_roundtrip(tmp_path):
    path = str(tmp_path / "trace.csv")
    write_trace_csv(path, "time", _toy_trace())
    header, data = read_trace_csv(path)
    assert header == ["time", "y", "z"]
    assert data.shape == (5, 3)
    assert data[3, 1] == pytest.approx(math.exp(-0.3), abs=1e-16)


def test_fit_exponent_recovers_rate():
    t = np.linspace(0.0, 2.0, 50)
    k, resid = fit_exponent(t, np.exp(-1.7 * t))
    assert k == pytest.approx(1.7, abs=1e-10)
    assert resid < 1e-12
    with pytest.raises(ValueError):
        fit_exponent(t, np.exp(-t), window=(5.0, 6.0))


def test_summarize_and_schema_mismatch(tmp_path):
    p1 = str(tmp_path / "a.csv")
    p2 = str(tmp_path / "b.csv")
    write_trace_csv(p1, "time", _toy_trace())
    write_trace_csv(p2, "time", _toy_trace())
    rows = summarize([p1, p2], column="y")
    assert len(rows) == 2
    assert rows[0].exponent == pytest.approx(1.0, abs=1e-10)
    table = format_summary_table(rows)
    assert "ratio_vs_first" in table and "1" in table
    assert format_summary_table([]) == "no traces\n"

    other = ObservableTrace()
    other.append(0.0, {"different": 1.0})
    other.append(1.0, {"different": 0.5})
    p3 = str(tmp_path / "c.csv")
    write_trace_csv(p3, "time", other)
    with pytest.raises(ValueError, match="schema mismatch"):
        summarize([p1, p3])


# ---------------------------------------------------------------- execution

def test_execute_writes_trace_and_report(tmp_path, monkeypatch):
    monkeypatch.setenv("DECOLAB_OUTDIR", str(tmp_path))
    cfg = parse_config(CHARGE_CFG)[0]
    report = execute(cfg, index=0)
    assert report.audit["trace_drift"] < 1e-12
    header, data = read_trace_csv(report.trace_path)
    assert header[0] == "shell"
    with open(report.trace_path + ".report.json") as fh:
        on_disk = json.load(fh)
    assert on_disk["scenario"] == "charge-shells"
    assert on_disk["seed"] == 7


def test_execute_is_bytewise_deterministic(tmp_path, monkeypatch):
    cfg = parse_config("[born-chain]\nseed = 11\nruns = 20000\n")[0]
    blobs = []
    for sub in ("one", "two"):
        outdir = tmp_path / sub
        outdir.mkdir()
        monkeypatch.setenv("DECOLAB_OUTDIR", str(outdir))
        report = execute(cfg, index=0)
        with open(report.trace_path, "rb") as fh:
            blobs.append(fh.read())
    assert blobs[0] == blobs[1]


def test_execute_seed_override_changes_samples(tmp_path, monkeypatch):
    monkeypatch.setenv("DECOLAB_OUTDIR", str(tmp_path))
    cfg = parse_config("[born-chain]\nseed = 11\nruns = 20000\n")[0]
    r1 = execute(cfg, index=0)
    r2 = execute(cfg, index=1, seed_override=12)
    assert r2.config.seed == 12
    assert r1.summary["max_abs_deviation"] != r2.summary["max_abs_deviation"]


# ---------------------------------------------------------------- CLI

def test_cli_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    assert "two-slit" in out and "born-chain" in out


def test_cli_run_success(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CHARGE_CFG)
    monkeypatch.setenv("DECOLAB_OUTDIR", str(tmp_path))
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "charge-shells" in out


def test_cli_run_missing_file_is_config_error(capsys):
    assert main(["run", "/no/such/file.cfg"]) == 2


def test_cli_run_bad_config_is_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[charge-shells]\noverlap = 2.0\n")
    assert main(["run", str(cfg)]) == 2
    assert "out of bounds" in capsys.readouterr().err


def test_cli_run_precondition_failure_is_exit_3(tmp_path, monkeypatch, capsys):
    # a bath too narrow for its own linewidth must refuse to run
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text("[decay-cavity]\nn_modes = 9\ncoupling = 1.0\n")
    monkeypatch.setenv("DECOLAB_OUTDIR", str(tmp_path))
    assert main(["run", str(cfg)]) == 3
    err = capsys.readouterr().err
    assert "precondition" in err
    assert "config echo" in err  # failing run is echoed for reproduction


def test_cli_summarize(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "two.cfg"
    cfg.write_text(
        "[two-slit]\nn_points = 64\nt_final = 0.2\npacket_width = 0.1\n"
        "slit_separation = 0.5\nlambda = 1.0\n"
        "[two-slit]\nn_points = 64\nt_final = 0.2\npacket_width = 0.1\n"
        "slit_separation = 0.5\nlambda = 2.0\n"
    )
    monkeypatch.setenv("DECOLAB_OUTDIR", str(tmp_path))
    assert main(["run", str(cfg)]) == 0
    traces = sorted(str(p) for p in tmp_path.glob("two-slit-*.csv"))
    assert len(traces) == 2
    assert main(["summarize", "--column", "visibility", *traces]) == 0
    out = capsys.readouterr().out
    assert "ratio_vs_first" in out
    # doubling lambda doubles the fitted exponent
    ratio = float(out.strip().splitlines()[-1].split()[-1])
    assert ratio == pytest.approx(2.0, abs=0.05)


def test_cli_summarize_no_traces(capsys):
    assert main(["summarize"]) == 0
    assert capsys.readouterr().out == "no traces\n"
