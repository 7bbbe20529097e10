import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from connent import cli
from connent.cli import FLAGS, PRESETS, UsageError, parse


def usage(argv):
    with pytest.raises(UsageError) as info:
        parse(argv)
    return info.value


def test_no_arguments_prints_help():
    err = usage([])
    assert err.code == 0
    for name in PRESETS:
        assert name in str(err)


def test_f_curve_example(tmp_path):
    inv = parse(["f-curve", "--alpha", "0.1", "--alpha", "10", "--sweep", "n_c:1:20",
                 "--out", str(tmp_path / "f.csv")])
    assert inv.command == "f-curve"
    assert inv.config.alphas == (0.1, 10.0)
    assert inv.config.sweep.values == tuple(range(1, 21))
    assert inv.out.name == "f.csv"


def test_odd_n_names_the_flag():
    err = usage(["spin-chain", "--n", "99", "--sweep", "n_c:1:5"])
    assert err.code != 0
    assert "--n" in str(err)


@pytest.mark.parametrize("argv, flag", [
    (["spin-chain", "--n", "12", "--sweep", "n_c:1:9"], "--sweep"),
    (["spin-chain", "--seeds", "0"], "--seeds"),
    (["spin-random", "--weights", "1:x"], "--weights"),
    (["harmonic-chain", "--alpha", "-2"], "--alpha"),
    (["harmonic-chain", "--bond-convention", "triple"], "--bond-convention"),
    (["harmonic-chain", "--n", "ten"], "--n"),
    (["harmonic-chain", "--workers", "0"], "--workers"),
    (["spin-chain", "--optimal"], "--optimal"),
    (["harmonic-chain", "--bogus", "1"], "--bogus"),
])
def test_errors_name_offending_flag(argv, flag):
    err = usage(argv)
    assert err.code == 2
    assert flag in str(err)


def test_unknown_subcommand():
    err = usage(["spin-chian"])
    assert err.code == 2 and "spin-chian" in str(err)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_are_valid_and_help_lists_every_flag(name):
    inv = parse([name])
    assert inv.config.alphas == (1.0,)
    if inv.config.topology.startswith("bipartite"):
        assert inv.config.partition == "parity"
    elif inv.config.topology == "chain":
        assert inv.config.partition == "contiguous"
    text = str(usage([name, "--help"]))
    for flag, _, _ in FLAGS:
        assert flag in text


def test_spin_presets_use_hundred_seeds():
    for name, preset in PRESETS.items():
        if preset["model"] == "spin":
            assert parse([name]).config.seeds == 100


def test_every_flag_is_accepted_by_parse(tmp_path):
    cfg_file = tmp_path / "s.txt"
    cfg_file.write_text("seeds = 2\n")
    samples = {"--n": "100", "--alpha": "2", "--sweep": "n_c:1:2", "--seeds": "2", "--seed": "4",
               "--bond-convention": "single", "--partition": "contiguous",
               "--out": str(tmp_path / "o.csv"), "--boundary": "closed", "--topology": "chain",
               "--n-c": "1", "--c-p": "0.5", "--weights": "0:1", "--workers": "1",
               "--config": str(cfg_file)}
    for flag, _, kw in FLAGS:
        argv = ["harmonic-chain", flag] + ([] if kw.get("action") in ("store_true", "count")
                                           else [samples[flag]])
        if flag == "--optimal":
            argv += ["--sweep", "n:8:10:2"]
        elif flag != "--sweep":
            argv += ["--sweep", "n_c:1:2"]
        parse(argv)


def test_scenario_file(tmp_path):
    path = tmp_path / "scenario.txt"
    path.write_text("# spin chain sweep\nn = 8\nsweep = n_c:1:3\nseeds=5\n"
                    "alpha = 0.5, 2\nmonogamy = yes\n\n")
    inv = parse(["harmonic-chain", "--config", str(path), "--seeds", "7"])
    c = inv.config
    assert (c.n, c.sweep.values, c.seeds, c.alphas, c.monogamy) == (8, (1, 2, 3), 7, (0.5, 2.0), True)
    inv = parse(["harmonic-chain", "--config", str(path), "--alpha", "3"])
    assert inv.config.alphas == (3.0,)


@pytest.mark.parametrize("text", ["n 8\n", "colour = red\n", "monogamy = maybe\n"])
def test_scenario_file_errors(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    err = usage(["harmonic-chain", "--config", str(path)])
    assert err.code == 2 and "--config" in str(err)
    err = usage(["harmonic-chain", "--config", str(tmp_path / "absent.txt")])
    assert "--config" in str(err)


TOKENS = ["harmonic-chain", "spin-random", "f-curve", "--n", "--alpha", "--sweep", "--seeds",
          "--seed", "--partition", "--weights", "--n-c", "--c-p", "--normalize", "--workers",
          "--config", "--topology", "-v", "--help", "8", "-3", "0", "1e400", "nan", "n_c:1:3",
          "c_p:0:2", "n:1:9999999", "alpha:0:1", "0:1", "parity", "complete", "x", "", "=",
          "--out", "/nonexistent/dir/out.csv"]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.one_of(st.sampled_from(TOKENS), st.text(max_size=8)), max_size=8))
def test_parse_is_total(argv):
    try:
        inv = parse(argv)
    except UsageError as exc:
        assert exc.code in (0, 2)
        if exc.code:
            assert str(exc)
    else:
        assert inv.config.seeds >= 1


def test_main_writes_csv_and_metadata(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code = cli.main(["f-curve", "--alpha", "0.1", "--alpha", "10", "--sweep", "n_c:1:4",
                     "--normalize", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].endswith("normalized_mean") and len(lines) == 9
    meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert meta["measure"] == "f"
    assert "wrote" in capsys.readouterr().out


def test_main_stdout_and_exit_codes(capsys):
    assert cli.main(["harmonic-scaling", "--sweep", "n:10:20:10", "--topology", "complete",
                     "--bond-convention", "double"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].startswith("alpha,sweep_value,mean")
    assert cli.main(["spin-chain", "--n", "99"]) == 2
    assert "--n" in capsys.readouterr().err
    assert cli.main([]) == 0


def test_main_reports_unwritable_destination(capsys):
    code = cli.main(["f-curve", "--sweep", "n_c:1:2", "--out", "/nonexistent/dir/out.csv"])
    assert code == 1
    assert "/nonexistent/dir/out.csv" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "connent", "harmonic-chain", "--n", "7"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    assert "--n" in res.stderr
