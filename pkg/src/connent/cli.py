"""Command-line front door: ``connent <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .experiments import (
    ConfigError, ScenarioConfig, Sweep, aggregate, csv_text, emit_csv, emit_metadata,
    normalize, run_scenario,
)

# Defaults per subcommand: the headline settings of each scenario.
PRESETS = {
    "harmonic-chain": dict(
        help="harmonic chain, log-negativity vs neighbors per side",
        model="harmonic", topology="chain", boundary="open", n=100,
        sweep="n_c:1:99", seeds=1, partition="contiguous"),
    "harmonic-bipartite": dict(
        help="random bipartite harmonic graph, log-negativity vs edge probability",
        model="harmonic", topology="bipartite_random", n=100,
        sweep="c_p:0.05:1:0.05", seeds=100, partition="parity"),
    "harmonic-scaling": dict(
        help="closed harmonic chain, log-negativity vs system size",
        model="harmonic", topology="chain", boundary="closed", n=20, n_c=1,
        sweep="n:10:200:10", seeds=1, partition="contiguous"),
    "spin-chain": dict(
        help="XX closed chain with random couplings, entropy vs neighbors per side",
        model="spin", topology="chain", boundary="closed", n=14,
        sweep="n_c:1:7", seeds=100, partition="contiguous"),
    "spin-random": dict(
        help="XX random graph, entropy, energy and degeneracy vs edge probability",
        model="spin", topology="random", n=10,
        sweep="c_p:0:1:0.1", seeds=100, partition="contiguous"),
    "spin-bipartite": dict(
        help="XX regular bipartite graph, entropy vs connectivity",
        model="spin", topology="bipartite_regular", n=14,
        sweep="n_c:1:3", seeds=100, partition="parity"),
    "monogamy-gaussian": dict(
        help="regular bipartite harmonic graph, log-negativity and Gaussian tangle budget",
        model="harmonic", topology="bipartite_regular", n=90,
        sweep="n_c:1:22", seeds=1, partition="parity", monogamy=True),
    "monogamy-spin": dict(
        help="regular bipartite XX graph, entropy and qubit tangle budget",
        model="spin", topology="bipartite_regular", n=14,
        sweep="n_c:1:3", seeds=100, partition="parity", monogamy=True),
    "f-curve": dict(
        help="asymptotic bipartite integral f(alpha, n_c) vs n_c",
        model="harmonic", topology="bipartite_regular", n=100, measure="f",
        sweep="n_c:1:20", seeds=1, partition="parity"),
}

# (flag, config field, argparse kwargs). Drives both parsing and help.
FLAGS = [
    ("--n", "n", dict(type=int, help="number of sites")),
    ("--alpha", "alphas", dict(type=float, action="append",
                               help="harmonic coupling constant (repeatable; default 1)")),
    ("--sweep", "sweep", dict(help="swept parameter as name:lo:hi[:step], name in n_c, c_p, n, alpha")),
    ("--seeds", "seeds", dict(type=int, help="replicas per sweep point")),
    ("--seed", "base_seed", dict(type=int, help="base seed (default 0)")),
    ("--bond-convention", "bond_convention", dict(choices=["single", "double"],
                                                  help="count each ring bond once or per offset")),
    ("--partition", "partition", dict(choices=["contiguous", "parity"],
                                      help="half/half split: first half vs rest, or even vs odd sites")),
    ("--out", None, dict(help="CSV output path (default: print CSV to stdout)")),
    ("--normalize", None, dict(action="store_true",
                               help="add a column with each alpha series divided by its maximum")),
    ("--boundary", "boundary", dict(choices=["open", "closed"], help="chain boundary condition")),
    ("--topology", "topology", dict(
        choices=["chain", "random", "bipartite_random", "bipartite_regular", "complete"],
        help="coupling topology")),
    ("--n-c", "n_c", dict(type=int, help="neighbors per side when n_c is not swept")),
    ("--c-p", "c_p", dict(type=float, help="edge probability when c_p is not swept")),
    ("--weights", "weight_interval", dict(help="spin coupling interval lo:hi (default 0:1)")),
    ("--optimal", "optimize_n_c", dict(action="store_true",
                                       help="report the best n_c for each point (harmonic chains)")),
    ("--monogamy", "monogamy", dict(action="store_true", help="also compute monogamy budgets")),
    ("--workers", None, dict(type=int, help="worker processes (default 1)")),
    ("--config", None, dict(help="scenario file of key=value lines mirroring these flags")),
    ("--verbose", None, dict(action="count", help="print progress; repeat for more")),
]
FIELD_TO_FLAG = {f: flag for flag, f, _ in FLAGS if f}
FIELD_TO_FLAG.update({"model": "<subcommand>", "measure": "<subcommand>"})


class UsageError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}".rstrip(), 2)

    def exit(self, status=0, message=None):
        raise UsageError((message or "").rstrip(), status)

    def print_help(self, file=None):
        raise UsageError(self.format_help().rstrip(), 0)


def build_parser() -> _Parser:
    top = _Parser(prog="connent", description=(
        "Ground-state entanglement versus connectivity for coupled harmonic "
        "oscillators and XX spin-1/2 systems."))
    top.add_argument("--version", action="version", version=f"connent {__version__}")
    sub = top.add_subparsers(dest="command", metavar="<subcommand>", parser_class=_Parser)
    for name, preset in PRESETS.items():
        p = sub.add_parser(name, help=preset["help"], description=preset["help"])
        for flag, _, kw in FLAGS:
            p.add_argument(flag, **kw)
        p.add_argument("-v", dest="verbose", action="count", help="same as --verbose")
    return top


@dataclass(frozen=True)
class ParsedInvocation:
    command: str
    config: ScenarioConfig
    out: Path | None
    verbosity: int = 0
    normalize: bool = False
    workers: int = 1


def read_scenario_file(path: str) -> list[str]:
    """Turn ``key=value`` lines into flag tokens; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"argument --config: cannot read {path}: {exc.strerror or exc}")
    known = {flag for flag, _, _ in FLAGS} - {"--config"}
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"argument --config: {path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if flag not in known:
            raise UsageError(f"argument --config: {path}:{lineno}: unknown key {key!r}")
        kw = next(k for f, _, k in FLAGS if f == flag)
        if kw.get("action") in ("store_true", "count"):
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() not in ("0", "false", "no", "off", ""):
                raise UsageError(f"argument --config: {path}:{lineno}: {key} expects true/false")
        elif kw.get("action") == "append":
            for v in value.split(","):
                tokens += [flag, v.strip()]
        else:
            tokens += [flag, value]
    return tokens


def _weights(text: str) -> tuple:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError("weight_interval", f"weights must look like lo:hi, got {text!r}") from None
    return lo, hi


def parse(argv) -> ParsedInvocation:
    """Validate ``argv`` into a :class:`ParsedInvocation` or raise :class:`UsageError`."""
    argv = [str(a) for a in argv]
    parser = build_parser()
    if not argv:
        raise UsageError(parser.format_help().rstrip(), 0)
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError(parser.format_help().rstrip(), 0)

    if ns.config:
        file_tokens = read_scenario_file(ns.config)
        if ns.alpha:
            file_tokens = _drop_flag(file_tokens, "--alpha")
        sub_ns = parser.parse_args([ns.command] + file_tokens)
        for key, value in vars(ns).items():
            if value is not None and value is not False:
                setattr(sub_ns, key, value)
        ns = sub_ns

    preset = PRESETS[ns.command]
    try:
        values = {k: v for k, v in preset.items() if k != "help"}
        for flag, field, _ in FLAGS:
            if field is None:
                continue
            given = getattr(ns, flag[2:].replace("-", "_"))
            if given is None or given is False:
                continue
            if field == "sweep":
                values["sweep"] = given
            elif field == "alphas":
                values["alphas"] = tuple(given)
            elif field == "weight_interval":
                values["weight_interval"] = _weights(given)
            else:
                values[field] = given
        values["sweep"] = Sweep.parse(values["sweep"])
        cfg = ScenarioConfig(**values).validate()
    except ConfigError as exc:
        flag = FIELD_TO_FLAG.get(exc.field, exc.field)
        raise UsageError(f"connent {ns.command}: error: argument {flag}: {exc}") from None

    workers = ns.workers if ns.workers is not None else 1
    if workers < 1:
        raise UsageError(f"connent {ns.command}: error: argument --workers: must be >= 1, got {workers}")
    return ParsedInvocation(
        command=ns.command,
        config=cfg,
        out=Path(ns.out) if ns.out else None,
        verbosity=ns.verbose or 0,
        normalize=bool(ns.normalize),
        workers=workers,
    )


def _drop_flag(tokens, flag):
    out, skip = [], False
    for t in tokens:
        if skip:
            skip = False
            continue
        if t == flag:
            skip = True
            continue
        out.append(t)
    return out


def _summary(aggs) -> str:
    lines = [f"{'alpha':>8} {'value':>10} {'mean':>12} {'max':>12} {'stddev':>10} {'seeds':>6}"]
    for a in aggs:
        alpha = "-" if a.alpha is None else f"{a.alpha:g}"
        lines.append(f"{alpha:>8} {a.sweep_value:>10g} {a.mean:>12.6g} {a.max:>12.6g} "
                     f"{a.stddev:>10.3g} {a.n_seeds:>6d}")
    return "\n".join(lines)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse(argv)
    except UsageError as exc:
        stream = sys.stdout if exc.code == 0 else sys.stderr
        if str(exc):
            print(str(exc), file=stream)
        return exc.code

    cfg = inv.config
    progress = None
    if inv.verbosity:
        def progress(done, total, rec):
            if inv.verbosity > 1 or done == total or done % max(1, total // 20) == 0:
                print(f"[{done}/{total}] {cfg.sweep.name}={rec.sweep_value}", flush=True)

    records = run_scenario(cfg, workers=inv.workers, progress=progress)
    failures = [r for r in records if r.error]
    for r in failures[:5]:
        print(f"warning: {cfg.sweep.name}={r.sweep_value} replica {r.replica}: {r.error}",
              file=sys.stderr)
    aggs = aggregate(records)

    if inv.out is None:
        sys.stdout.write(csv_text(normalize(aggs) if inv.normalize else aggs, inv.normalize))
        return 0
    try:
        emit_csv(aggs, inv.out, normalized=inv.normalize)
        emit_metadata(cfg, inv.out.with_name(inv.out.name + ".meta.json"))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_summary(aggs))
    print(f"wrote {inv.out} ({len(aggs)} rows, {len(failures)} failed records)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
