"""Seeded scenario runner, aggregation and CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gaussian, graph, spin
from .gaussian import TANGLE_PROXY_NOTE

MODELS = ("spin", "harmonic")
TOPOLOGIES = ("chain", "random", "bipartite_random", "bipartite_regular", "complete")
SWEEPS = ("n_c", "c_p", "n", "alpha")
MEASURES = ("entanglement", "f")
INT_SWEEPS = ("n_c", "n")
# spin degeneracy from full spectra up to this size, otherwise a lower bound
FULL_DEGENERACY_MAX_N = 10
# dense harmonic matrices beyond this are impractical
MAX_HARMONIC_N = 5000

CSV_COLUMNS = (
    "alpha", "sweep_value", "mean", "max", "stddev", "n_seeds", "filtered_mean",
    "energy_mean", "degeneracy_mean", "monogamy_lhs_mean", "monogamy_rhs_mean",
)


class ConfigError(ValueError):
    """Invalid scenario; ``field`` names the offending config field."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class Sweep:
    name: str
    values: tuple

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        """``name:lo:hi[:step]``, inclusive of ``hi``."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError("sweep", f"sweep must look like name:lo:hi[:step], got {text!r}")
        name = parts[0].strip()
        if name not in SWEEPS:
            raise ConfigError("sweep", f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEPS)}")
        try:
            lo, hi = float(parts[1]), float(parts[2])
            step = float(parts[3]) if len(parts) == 4 else None
        except ValueError:
            raise ConfigError("sweep", f"non-numeric sweep bounds in {text!r}") from None
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ConfigError("sweep", f"sweep needs finite lo <= hi, got {text!r}")
        if step is None:
            step = 1.0 if name in INT_SWEEPS else ((hi - lo) / 10.0 or 1.0)
        if not (math.isfinite(step) and step > 0):
            raise ConfigError("sweep", f"sweep step must be positive, got {step}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        if count > 100000:
            raise ConfigError("sweep", f"sweep has {count} points; refusing more than 100000")
        raw = [lo + i * step for i in range(count)]
        if name in INT_SWEEPS:
            if any(abs(v - round(v)) > 1e-9 for v in raw):
                raise ConfigError("sweep", f"{name} sweep must use integer values, got {text!r}")
            values = tuple(int(round(v)) for v in raw)
        else:
            values = tuple(float(f"{v:.12g}") for v in raw)
        return cls(name, values)

    def __str__(self):
        return f"{self.name}[{', '.join(str(v) for v in self.values)}]"


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    topology: str
    n: int
    sweep: Sweep
    alphas: tuple = (1.0,)
    weight_interval: tuple = (0.0, 1.0)
    seeds: int = 100
    base_seed: int = 0
    partition: str = "contiguous"
    bond_convention: str = "single"
    boundary: str = "closed"
    n_c: int = 1
    c_p: float = 0.5
    monogamy: bool = False
    measure: str = "entanglement"
    optimize_n_c: bool = False

    def series(self) -> tuple:
        if self.model == "spin" or self.sweep.name == "alpha":
            return (None,)
        return tuple(self.alphas)

    def point_params(self, value, alpha) -> dict:
        p = {"n": self.n, "n_c": self.n_c, "c_p": self.c_p, "alpha": alpha}
        p[self.sweep.name] = value
        return p

    def validate(self) -> "ScenarioConfig":
        if self.model not in MODELS:
            raise ConfigError("model", f"unknown model {self.model!r}")
        if self.topology not in TOPOLOGIES:
            raise ConfigError("topology", f"unknown topology {self.topology!r}")
        if self.measure not in MEASURES:
            raise ConfigError("measure", f"unknown measure {self.measure!r}")
        if self.partition not in ("contiguous", "parity"):
            raise ConfigError("partition", f"unknown partition {self.partition!r}")
        if self.bond_convention not in ("single", "double"):
            raise ConfigError("bond_convention", f"unknown bond convention {self.bond_convention!r}")
        if self.boundary not in ("open", "closed"):
            raise ConfigError("boundary", f"unknown boundary {self.boundary!r}")
        if self.seeds < 1:
            raise ConfigError("seeds", f"need at least one seed, got {self.seeds}")
        if self.base_seed < 0:
            raise ConfigError("base_seed", f"base seed must be >= 0, got {self.base_seed}")
        if not self.sweep.values:
            raise ConfigError("sweep", "sweep has no values")
        lo, hi = self.weight_interval
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ConfigError("weight_interval", f"need finite lo <= hi, got [{lo}, {hi}]")
        if self.model == "spin":
            if self.sweep.name == "alpha":
                raise ConfigError("sweep", "spin scenarios have no alpha to sweep")
            if self.measure == "f":
                raise ConfigError("measure", "the f-curve measure is harmonic-only")
        else:
            if not self.alphas and self.sweep.name != "alpha":
                raise ConfigError("alphas", "need at least one alpha")
            for a in self.alphas:
                if not (math.isfinite(a) and a >= 0):
                    raise ConfigError("alphas", f"alpha must be finite and >= 0, got {a}")
            if self.sweep.name == "alpha" and any(a < 0 for a in self.sweep.values):
                raise ConfigError("sweep", "alpha sweep values must be >= 0")
        if self.optimize_n_c and (self.model != "harmonic" or self.topology != "chain"):
            raise ConfigError("optimize_n_c", "n_c optimization applies to harmonic chains only")
        if self.monogamy and self.measure == "f":
            raise ConfigError("monogamy", "monogamy budgets need a state; not available for f-curves")

        if self.measure == "f":
            if self.sweep.name not in ("n_c", "alpha"):
                raise ConfigError("sweep", "f-curves sweep n_c or alpha")
            for a in self._alpha_values():
                if not a > 0:
                    raise ConfigError("alphas", f"f-curves need alpha > 0, got {a}")
            for v in self.sweep.values:
                nc = self.point_params(v, None)["n_c"]
                if nc < 1:
                    raise ConfigError("sweep", f"n_c must be >= 1, got {nc}")
            return self

        for v in self.sweep.values:
            p = self.point_params(v, None)
            n = p["n"]
            n_field = "sweep" if self.sweep.name == "n" else "n"
            if n < 2 or n % 2:
                raise ConfigError(n_field, f"half/half partitions need an even n >= 2, got {n}")
            if self.model == "spin" and n > spin.MAX_SITES:
                raise ConfigError(n_field, f"spin scenarios support n <= {spin.MAX_SITES}, got {n}")
            if self.model == "harmonic" and n > MAX_HARMONIC_N:
                raise ConfigError(n_field, f"harmonic scenarios support n <= {MAX_HARMONIC_N}, got {n}")
            if self.monogamy and n < 3:
                raise ConfigError(n_field, "monogamy budgets need n >= 3")
            try:
                build_topology(self, p, np.random.default_rng(0))
            except ValueError as exc:
                msg = str(exc)
                if self.sweep.name in ("n_c", "c_p") and self.sweep.name in msg:
                    raise ConfigError("sweep", msg) from None
                for name in ("n_c", "c_p"):
                    if name in msg:
                        raise ConfigError(name, msg) from None
                raise ConfigError(n_field, msg) from None
        return self

    def _alpha_values(self):
        if self.sweep.name == "alpha":
            return self.sweep.values
        return self.alphas


@dataclass(frozen=True)
class RunRecord:
    config: ScenarioConfig = field(repr=False)
    alpha: float | None
    sweep_value: float
    replica: int
    seed: int
    entanglement: float = float("nan")
    energy: float = float("nan")
    degeneracy: float = 0.0
    degenerate: bool = False
    monogamy_lhs: float | None = None
    monogamy_rhs: float | None = None
    n_c_opt: int | None = None
    error: str | None = None

    @property
    def monogamy_residual(self) -> float | None:
        if self.monogamy_lhs is None or self.monogamy_rhs is None:
            return None
        return self.monogamy_lhs - self.monogamy_rhs


def child_seed(base_seed: int, value_index: int, replica: int) -> np.random.SeedSequence:
    """Seed for one (sweep point, replica); independent of grid size and order."""
    return np.random.SeedSequence(base_seed, spawn_key=(value_index, replica))


def build_topology(cfg: ScenarioConfig, p: dict, rng) -> graph.CouplingGraph:
    n, n_c, c_p = p["n"], int(p["n_c"]), float(p["c_p"])
    if cfg.topology == "chain":
        return graph.build_chain(n, n_c, cfg.boundary, cfg.bond_convention)
    if cfg.topology == "random":
        return graph.build_random(n, c_p, rng)
    if cfg.topology == "bipartite_random":
        return graph.build_bipartite_random(n, c_p, rng)
    if cfg.topology == "bipartite_regular":
        return graph.build_bipartite_regular(n, n_c)
    return graph.complete(n, cfg.bond_convention)


def _harmonic_point(cfg, p, g, mask) -> dict:
    gs = gaussian.ground_state(gaussian.build_potential(g, p["alpha"]))
    out = {
        "entanglement": gaussian.log_negativity(gs, mask),
        # zero-point energy: half the sum of normal-mode frequencies
        "energy": 0.5 * float(np.trace(gs.gamma_p)),
    }
    if cfg.monogamy:
        b = gaussian.monogamy_budget(gs, 0)
        out["monogamy_lhs"], out["monogamy_rhs"] = b.lhs, b.rhs
    return out


def _spin_point(cfg, g, mask, rng) -> dict:
    lo, hi = cfg.weight_interval
    g = graph.assign_random_weights(g, rng, lo, hi)
    state = spin.ground_state(g)
    if g.n <= FULL_DEGENERACY_MAX_N:
        deg = spin.degeneracy(g)
    else:
        deg = state.multiplicity - 1
    out = {
        "entanglement": spin.half_entropy(state, mask),
        "energy": state.energy,
        "degeneracy": float(deg),
        "degenerate": deg > 0,
    }
    if cfg.monogamy:
        out["monogamy_lhs"], out["monogamy_rhs"] = spin.monogamy_budget_spin(state, 0)
    return out


def run_point(cfg: ScenarioConfig, alpha, value_index: int, replica: int) -> RunRecord:
    """One data point; depends only on its arguments."""
    value = cfg.sweep.values[value_index]
    if cfg.sweep.name == "alpha":
        alpha = value
    ss = child_seed(cfg.base_seed, value_index, replica)
    seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    base = RunRecord(cfg, alpha, value, replica, seed)
    p = cfg.point_params(value, alpha)
    try:
        if cfg.measure == "f":
            return replace(base, entanglement=gaussian.f_value(alpha, int(p["n_c"])))
        rng = np.random.default_rng(ss)
        mask = graph.half_partition(p["n"], cfg.partition)
        if cfg.optimize_n_c:
            best, best_nc = -1.0, None
            for nc in range(1, p["n"] // 2 + 1):
                g = graph.build_chain(p["n"], nc, cfg.boundary, cfg.bond_convention)
                res = _harmonic_point(cfg, dict(p, n_c=nc), g, mask)
                if res["entanglement"] > best:
                    best, best_nc, best_res = res["entanglement"], nc, res
            return replace(base, n_c_opt=best_nc, **best_res)
        g = build_topology(cfg, p, rng)
        if cfg.model == "harmonic":
            return replace(base, **_harmonic_point(cfg, p, g, mask))
        return replace(base, **_spin_point(cfg, g, mask, rng))
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        return replace(base, error=f"{type(exc).__name__}: {exc}")


def _jobs(cfg: ScenarioConfig):
    for alpha in cfg.series():
        for vi in range(len(cfg.sweep.values)):
            for r in range(cfg.seeds):
                yield alpha, vi, r


def _run_job(args):
    cfg, alpha, vi, r = args
    return run_point(cfg, alpha, vi, r)


def run_scenario(cfg: ScenarioConfig, workers: int = 1, progress=None) -> list[RunRecord]:
    """Evaluate every (alpha series, sweep value, replica); records come back in that order."""
    cfg.validate()
    jobs = [(cfg, a, vi, r) for a, vi, r in _jobs(cfg)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            it = pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (8 * workers)))
            records = []
            for rec in it:
                records.append(rec)
                if progress:
                    progress(len(records), len(jobs), rec)
            return records
    records = []
    for job in jobs:
        records.append(_run_job(job))
        if progress:
            progress(len(records), len(jobs), records[-1])
    return records


@dataclass(frozen=True)
class Aggregate:
    alpha: float | None
    sweep_value: float
    mean: float
    max: float
    stddev: float
    n_seeds: int
    filtered_mean: float | None
    energy_mean: float | None
    degeneracy_mean: float
    monogamy_lhs_mean: float | None = None
    monogamy_rhs_mean: float | None = None
    normalized_mean: float | None = None


def _mean_or_none(xs):
    xs = [x for x in xs if x is not None]
    return float(np.mean(xs)) if xs else None


def aggregate(records: Iterable[RunRecord]) -> list[Aggregate]:
    """Statistics per (alpha, sweep value), in first-seen order. Failed records are skipped."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.alpha, rec.sweep_value), []).append(rec)
    out = []
    for (alpha, value), recs in groups.items():
        ok = [r for r in recs if r.error is None]
        ent = np.array([r.entanglement for r in ok], dtype=float)
        clean = [r.entanglement for r in ok if not r.degenerate]
        out.append(Aggregate(
            alpha=alpha,
            sweep_value=value,
            mean=float(ent.mean()) if ok else float("nan"),
            max=float(ent.max()) if ok else float("nan"),
            stddev=float(ent.std()) if ok else float("nan"),
            n_seeds=len(ok),
            filtered_mean=float(np.mean(clean)) if clean else None,
            energy_mean=_mean_or_none([r.energy for r in ok if math.isfinite(r.energy)]),
            degeneracy_mean=float(np.mean([r.degeneracy for r in ok])) if ok else float("nan"),
            monogamy_lhs_mean=_mean_or_none([r.monogamy_lhs for r in ok]),
            monogamy_rhs_mean=_mean_or_none([r.monogamy_rhs for r in ok]),
        ))
    return out


def normalize(aggs: Sequence[Aggregate]) -> list[Aggregate]:
    """Divide each alpha series by its own maximum mean."""
    peak: dict = {}
    for a in aggs:
        if math.isfinite(a.mean):
            peak[a.alpha] = max(peak.get(a.alpha, -math.inf), a.mean)
    out = []
    for a in aggs:
        top = peak.get(a.alpha)
        val = a.mean / top if top not in (None, 0.0) and math.isfinite(a.mean) else None
        out.append(replace(a, normalized_mean=val))
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def csv_text(aggs: Sequence[Aggregate], normalized: bool = False) -> str:
    cols = CSV_COLUMNS + (("normalized_mean",) if normalized else ())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for a in aggs:
        w.writerow([_fmt(getattr(a, c)) for c in cols])
    return buf.getvalue()


def emit_csv(aggs: Sequence[Aggregate], destination, normalized: bool = False) -> Path:
    """Write aggregates as CSV (12 significant digits, fixed column order)."""
    if normalized:
        aggs = normalize(aggs)
    path = Path(destination)
    try:
        path.write_text(csv_text(aggs, normalized))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(source) -> list[Aggregate]:
    def num(s, kind=float):
        return None if s == "" else kind(s)

    rows = list(csv.DictReader(io.StringIO(Path(source).read_text())))
    out = []
    for r in rows:
        out.append(Aggregate(
            alpha=num(r["alpha"]),
            sweep_value=num(r["sweep_value"]),
            mean=num(r["mean"]),
            max=num(r["max"]),
            stddev=num(r["stddev"]),
            n_seeds=num(r["n_seeds"], int),
            filtered_mean=num(r["filtered_mean"]),
            energy_mean=num(r["energy_mean"]),
            degeneracy_mean=num(r["degeneracy_mean"]),
            monogamy_lhs_mean=num(r["monogamy_lhs_mean"]),
            monogamy_rhs_mean=num(r["monogamy_rhs_mean"]),
            normalized_mean=num(r.get("normalized_mean", "")),
        ))
    return out


def scenario_metadata(cfg: ScenarioConfig) -> dict:
    meta = asdict(cfg)
    meta["sweep"] = {"name": cfg.sweep.name, "values": list(cfg.sweep.values)}
    notes = []
    if cfg.model == "harmonic" and cfg.monogamy:
        notes.append(TANGLE_PROXY_NOTE)
    if cfg.model == "spin":
        notes.append("spin sizes are desk-scale (n <= 16); default spin scenarios use n = 14")
        if any(cfg.point_params(v, None)["n"] > FULL_DEGENERACY_MAX_N for v in cfg.sweep.values):
            notes.append(f"degeneracy for n > {FULL_DEGENERACY_MAX_N} counts only the two lowest "
                         "levels per sector (lower bound)")
        notes.append("energy is the total ground energy with each edge summed once")
    if cfg.measure == "f":
        notes.append("mean column holds f(alpha, n_c); N_l ~ n / (4 pi) * f")
    meta["notes"] = notes
    return meta


def emit_metadata(cfg: ScenarioConfig, destination) -> Path:
    path = Path(destination)
    path.write_text(json.dumps(scenario_metadata(cfg), indent=2, sort_keys=True) + "\n")
    return path
