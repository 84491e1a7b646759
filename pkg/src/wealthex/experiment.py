"""Realization orchestration, aggregation, sweeps and CSV export."""

from __future__ import annotations

import hashlib
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import SimConfig, write_config
from .engine import ADDITIVE, run
from .fitting import (BULK_SPAN, FIT_CSV_HEADER, FitResult, fit_exponential, fit_power_law,
                      fit_scaling, min_exchanges)
from .metrics import WealthHistogram
from .netgen import Topology, components, fully_connected, random_network

log = logging.getLogger(__name__)

NET_STREAM = 0
DYN_STREAM = 1


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream identified by ``key`` under the master seed.

    Streams are ``SeedSequence(seed, spawn_key=key)``; a realization ``r``
    wires its network from key ``(..., r, 0)`` and runs its dynamics from
    ``(..., r, 1)``.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def value_key(param: str, value) -> int:
    """Stable 63-bit key for a sweep row, independent of its position in the sweep."""
    digest = hashlib.sha256(f"{param}={value!r}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def build_topology(cfg: SimConfig, r: int, key: tuple[int, ...] = ()) -> Topology:
    if cfg.fully_connected:
        return fully_connected(cfg.n)
    rr = 0 if cfg.reuse_network else r
    return random_network(cfg.n, cfg.k_max, stream(cfg.seed, *key, rr, NET_STREAM), cfg.retries)


@dataclass
class Realization:
    index: int
    times: np.ndarray
    entropy: np.ndarray
    poverty: np.ndarray
    snapshots: dict[int, np.ndarray]
    t_c: int | None
    mean_degree: float
    totals: list[int]
    final_t: int


def run_realization(cfg: SimConfig, r: int, key: tuple[int, ...] = ()) -> Realization:
    topo = build_topology(cfg, r, key)
    snaps = set(cfg.snapshot_times) | {cfg.mcs_budget}
    tr = run(cfg, topo, stream(cfg.seed, *key, r, DYN_STREAM), snapshot_times=sorted(snaps))
    totals = list(tr.totals) + [int(w.sum()) for w in tr.snapshots.values()]
    return Realization(r, tr.times, tr.entropy, tr.poverty, tr.snapshots, tr.t_c,
                       topo.mean_degree, totals, tr.final.t)


def _run_one(args):
    return run_realization(*args)


@dataclass
class ExperimentResult:
    config: SimConfig
    times: np.ndarray
    entropy_runs: np.ndarray  # realizations x times; NaN past an early stop
    poverty_runs: np.ndarray
    histograms: dict[int, WealthHistogram]
    t_c: list[int | None]
    mean_degrees: list[float]
    conserved: bool
    fits: list[FitResult] = field(default_factory=list)

    @property
    def entropy_mean(self) -> np.ndarray:
        return np.nanmean(self.entropy_runs, axis=0)

    @property
    def poverty_mean(self) -> np.ndarray:
        return np.nanmean(self.poverty_runs, axis=0)

    @property
    def final_histogram(self) -> WealthHistogram:
        return self.histograms[max(self.histograms)]

    def reached_t_c(self) -> list[int]:
        return [t for t in self.t_c if t is not None]


def _aggregate(cfg: SimConfig, reals: list[Realization]) -> ExperimentResult:
    longest = max(reals, key=lambda r: len(r.times)).times
    T = len(longest)
    ent = np.full((len(reals), T), np.nan)
    pov = np.full((len(reals), T), np.nan)
    frozen = cfg.rule.bankruptcy
    for k, r in enumerate(reals):
        m = len(r.times)
        ent[k, :m] = r.entropy
        pov[k, :m] = r.poverty
        if frozen and m < T and r.t_c is not None:
            # With bankruptcy the condensed state can no longer change.
            ent[k, m:] = r.entropy[-1]
            pov[k, m:] = r.poverty[-1]
    hist: dict[int, Counter] = {}
    for r in reals:
        for t, w in r.snapshots.items():
            vals, cnts = np.unique(w, return_counts=True)
            hist.setdefault(t, Counter()).update(dict(zip(vals.tolist(), cnts.tolist())))
    histograms = {t: WealthHistogram(dict(sorted(c.items())), t) for t, c in sorted(hist.items())}
    expected = cfg.n * cfg.mean_w
    conserved = all(tot == expected for r in reals for tot in r.totals)
    res = ExperimentResult(cfg, longest, ent, pov, histograms, [r.t_c for r in reals],
                           [r.mean_degree for r in reals], conserved)
    res.fits = default_fits(res)
    return res


def default_fits(res: ExperimentResult) -> list[FitResult]:
    if not res.histograms:
        return []
    h = res.final_histogram
    mw = res.config.mean_w
    top = max(h.counts)
    out = []
    attempts = [
        lambda: fit_exponential(h, (0, BULK_SPAN * mw), mw),
        lambda: fit_exponential(h, (0, top), mw),
        lambda: fit_exponential(h, (0, 2 * mw), mw),
        lambda: fit_power_law(h, (2 * mw, top), open_lo=True),
    ]
    for attempt in attempts:
        try:
            out.append(attempt())
        except ValueError:
            pass
    return out


def run_experiment(cfg: SimConfig, out: str | os.PathLike | None = None,
                   key: tuple[int, ...] = ()) -> ExperimentResult:
    """Run every realization of ``cfg``; optionally write the bundle to ``out``.

    Realizations run in a process pool when ``cfg.workers > 1``; results are
    reduced in realization order, so output never depends on scheduling.
    """
    jobs = [(cfg, r, key) for r in range(cfg.realizations)]
    if cfg.workers > 1 and cfg.realizations > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reals = list(pool.map(_run_one, jobs))
    else:
        reals = [_run_one(j) for j in jobs]
    res = _aggregate(cfg, reals)
    if out is not None:
        write_bundle(res, out)
    return res


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.10g}"


def write_bundle(res: ExperimentResult, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = res.config
    with open(out / "series.csv", "w", newline="\n") as fh:
        fh.write("t,entropy,poverty\n")
        for t, s, p in zip(res.times, res.entropy_mean, res.poverty_mean):
            fh.write(f"{int(t)},{_fmt(float(s))},{_fmt(float(p))}\n")
    for t, h in res.histograms.items():
        with open(out / f"snapshot_{t}.csv", "w", newline="\n") as fh:
            fh.write("wealth,count,wealth_over_mean\n")
            for w, c in h.counts.items():
                fh.write(f"{w},{c},{_fmt(w / cfg.mean_w)}\n")
    with open(out / "tc.csv", "w", newline="\n") as fh:
        fh.write("realization,t_c,mean_degree\n")
        for r, (t, k) in enumerate(zip(res.t_c, res.mean_degrees)):
            fh.write(f"{r},{'' if t is None else t},{_fmt(k)}\n")
    with open(out / "fits.csv", "w", newline="\n") as fh:
        fh.write(FIT_CSV_HEADER + "\n")
        for f in res.fits:
            fh.write(f.csv_row() + "\n")
    write_config(cfg, out / "meta", extra={"code_version": __version__,
                                           "conserved": res.conserved})
    return out


SWEEP_PARAMS = ("n", "dw", "nu", "kmax")


@dataclass(frozen=True)
class SweepRow:
    value: float
    mean_t_c: float
    std_t_c: float
    n_reached: int
    realizations: int
    min_ex: int | None
    b: float | None
    t_c: tuple[int | None, ...]
    conserved: bool = True

    @property
    def flagged(self) -> bool:
        return self.n_reached < self.realizations


@dataclass
class SweepResult:
    param: str
    rows: list[SweepRow]
    scaling: FitResult | None

    def csv(self) -> str:
        lines = ["value,mean_t_c,std_t_c,n_reached,realizations,min_ex,b,flagged"]
        for r in self.rows:
            lines.append(",".join([
                f"{r.value:g}", _fmt(r.mean_t_c), _fmt(r.std_t_c), str(r.n_reached),
                str(r.realizations), "" if r.min_ex is None else str(r.min_ex),
                "" if r.b is None else _fmt(r.b), str(int(r.flagged))]))
        return "\n".join(lines) + "\n"


def _apply(base: SimConfig, param: str, value) -> SimConfig:
    if param == "n":
        return base.with_(n=int(value))
    if param == "kmax":
        return base.with_(k_max=int(value))
    if param == "nu":
        return base.with_(nu=float(value))
    if param == "dw":
        if base.rule.kind == ADDITIVE:
            return base.with_(c=int(value))
        # No constant stake exists in the multiplicative rule; dw is read as the initial stake nu <w>.
        return base.with_(nu=float(value) / base.mean_w)
    raise ValueError(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")


def sweep(base: SimConfig, param: str, values, out=None) -> SweepResult:
    """One experiment per value; rows are seeded by value, not position.

    ``n``, ``dw`` and ``nu`` sweeps measure condensation times, so they force
    bankruptcy on and stop each realization at condensation. ``kmax`` sweeps
    report ``b`` from the bulk exponential fit of the final pooled histogram.
    """
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")
    tc_sweep = param != "kmax"
    rows = []
    for v in values:
        cfg = _apply(base, param, v)
        if tc_sweep:
            cfg = cfg.with_(bankruptcy=True, stop_at_condensation=True)
        sub = None if out is None else Path(out) / f"{param}_{v}"
        res = run_experiment(cfg, sub, key=(value_key(param, v),))
        reached = res.reached_t_c()
        if tc_sweep and len(reached) < len(res.t_c):
            log.warning("%s=%s: %d of %d realizations did not condense within %d MCS",
                        param, v, len(res.t_c) - len(reached), len(res.t_c), cfg.mcs_budget)
        b = None
        if not tc_sweep:
            b = next((f.p2 for f in res.fits if f.form == "exponential"), None)
        rows.append(SweepRow(
            value=float(v),
            mean_t_c=float(np.mean(reached)) if reached else math.nan,
            std_t_c=float(np.std(reached, ddof=1)) if len(reached) > 1 else math.nan,
            n_reached=len(reached), realizations=len(res.t_c),
            min_ex=min_exchanges(cfg.mean_w, cfg.rule.c) if param == "dw" and cfg.rule.kind == ADDITIVE else None,
            b=b, t_c=tuple(res.t_c), conserved=res.conserved))
    scaling = None
    if param == "n":
        good = [(r.value, r.mean_t_c) for r in rows if not r.flagged]
        if len(good) < len(rows):
            log.warning("excluding %d flagged rows from the scaling fit", len(rows) - len(good))
        if len({n for n, _ in good}) >= 3:
            scaling = fit_scaling(good)
    result = SweepResult(param, rows, scaling)
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "sweep.csv").write_text(result.csv())
        with open(Path(out) / "fits.csv", "w", newline="\n") as fh:
            fh.write(FIT_CSV_HEADER + "\n")
            if scaling is not None:
                fh.write(scaling.csv_row() + "\n")
    return result


def component_census(n: int, k_max: int, wirings: int, seed: int = 0,
                     retries: int | None = None) -> tuple[Counter, list[float], list[int]]:
    """Pooled component-size counts, realized mean degrees and largest sizes over fresh wirings."""
    counts: Counter = Counter()
    degrees, largest = [], []
    kw = {} if retries is None else {"retries": retries}
    for r in range(wirings):
        topo = random_network(n, k_max, stream(seed, r, NET_STREAM), **kw)
        cs = components(topo)
        counts.update(cs.sizes)
        degrees.append(topo.mean_degree)
        largest.append(cs.largest)
    return counts, degrees, largest
