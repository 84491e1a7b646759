"""Canned configurations, one per reproduced figure or table."""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT_CONFIG, SimConfig

K_MAX_VALUES = (2, 3, 4, 20)
SNAPSHOTS_FC = (0, 1_000, 10_000, 100_000, 399_500)
LATE = 399_000
# Budget long enough for additive condensation with bankruptcy at N=500.
CONDENSE_BUDGET = 50_000_000


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # "runs", "sweeps", "components" or "tables"
    runs: tuple[tuple[str, SimConfig], ...] = ()
    sweeps: tuple[tuple[str, SimConfig, str, tuple], ...] = ()
    k_max_values: tuple[int, ...] = ()


def _add(**kw) -> SimConfig:
    return DEFAULT_CONFIG.with_(kind="additive", **kw)


def _mul(**kw) -> SimConfig:
    return DEFAULT_CONFIG.with_(kind="multiplicative", **kw)


def _condense(base: SimConfig, **kw) -> SimConfig:
    return base.with_(bankruptcy=True, stop_at_condensation=True,
                      mcs_budget=CONDENSE_BUDGET, stride=10_000, **kw)


def _build() -> dict[str, Preset]:
    p = {}
    p["fig1a"] = Preset("fig1a", "runs", runs=(("additive", _add(snapshot_times=SNAPSHOTS_FC)),))
    p["fig1b"] = Preset("fig1b", "runs", runs=(("multiplicative", _mul(snapshot_times=SNAPSHOTS_FC)),))
    p["fig2"] = Preset("fig2", "runs", runs=(("additive", _add()), ("multiplicative", _mul())))
    p["fig3"] = Preset("fig3", "runs", runs=(("additive", _condense(_add())),
                                             ("multiplicative", _condense(_mul()))))
    p["fig4"] = Preset("fig4", "sweeps", sweeps=(
        ("additive", _condense(_add(), realizations=50), "n", (100, 200, 400, 800)),
        ("multiplicative", _condense(_mul(), realizations=50), "n", (100, 200, 400, 800)),
    ))
    p["fig5"] = Preset("fig5", "sweeps", sweeps=(
        ("additive", _condense(_add(), realizations=50), "dw", tuple(range(10, 101, 2))),
        ("multiplicative", _condense(_mul(), realizations=50), "nu", (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)),
    ))
    p["fig7"] = Preset("fig7", "runs", runs=tuple(
        (f"kmax{k}", _add(k_max=k)) for k in K_MAX_VALUES))
    p["fig8"] = Preset("fig8", "runs", runs=tuple(
        (f"kmax{k}", _add(k_max=k, snapshot_times=(LATE,))) for k in K_MAX_VALUES))
    p["fig10"] = Preset("fig10", "runs", runs=tuple(
        (f"kmax{k}", _mul(k_max=k)) for k in K_MAX_VALUES))
    p["fig11"] = Preset("fig11", "runs", runs=tuple(
        (f"kmax{k}", _mul(k_max=k, snapshot_times=(LATE,))) for k in K_MAX_VALUES))
    p["fig12"] = Preset("fig12", "components", k_max_values=K_MAX_VALUES)
    p["tables"] = Preset("tables", "tables", k_max_values=K_MAX_VALUES)
    return p


PRESETS = _build()


def figure_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
