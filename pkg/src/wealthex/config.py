"""Run configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace

from .engine import ADDITIVE, ExchangeRule
from .netgen import DEFAULT_RETRIES


@dataclass(frozen=True)
class SimConfig:
    n: int = 500
    mean_w: int = 100
    rule: ExchangeRule = field(default_factory=ExchangeRule)
    k_max: int | None = None  # None means fully connected
    mcs_budget: int = 400_000
    realizations: int = 100
    seed: int = 0
    snapshot_times: tuple[int, ...] = ()
    stride: int = 500
    retries: int = DEFAULT_RETRIES
    reuse_network: bool = False
    stop_at_condensation: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.mean_w < 1:
            raise ValueError("mean_w must be >= 1")
        if self.mcs_budget < 0:
            raise ValueError("mcs_budget must be >= 0")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.k_max is not None and not 1 <= self.k_max < self.n:
            raise ValueError("k_max must lie in [1, n-1]")
        if any(t < 0 or t > self.mcs_budget for t in self.snapshot_times):
            raise ValueError("snapshot times must lie within the MCS budget")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def fully_connected(self) -> bool:
        return self.k_max is None

    def with_(self, **kw) -> "SimConfig":
        rule_keys = {"kind", "c", "nu", "bankruptcy", "solvent_pairing"}
        rule_kw = {k: kw.pop(k) for k in list(kw) if k in rule_keys}
        rule = replace(self.rule, **rule_kw) if rule_kw else self.rule
        return replace(self, rule=rule, **kw)

    def to_flat(self) -> dict[str, str]:
        d = asdict(self)
        rule = d.pop("rule")
        d.update(rule)
        d["network"] = "full" if self.k_max is None else str(self.k_max)
        d.pop("k_max")
        d["snapshot_times"] = ",".join(str(t) for t in self.snapshot_times)
        return {k: str(v) for k, v in d.items()}


_INT_KEYS = {"n", "mean_w", "mcs_budget", "realizations", "seed", "stride",
             "retries", "workers", "c"}
_BOOL_KEYS = {"bankruptcy", "solvent_pairing", "reuse_network", "stop_at_condensation"}
# Provenance written into a bundle's meta file; ignored on reload.
_META_KEYS = {"code_version", "conserved"}


def parse_flat(pairs: dict[str, str]) -> dict:
    """Turn string key/value pairs into ``SimConfig.with_`` keywords."""
    out: dict = {}
    for key, raw in pairs.items():
        key = key.strip().lower()
        raw = raw.strip()
        if key in _META_KEYS:
            continue
        if key in _INT_KEYS:
            out[key] = int(float(raw))
        elif key in _BOOL_KEYS:
            out[key] = raw.lower() in ("1", "true", "yes", "on")
        elif key == "nu":
            out[key] = float(raw)
        elif key in ("kind", "rule"):
            out["kind"] = raw
        elif key in ("network", "k_max", "kmax"):
            out["k_max"] = None if raw.lower() in ("full", "fully-connected", "none") else int(raw)
        elif key == "snapshot_times":
            out[key] = tuple(int(float(x)) for x in raw.split(",") if x.strip())
        else:
            raise ValueError(f"unknown config key {key!r}")
    return out


def load_config(path, base: SimConfig | None = None) -> SimConfig:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    with open(path) as fh:
        cp.read_string("[run]\n" + fh.read())
    return (base or SimConfig()).with_(**parse_flat(dict(cp["run"])))


def write_config(cfg: SimConfig, path, extra: dict | None = None) -> None:
    flat = cfg.to_flat()
    if extra:
        flat.update({k: str(v) for k, v in extra.items()})
    with open(path, "w", newline="\n") as fh:
        for k in sorted(flat):
            fh.write(f"{k} = {flat[k]}\n")


DEFAULT_CONFIG = SimConfig(rule=ExchangeRule(kind=ADDITIVE, c=20, nu=0.2))
