"""Monte Carlo dynamics of conservative two-agent wealth exchange.

One Monte Carlo step (MCS) picks a pair of agents and attempts a fair bet.
Every step consumes exactly three uniform draws from the stream (first
agent, partner, coin), whether or not a transfer happens, so a trajectory
is a pure function of the seed and never depends on how the driver chunks
the work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels as K
from .netgen import Topology

if TYPE_CHECKING:
    from .config import SimConfig

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"

# Upper bound on steps drawn per call into the kernel.
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ExchangeRule:
    """Stake rule plus bankruptcy semantics.

    ``solvent_pairing`` only matters with bankruptcy: when set, pairs are
    drawn from the agents still solvent, so bankrupt agents drop out of the
    selection altogether. When unset, any agent may be drawn and a step that
    draws a bankrupt agent ends without a transfer.
    """

    kind: str = ADDITIVE
    c: int = 20
    nu: float = 0.2
    bankruptcy: bool = False
    solvent_pairing: bool = True

    def __post_init__(self):
        if self.kind not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == ADDITIVE and (int(self.c) != self.c or self.c < 1):
            raise ValueError("additive stake c must be a positive integer")
        if self.kind == MULTIPLICATIVE and not 0 < self.nu < 1:
            raise ValueError("nu must lie in (0, 1)")

    @property
    def nu_fraction(self) -> Fraction:
        # Decimal reading of nu, so 0.2 is exactly 1/5 and rounding stays integer-exact.
        return Fraction(repr(float(self.nu))).limit_denominator(10**9)

    def kernel_args(self) -> tuple[int, int, int, int]:
        f = self.nu_fraction
        return (K.KIND_ADD if self.kind == ADDITIVE else K.KIND_MUL,
                int(self.c), f.numerator, f.denominator)


def round_half_away(num: int, den: int) -> int:
    """Nearest integer to ``num/den`` for ``num, den >= 0``; halves round up."""
    return (2 * num + den) // (2 * den)


def stake(rule: ExchangeRule, w_i: int, w_j: int) -> int:
    if rule.kind == ADDITIVE:
        return int(rule.c)
    f = rule.nu_fraction
    return round_half_away(f.numerator * min(w_i, w_j), f.denominator)


def is_bankrupt(rule: ExchangeRule, w: int) -> bool:
    """True when ``w`` is below the minimum allowed exchange (the poverty predicate)."""
    if rule.kind == ADDITIVE:
        return w < rule.c
    f = rule.nu_fraction
    return round_half_away(f.numerator * w, f.denominator) == 0


@dataclass
class PopulationState:
    wealth: np.ndarray
    bankrupt: np.ndarray
    t: int = 0
    # pool[:n_pool] lists the agents eligible as first pick; slot[i] is i's position in it.
    pool: np.ndarray = field(default=None)
    slot: np.ndarray = field(default=None)
    n_pool: int = 0
    poverty: int = 0

    def __post_init__(self):
        n = len(self.wealth)
        if self.pool is None:
            self.pool = np.arange(n, dtype=np.int64)
            self.slot = np.arange(n, dtype=np.int64)
            self.n_pool = n

    @classmethod
    def fresh(cls, n: int, mean_w: int, rule: ExchangeRule) -> "PopulationState":
        wealth = np.full(n, mean_w, dtype=np.int64)
        st = cls(wealth=wealth, bankrupt=np.zeros(n, dtype=np.bool_))
        poor = is_bankrupt(rule, mean_w)
        st.poverty = n if poor else 0
        if rule.bankruptcy and poor:
            st.bankrupt[:] = True
            if rule.solvent_pairing:
                st.n_pool = 0
        return st

    @property
    def n(self) -> int:
        return len(self.wealth)

    @property
    def total(self) -> int:
        return int(self.wealth.sum())

    def copy(self) -> "PopulationState":
        return PopulationState(self.wealth.copy(), self.bankrupt.copy(), self.t,
                               self.pool.copy(), self.slot.copy(), self.n_pool, self.poverty)


def select_pair(topology: Topology, state: PopulationState, rng: np.random.Generator):
    """Draw an ordered pair ``(i, j)``, or ``None`` when no pair is available.

    Consumes two uniforms. The first agent is uniform over the eligible
    pool; the partner is uniform over the other pool members (fully
    connected) or over the first agent's neighbours (explicit network).
    """
    u1, u2 = rng.random(2)
    return _pick(topology, state, u1, u2)


def _pick(topology: Topology, state: PopulationState, u1: float, u2: float):
    m = state.n_pool
    if topology.fully_connected:
        if m < 2:
            return None
        a = int(u1 * m)
        b = int(u2 * (m - 1))
        if b >= a:
            b += 1
        return int(state.pool[a]), int(state.pool[b])
    if m < 1:
        return None
    i = int(state.pool[int(u1 * m)])
    lo, hi = topology.indptr[i], topology.indptr[i + 1]
    if hi == lo:
        return None
    return i, int(topology.indices[lo + int(u2 * (hi - lo))])


def step(state: PopulationState, topology: Topology, rule: ExchangeRule,
         rng: np.random.Generator) -> PopulationState:
    """Advance ``state`` in place by one MCS (pure-Python reference path)."""
    u1, u2, u3 = rng.random(3)
    state.t += 1
    pair = _pick(topology, state, u1, u2)
    if pair is None:
        return state
    i, j = pair
    if rule.bankruptcy and (state.bankrupt[i] or state.bankrupt[j]):
        return state
    dw = stake(rule, int(state.wealth[i]), int(state.wealth[j]))
    winner, loser = (i, j) if u3 < 0.5 else (j, i)
    if dw <= 0 or state.wealth[loser] < dw:
        return state
    for a in (winner, loser):
        state.poverty -= is_bankrupt(rule, int(state.wealth[a]))
    state.wealth[loser] -= dw
    state.wealth[winner] += dw
    for a in (winner, loser):
        poor = is_bankrupt(rule, int(state.wealth[a]))
        state.poverty += poor
        if rule.bankruptcy and poor and not state.bankrupt[a]:
            state.bankrupt[a] = True
            if rule.solvent_pairing:
                _drop(state, a)
    return state


def _drop(state: PopulationState, a: int) -> None:
    last = state.n_pool - 1
    s = state.slot[a]
    other = state.pool[last]
    state.pool[s], state.pool[last] = other, a
    state.slot[other], state.slot[a] = s, last
    state.n_pool = last


@dataclass
class Trajectory:
    times: np.ndarray
    entropy: np.ndarray
    poverty: np.ndarray
    snapshots: dict[int, np.ndarray]
    t_c: int | None
    final: PopulationState
    totals: list[int]

    @property
    def condensed(self) -> bool:
        return self.t_c is not None


def series_times(budget: int, stride: int) -> list[int]:
    ts = list(range(0, budget + 1, stride))
    if ts[-1] != budget:
        ts.append(budget)
    return ts


def run(config: "SimConfig", topology: Topology, rng: np.random.Generator,
        snapshot_times=()) -> Trajectory:
    """Simulate one realization from the uniform initial state.

    Entropy and poverty are recorded every ``config.stride`` MCS and at the
    budget. ``t_c`` is the exact step at which poverty first reaches
    ``n - 1``. With ``config.stop_at_condensation`` the run ends there and
    the series is truncated.
    """
    stop_at_condensation = config.stop_at_condensation
    if topology.n != config.n:
        raise ValueError(f"topology has {topology.n} agents, config says {config.n}")
    snapshot_times = sorted(int(t) for t in snapshot_times)
    if snapshot_times and (snapshot_times[0] < 0 or snapshot_times[-1] > config.mcs_budget):
        raise ValueError("snapshot times must lie within the MCS budget")
    rule = config.rule
    state = PopulationState.fresh(config.n, config.mean_w, rule)
    kind, c, num, den = rule.kernel_args()
    scal = np.array([0, state.n_pool, state.poverty, -1], dtype=np.int64)
    n = config.n
    if state.poverty >= n - 1:
        scal[K.S_TC] = 0
    scratch = np.zeros(config.n * config.mean_w + 1, dtype=np.int64)

    record = series_times(config.mcs_budget, config.stride)
    events = sorted(set(record) | set(snapshot_times))
    record_set, snap_set = set(record), set(snapshot_times)
    times, ent, pov, totals = [], [], [], []
    snaps: dict[int, np.ndarray] = {}

    for ev in events:
        while scal[K.S_T] < ev:
            if stop_at_condensation and scal[K.S_TC] >= 0:
                break
            steps = int(min(ev - scal[K.S_T], _CHUNK))
            u = rng.random(3 * steps)
            K.advance(state.wealth, state.bankrupt, state.pool, state.slot, scal,
                      topology.fully_connected, topology.indptr, topology.indices,
                      kind, c, num, den, rule.bankruptcy, rule.solvent_pairing,
                      u, steps, stop_at_condensation)
        if stop_at_condensation and scal[K.S_TC] >= 0:
            break
        if ev in record_set:
            times.append(ev)
            ent.append(K.entropy(state.wealth, scratch))
            pov.append(int(scal[K.S_POV]))
            totals.append(int(state.wealth.sum()))
        if ev in snap_set:
            snaps[ev] = state.wealth.copy()

    if stop_at_condensation and scal[K.S_TC] >= 0:
        # Final record at the condensation step itself.
        t = int(scal[K.S_T])
        times.append(t)
        ent.append(K.entropy(state.wealth, scratch))
        pov.append(int(scal[K.S_POV]))
        totals.append(int(state.wealth.sum()))

    state.t = int(scal[K.S_T])
    state.n_pool = int(scal[K.S_POOL])
    state.poverty = int(scal[K.S_POV])
    tc = int(scal[K.S_TC])
    return Trajectory(np.asarray(times, dtype=np.int64), np.asarray(ent),
                      np.asarray(pov, dtype=np.int64), snaps,
                      tc if tc >= 0 else None, state, totals)
