"""Path simulation for reflected jump-diffusions.

Between jumps the state follows the Euler scheme with projection reflection:

    y' = y + g(y) h + sigma(y) sqrt(h) xi,   y_new = max(y', 0),
    local time increment = max(-y', 0),

so the accumulated pushing process grows only on steps whose unreflected
value went negative. Jumps are realized by thinning a Poisson proposal clock
of rate rho = sup_x r(x): a proposal at state x is accepted with probability
r(x) / rho, and accepted jumps land exactly at their event times: the Euler
step is split there rather than snapping the jump to the grid, which keeps
the inter-jump law unbiased.

Per-path draw order (fixed, so every path is reproducible from its stream):
one initial proposal gap, then per grid step: for each proposal inside the
step, a segment normal, an acceptance uniform, a destination uniform if
accepted, and the next proposal gap; finally the closing-segment normal.

Coupled pairs share every draw (Brownian segments, the proposal clock,
acceptance uniforms, and destination uniforms), which realizes the monotone
coupling: for a stochastically ordered family, inverse-CDF sampling with a
shared uniform maps ordered states to ordered destinations, and the shared
reflected segments preserve the order in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .model import DriftDiffusionSpec, NoJumps, RJDModel, is_stochastically_ordered
from .streams import substream

__all__ = [
    "JumpEvent",
    "PathRecord",
    "CoupledPair",
    "MEET_THRESHOLD",
    "simulate_reflected_diffusion",
    "simulate_rjd",
    "simulate_coupled_pair",
]

# Diffusion paths hit 0 exactly only in the continuum limit; the coupling-time
# surrogate declares a meet once both paths sit below this level at a grid time.
MEET_THRESHOLD = 1e-9


class JumpEvent(NamedTuple):
    time: float
    from_state: float
    to_state: float
    u: float  # destination uniform, kept so the jump can be re-derived


@dataclass
class PathRecord:
    """One simulated path on a uniform grid.

    ``states[i]`` and ``local_time[i]`` are the values at ``times[i]``;
    ``jump_events`` carries the exact (off-grid) jump times.
    """

    times: np.ndarray
    states: np.ndarray
    local_time: np.ndarray
    jump_events: List[JumpEvent] = field(default_factory=list)
    seed: int = 0

    @property
    def n_jumps(self) -> int:
        return len(self.jump_events)

    def jump_flags(self) -> np.ndarray:
        """1 for grid rows whose step (t_{i-1}, t_i] contains a jump."""
        flags = np.zeros(len(self.times), dtype=int)
        jt = np.array([e.time for e in self.jump_events])
        if jt.size:
            idx = np.searchsorted(self.times, jt, side="left")
            flags[np.clip(idx, 0, len(flags) - 1)] = 1
        return flags

    def to_csv(self, path) -> None:
        flags = self.jump_flags()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,state,local_time,is_jump\n")
            for t, s, l, j in zip(self.times, self.states, self.local_time, flags):
                fh.write(f"{t:.12g},{s:.12g},{l:.12g},{j}\n")


@dataclass
class CoupledPair:
    low: PathRecord
    high: PathRecord
    ordered: bool
    meet_time: Optional[float] = None


def _grid(T: float, dt: float) -> np.ndarray:
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be an integer multiple of dt")
    return np.arange(n + 1) * dt


def _coeffs(dd: DriftDiffusionSpec):
    g_fn, s2_fn = dd.g, dd.sigma2
    gc = getattr(g_fn, "constant_value", None)
    sc = getattr(s2_fn, "constant_value", None)

    def g(x: float) -> float:
        val = gc if gc is not None else float(g_fn(x))
        if not math.isfinite(val):
            raise FloatingPointError(f"drift not finite at x={x:g}")
        return val

    def sig(x: float) -> float:
        val = sc if sc is not None else float(s2_fn(x))
        if not math.isfinite(val) or val < 0:
            raise FloatingPointError(f"sigma^2 not finite/nonnegative at x={x:g}")
        return math.sqrt(val)

    return g, sig


def _segment(x: float, ell: float, h: float, xi: float, g, sig):
    y = x + g(x) * h + sig(x) * math.sqrt(h) * xi
    if y < 0.0:
        return 0.0, ell - y
    return y, ell


def simulate_rjd(
    model: RJDModel,
    x0: float,
    T: float,
    dt: float,
    seed: int,
    rho_override: Optional[float] = None,
    stream_index: int = 0,
) -> PathRecord:
    """Simulate one reflected jump-diffusion path.

    ``rho_override`` proposes the thinning clock at a rate above sup r(x);
    the accepted-event law is invariant to it (useful for validating the
    thinning itself). ``stream_index`` selects the per-path substream of the
    root seed, so batches of paths are reproducible independently of order.
    """
    if x0 < 0:
        raise ValueError("x0 must lie in [0, inf)")
    times = _grid(T, dt)
    gen = substream(seed, stream_index)
    g, sig = _coeffs(model.dd)
    fam = model.jumps
    rho = fam.rate_bound()
    if rho_override is not None:
        if rho_override < rho:
            raise ValueError("rho_override must dominate sup r(x)")
        rho = rho_override

    states = np.empty_like(times)
    local_time = np.empty_like(times)
    states[0], local_time[0] = x0, 0.0
    events: List[JumpEvent] = []

    x, ell = float(x0), 0.0
    t_prop = gen.exponential(1.0 / rho) if rho > 0 else math.inf
    for i in range(1, len(times)):
        t_cur, t_next = times[i - 1], times[i]
        while t_prop <= t_next:
            h = t_prop - t_cur
            if h > 0:
                x, ell = _segment(x, ell, h, gen.standard_normal(), g, sig)
            t_cur = t_prop
            u_acc = gen.uniform()
            if u_acc * rho < float(fam.rate(x)):
                u_dest = max(gen.uniform(), 1e-16)  # ppf needs u inside (0, 1)
                dest = float(fam.sample(x, u_dest))
                events.append(JumpEvent(t_cur, x, dest, u_dest))
                x = dest
            t_prop += gen.exponential(1.0 / rho)
        h = t_next - t_cur
        if h > 0:
            x, ell = _segment(x, ell, h, gen.standard_normal(), g, sig)
        states[i], local_time[i] = x, ell
    return PathRecord(times, states, local_time, events, seed=seed)


def simulate_reflected_diffusion(
    dd: DriftDiffusionSpec, x0: float, T: float, dt: float, seed: int, stream_index: int = 0
) -> PathRecord:
    """Reflected diffusion without jumps (the rho = 0 case of the full scheme)."""
    model = RJDModel(dd=dd, jumps=NoJumps(), lambda0=1.0)
    return simulate_rjd(model, x0, T, dt, seed, stream_index=stream_index)


class OrderedFamilyRequired(ValueError):
    """Monotone coupling requested for a family without stochastic ordering."""


def simulate_coupled_pair(
    model: RJDModel,
    x1: float,
    x2: float,
    T: float,
    dt: float,
    seed: int,
    meet_threshold: float = MEET_THRESHOLD,
    stream_index: int = 0,
    check_ordered: bool = True,
) -> CoupledPair:
    """Simulate the monotone coupled pair started from x1 <= x2.

    Both paths share Brownian segments, the proposal clock, acceptance
    uniforms and destination uniforms; for ordered families the low path
    stays below the high path at every time. Once both paths sit below
    ``meet_threshold`` at a grid time they have coupled (shared randomness
    keeps them identical afterwards) and the first such time is recorded.
    """
    if not 0 <= x1 <= x2:
        raise ValueError("need 0 <= x1 <= x2")
    if check_ordered and not is_stochastically_ordered(model.jumps):
        raise OrderedFamilyRequired(
            "coupling guarantee unavailable: jump family is not stochastically "
            "ordered; simulate independent paths instead"
        )
    times = _grid(T, dt)
    gen = substream(seed, stream_index)
    g, sig = _coeffs(model.dd)
    fam = model.jumps
    rho = fam.rate_bound()

    lo = np.empty_like(times)
    hi = np.empty_like(times)
    ell_lo = np.empty_like(times)
    ell_hi = np.empty_like(times)
    lo[0], hi[0], ell_lo[0], ell_hi[0] = x1, x2, 0.0, 0.0
    ev_lo: List[JumpEvent] = []
    ev_hi: List[JumpEvent] = []
    meet_time: Optional[float] = None
    if x1 <= meet_threshold and x2 <= meet_threshold:
        meet_time = 0.0

    a, b = float(x1), float(x2)
    la, lb = 0.0, 0.0
    t_prop = gen.exponential(1.0 / rho) if rho > 0 else math.inf
    for i in range(1, len(times)):
        t_cur, t_next = times[i - 1], times[i]
        while t_prop <= t_next:
            h = t_prop - t_cur
            if h > 0:
                xi = gen.standard_normal()
                a, la = _segment(a, la, h, xi, g, sig)
                b, lb = _segment(b, lb, h, xi, g, sig)
            t_cur = t_prop
            u_acc = gen.uniform()
            if u_acc * rho < float(fam.rate(a)):  # ordered families: rate constant
                u_dest = max(gen.uniform(), 1e-16)
                da = float(fam.sample(a, u_dest))
                db = float(fam.sample(b, u_dest))
                ev_lo.append(JumpEvent(t_cur, a, da, u_dest))
                ev_hi.append(JumpEvent(t_cur, b, db, u_dest))
                a, b = da, db
            t_prop += gen.exponential(1.0 / rho)
        h = t_next - t_cur
        if h > 0:
            xi = gen.standard_normal()
            a, la = _segment(a, la, h, xi, g, sig)
            b, lb = _segment(b, lb, h, xi, g, sig)
        lo[i], hi[i], ell_lo[i], ell_hi[i] = a, b, la, lb
        if meet_time is None and a <= meet_threshold and b <= meet_threshold:
            meet_time = float(times[i])

    return CoupledPair(
        low=PathRecord(times, lo, ell_lo, ev_lo, seed=seed),
        high=PathRecord(times, hi, ell_hi, ev_hi, seed=seed),
        ordered=True,
        meet_time=meet_time,
    )
