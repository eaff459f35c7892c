"""Two competing particles driven by rank-dependent jump-diffusions.

Two real-valued particles share a planar driving process: the currently
higher-ranked particle follows the (g_plus, a_pp) component, the lower one
the (g_minus, a_mm) component, with ties resolved lexicographically (the
second particle gets the higher rank). The spread between the ranked
particles is itself a reflected jump-diffusion on the half-line:

    drift g = g_plus - g_minus,
    diffusion sigma^2 = a_pp + a_mm - 2 a_pm,
    jump family nu_z = law of |z + (x_plus - x_minus)|,

where (x_plus, x_minus) are the paired jump displacements. When every jump
satisfies x_plus >= x_minus the folding never acts, the gap family is
translation invariant (hence stochastically ordered) and the certified rate
for the gap process is exact.

Stability is a drift comparison: the effective drift of the upper particle
(true drift plus intensity-weighted mean jump) must be smaller than the
lower particle's.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .ensemble import _run_chunks, terminal_states
from .measures import FiniteMeasure
from .model import (
    DifferencePushforward,
    DriftDiffusionSpec,
    NoJumps,
    RJDModel,
    TranslationInvariant,
)
from .streams import DEFAULT_SEED, substream

__all__ = [
    "PlanarJumpMeasure",
    "ZeroJumps",
    "ProductIndependent",
    "PointMassJump",
    "GeneralPlanar",
    "LevyPairModel",
    "RankedPaths",
    "EffectiveDrifts",
    "GapEquivalenceReport",
    "gap_model",
    "effective_drifts",
    "simulate_pair",
    "pair_gap_samples",
    "gap_equivalence_test",
    "load_pair_model",
    "pair_model_from_config",
]


class PlanarJumpMeasure:
    """Finite measure of paired jump displacements (x_plus, x_minus)."""

    kind = "abstract"

    def intensity(self) -> float:
        raise NotImplementedError

    def diff_law(self) -> FiniteMeasure:
        """Law of x_plus - x_minus, weighted by the intensity."""
        raise NotImplementedError

    def mean_plus(self) -> float:
        """Integral of x_plus against the full planar measure."""
        raise NotImplementedError

    def mean_minus(self) -> float:
        raise NotImplementedError

    def sample_pairs(self, gen: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


class ZeroJumps(PlanarJumpMeasure):
    kind = "zero"

    def intensity(self) -> float:
        return 0.0

    def diff_law(self) -> FiniteMeasure:
        return FiniteMeasure.zero()

    def mean_plus(self) -> float:
        return 0.0

    def mean_minus(self) -> float:
        return 0.0

    def sample_pairs(self, gen, n):
        return np.zeros(n), np.zeros(n)

    def to_config(self) -> dict:
        return {"kind": "zero"}


class ProductIndependent(PlanarJumpMeasure):
    """Independent jumps: each event displaces exactly one ranked particle.

    The planar measure splits as (nu_plus on the x_plus axis) + (nu_minus on
    the x_minus axis); an event is an upper-particle jump with probability
    proportional to nu_plus mass, else a lower-particle jump.
    """

    kind = "product"

    def __init__(self, nu_plus: FiniteMeasure, nu_minus: FiniteMeasure):
        self.nu_plus = nu_plus
        self.nu_minus = nu_minus
        if self.intensity() <= 0:
            raise ValueError("at least one marginal must carry mass")

    def intensity(self) -> float:
        return self.nu_plus.mass() + self.nu_minus.mass()

    def diff_law(self) -> FiniteMeasure:
        out = FiniteMeasure.zero()
        if self.nu_plus.mass() > 0:
            out = out + self.nu_plus
        if self.nu_minus.mass() > 0:
            out = out + self.nu_minus.reflect()
        return out

    def mean_plus(self) -> float:
        return self.nu_plus.mean() if self.nu_plus.mass() > 0 else 0.0

    def mean_minus(self) -> float:
        return self.nu_minus.mean() if self.nu_minus.mass() > 0 else 0.0

    def sample_pairs(self, gen, n):
        xp = np.zeros(n)
        xm = np.zeros(n)
        p_plus = self.nu_plus.mass() / self.intensity()
        pick = gen.uniform(size=n) < p_plus
        u = np.maximum(gen.uniform(size=n), 1e-16)
        if pick.any():
            xp[pick] = self.nu_plus.ppf(u[pick])
        if (~pick).any():
            xm[~pick] = self.nu_minus.ppf(u[~pick])
        return xp, xm

    def to_config(self) -> dict:
        return {
            "kind": "product",
            "nu_plus": self.nu_plus.to_config(),
            "nu_minus": self.nu_minus.to_config(),
        }


class PointMassJump(PlanarJumpMeasure):
    """All events displace the pair by the same (x_plus, x_minus)."""

    kind = "point_mass"

    def __init__(self, x_plus: float, x_minus: float, intensity: float = 1.0):
        if intensity <= 0:
            raise ValueError("intensity must be positive")
        self.x_plus = float(x_plus)
        self.x_minus = float(x_minus)
        self._intensity = float(intensity)

    def intensity(self) -> float:
        return self._intensity

    def diff_law(self) -> FiniteMeasure:
        return FiniteMeasure.point(self.x_plus - self.x_minus, self._intensity)

    def mean_plus(self) -> float:
        return self._intensity * self.x_plus

    def mean_minus(self) -> float:
        return self._intensity * self.x_minus

    def sample_pairs(self, gen, n):
        return np.full(n, self.x_plus), np.full(n, self.x_minus)

    def to_config(self) -> dict:
        return {
            "kind": "point_mass",
            "x_plus": self.x_plus,
            "x_minus": self.x_minus,
            "intensity": self._intensity,
        }


class GeneralPlanar(PlanarJumpMeasure):
    """Planar measure given by a sampler plus closed-form difference law."""

    kind = "general"

    def __init__(self, intensity, pair_sampler, diff, mean_plus, mean_minus):
        self._intensity = float(intensity)
        self._sampler = pair_sampler
        self._diff = diff
        self._mean_plus = float(mean_plus)
        self._mean_minus = float(mean_minus)

    def intensity(self) -> float:
        return self._intensity

    def diff_law(self) -> FiniteMeasure:
        return self._diff

    def mean_plus(self) -> float:
        return self._mean_plus

    def mean_minus(self) -> float:
        return self._mean_minus

    def sample_pairs(self, gen, n):
        xp, xm = self._sampler(gen, n)
        return np.asarray(xp, dtype=float), np.asarray(xm, dtype=float)


# ---------------------------------------------------------------------------
# the pair model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyPairModel:
    """Drifts, covariance and planar jump measure of the two-particle system."""

    g_plus: float
    g_minus: float
    a_pp: float
    a_pm: float
    a_mm: float
    jumps: PlanarJumpMeasure

    def __post_init__(self):
        if self.a_pp <= 0 or self.a_mm <= 0 or self.a_pp * self.a_mm - self.a_pm**2 <= 0:
            raise ValueError("covariance matrix must be positive definite")

    def cholesky(self) -> np.ndarray:
        l11 = math.sqrt(self.a_pp)
        l21 = self.a_pm / l11
        l22 = math.sqrt(self.a_mm - l21 * l21)
        return np.array([[l11, 0.0], [l21, l22]])


class EffectiveDrifts(NamedTuple):
    m_plus: float
    m_minus: float
    stable: bool


def effective_drifts(pair: LevyPairModel) -> EffectiveDrifts:
    """Effective drifts of the ranked particles; stable iff m_plus < m_minus."""
    m_plus = pair.g_plus + pair.jumps.mean_plus()
    m_minus = pair.g_minus + pair.jumps.mean_minus()
    return EffectiveDrifts(float(m_plus), float(m_minus), bool(m_plus < m_minus))


def gap_model(
    pair: LevyPairModel,
    lambda0: Optional[float] = None,
    x_max: float = 50.0,
    grid_step: float = 0.01,
) -> RJDModel:
    """Reflected jump-diffusion satisfied by the spread of the ranked pair.

    When the difference law sits on [0, inf) (upper displacement never below
    the lower one), the gap family is translation invariant and the model is
    flagged x-independent, making its certificate exact. The default moment
    radius is the difference law's divergence threshold when finite, else a
    bound comfortably past the feasibility root 2|g|/sigma^2.
    """
    g = pair.g_plus - pair.g_minus
    sigma2 = pair.a_pp + pair.a_mm - 2.0 * pair.a_pm
    assert sigma2 > 0.0  # strict positive definiteness forbids equality
    diff = pair.jumps.diff_law()
    if diff.mass() == 0.0:
        family = NoJumps()
        k_const = True
        thr = np.inf
    elif diff.support_min() >= 0.0:
        family = TranslationInvariant(diff)
        k_const = True
        thr = family.lambda_sup()
    else:
        family = DifferencePushforward(diff)
        k_const = False
        thr = family.lambda_sup()
    if lambda0 is None:
        lambda0 = thr if np.isfinite(thr) else max(1.0, 2.0 * abs(g) / sigma2 + 1.0)
    return RJDModel(
        dd=DriftDiffusionSpec.constants(g, sigma2),
        jumps=family,
        lambda0=float(lambda0),
        x_max=x_max,
        grid_step=grid_step,
        k_constant_in_x=k_const,
    )


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


@dataclass
class RankedPaths:
    """Ranked positions of the simulated pair on the time grid."""

    times: np.ndarray
    y_plus: np.ndarray
    y_minus: np.ndarray
    gap: np.ndarray
    tie_events: List[float] = field(default_factory=list)
    seed: int = 0


def _pair_grid(T: float, dt: float) -> np.ndarray:
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be an integer multiple of dt")
    return np.arange(n + 1) * dt


def simulate_pair(
    pair: LevyPairModel,
    x1_0: float,
    x2_0: float,
    T: float,
    dt: float,
    seed: int,
    stream_index: int = 0,
) -> RankedPaths:
    """Simulate the pair, re-ranking once per Euler segment and at each jump.

    Ties give the second particle the higher rank. Jumps land exactly at
    their exponential event times (the Euler segment is split there); the
    correlated Gaussian increments come from the Cholesky factor of the
    covariance matrix.
    """
    times = _pair_grid(T, dt)
    gen = substream(seed, stream_index)
    chol = pair.cholesky()
    lam = pair.jumps.intensity()
    drift = np.array([pair.g_plus, pair.g_minus])

    x1, x2 = float(x1_0), float(x2_0)
    y_plus = np.empty_like(times)
    y_minus = np.empty_like(times)
    ties: List[float] = []

    def advance(x1, x2, h):
        xi = gen.standard_normal(2)
        inc = drift * h + math.sqrt(h) * (chol @ xi)
        if x1 > x2:  # particle 1 holds the higher rank
            return x1 + inc[0], x2 + inc[1]
        return x1 + inc[1], x2 + inc[0]

    def jump(x1, x2):
        xp, xm = pair.jumps.sample_pairs(gen, 1)
        if x1 > x2:
            return x1 + float(xp[0]), x2 + float(xm[0])
        return x1 + float(xm[0]), x2 + float(xp[0])

    y_plus[0], y_minus[0] = max(x1, x2), min(x1, x2)
    if x1 == x2:
        ties.append(0.0)
    t_prop = gen.exponential(1.0 / lam) if lam > 0 else math.inf
    for i in range(1, len(times)):
        t_cur, t_next = times[i - 1], times[i]
        while t_prop <= t_next:
            h = t_prop - t_cur
            if h > 0:
                x1, x2 = advance(x1, x2, h)
            t_cur = t_prop
            if x1 == x2:
                ties.append(float(t_cur))
            x1, x2 = jump(x1, x2)
            t_prop += gen.exponential(1.0 / lam)
        h = t_next - t_cur
        if h > 0:
            x1, x2 = advance(x1, x2, h)
        y_plus[i], y_minus[i] = max(x1, x2), min(x1, x2)
        if x1 == x2 and i < len(times) - 1:
            ties.append(float(t_next))
    return RankedPaths(
        times=times,
        y_plus=y_plus,
        y_minus=y_minus,
        gap=y_plus - y_minus,
        tie_events=ties,
        seed=seed,
    )


def pair_gap_samples(
    pair: LevyPairModel,
    x0_gap: float,
    t: float,
    dt: float,
    n_paths: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """Vectorized spread of the ranked pair at time t across many paths.

    Pairs start at (0, x0_gap), so the second particle begins with the
    higher rank, matching the lexicographic tie rule.
    """
    if x0_gap < 0:
        raise ValueError("starting gap must be nonnegative")
    n_steps = int(round(t / dt))
    if abs(n_steps * dt - t) > 1e-9 * max(1.0, t) or n_steps < 1:
        raise ValueError("t must be a positive multiple of dt")
    chol = pair.cholesky()
    lam = pair.jumps.intensity()
    drift_up, drift_dn = pair.g_plus, pair.g_minus
    out = np.empty(n_paths)

    def advance(x1, x2, h, gen):
        k = x1.shape[0]
        xi = gen.standard_normal((2, k))
        inc = chol @ xi
        up1 = x1 > x2
        sqrth = np.sqrt(h)
        d_up = drift_up * h + sqrth * inc[0]
        d_dn = drift_dn * h + sqrth * inc[1]
        return (
            np.where(up1, x1 + d_up, x1 + d_dn),
            np.where(up1, x2 + d_dn, x2 + d_up),
        )

    def worker(chunk_index: int, start: int, size: int) -> None:
        gen = substream(seed, chunk_index)
        x1 = np.zeros(size)
        x2 = np.full(size, float(x0_gap))
        t_prop = gen.exponential(1.0 / lam, size=size) if lam > 0 else np.full(size, np.inf)
        for step in range(1, n_steps + 1):
            t_cur, t_next = (step - 1) * dt, step * dt
            h_close = np.full(size, dt)
            idx = np.nonzero(t_prop <= t_next)[0]
            if idx.size:
                a, b, tp = x1[idx], x2[idx], t_prop[idx]
                cur = np.full(idx.size, t_cur)
                while True:
                    j = np.nonzero(tp <= t_next)[0]
                    if j.size == 0:
                        break
                    hseg = tp[j] - cur[j]
                    aj, bj = advance(a[j], b[j], hseg, gen)
                    xp, xm = pair.jumps.sample_pairs(gen, j.size)
                    up1 = aj > bj
                    a[j] = np.where(up1, aj + xp, aj + xm)
                    b[j] = np.where(up1, bj + xm, bj + xp)
                    cur[j] = tp[j]
                    tp[j] = tp[j] + gen.exponential(1.0 / lam, size=j.size)
                x1[idx], x2[idx], t_prop[idx] = a, b, tp
                h_close[idx] = t_next - cur
            x1, x2 = advance(x1, x2, h_close, gen)
        out[start : start + size] = np.abs(x1 - x2)

    _run_chunks(n_paths, threads, worker)
    return out


@dataclass
class GapEquivalenceReport:
    statistic: float
    p_value: float
    n_paths: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "ks_statistic": self.statistic,
            "p_value": self.p_value,
            "n_paths": self.n_paths,
            "verdict": "pass" if self.passed else "fail",
        }


def gap_equivalence_test(
    pair: LevyPairModel,
    x0_gap: float,
    t: float,
    n_paths: int = 10_000,
    dt: float = 1e-3,
    seeds: Tuple[int, int] = (DEFAULT_SEED, DEFAULT_SEED + 1),
    threads: int = 1,
) -> GapEquivalenceReport:
    """Two-sample KS comparison: ranked-pair spread vs. the reduced model.

    Simulates the pair and the one-dimensional reflected jump-diffusion from
    independent seeds, both started at the same gap, and compares the time-t
    laws. Passing (p > 0.01) is the distributional check that the reduction
    is exact; the construction is weak, so only laws can agree.
    """
    from scipy import stats

    if t == 0.0:
        return GapEquivalenceReport(0.0, 1.0, n_paths, True)
    gaps_pair = pair_gap_samples(pair, x0_gap, t, dt, n_paths, seeds[0], threads=threads)
    reduced = gap_model(pair)
    gaps_rjd = terminal_states(reduced, x0_gap, [t], dt, n_paths, seeds[1], threads=threads)[0]
    res = stats.ks_2samp(gaps_pair, gaps_rjd)
    return GapEquivalenceReport(
        statistic=float(res.statistic),
        p_value=float(res.pvalue),
        n_paths=n_paths,
        passed=bool(res.pvalue > 0.01),
    )


# ---------------------------------------------------------------------------
# pair model files
# ---------------------------------------------------------------------------


def _planar_from_config(cfg: dict) -> PlanarJumpMeasure:
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return ZeroJumps()
    if kind == "product":
        return ProductIndependent(
            FiniteMeasure.from_config(cfg.get("nu_plus", {})),
            FiniteMeasure.from_config(cfg.get("nu_minus", {})),
        )
    if kind == "point_mass":
        return PointMassJump(
            float(cfg["x_plus"]), float(cfg["x_minus"]), float(cfg.get("intensity", 1.0))
        )
    raise ValueError(f"unknown planar jump measure kind {kind!r}")


def pair_model_from_config(cfg: dict) -> LevyPairModel:
    try:
        A = cfg["A"]
        return LevyPairModel(
            g_plus=float(cfg["g_plus"]),
            g_minus=float(cfg["g_minus"]),
            a_pp=float(A[0][0]),
            a_pm=float(A[0][1]),
            a_mm=float(A[1][1]),
            jumps=_planar_from_config(cfg.get("Lambda", {"kind": "zero"})),
        )
    except KeyError as exc:
        raise ValueError(f"pair model file missing required field {exc.args[0]!r}") from exc


def load_pair_model(path) -> LevyPairModel:
    with open(path, "r", encoding="utf-8") as fh:
        return pair_model_from_config(json.load(fh))
