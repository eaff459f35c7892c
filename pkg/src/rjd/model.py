"""Reflected jump-diffusion models on the half-line.

A model couples a drift/diffusion pair (g, sigma^2) on [0, inf) with a family
of finite jump measures nu_x. The state jumps from x with intensity
r(x) = nu_x([0, inf)), landing at a point drawn from nu_x / r(x). Families are
required to support inverse-CDF sampling (never rejection) so that two copies
driven by shared uniforms stay pathwise ordered whenever the family is
stochastically ordered, the coupling the verification estimators build on.

Standing hypotheses checked by :func:`validate_model` (on a grid, as evidence
rather than proof):

1. g and sigma Lipschitz, sigma bounded away from zero;
2. r(x) bounded, the family weakly continuous (not machine-checkable; noted);
3. some lambda0 > 0 with sup_x of the exponential moment
   integral exp(lambda0 |y - x|) nu_x(dy) finite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from .expr import compile_expression
from .measures import DivergentMomentError, FiniteMeasure

__all__ = [
    "DriftDiffusionSpec",
    "JumpFamily",
    "NoJumps",
    "PointShift",
    "PointMap",
    "ExpRightTail",
    "TranslationInvariant",
    "DifferencePushforward",
    "RJDModel",
    "ValidationReport",
    "NoJumpError",
    "validate_model",
    "jump_rate",
    "exp_moment",
    "sample_jump",
    "is_stochastically_ordered",
    "load_model",
    "bundled_model_path",
    "model_from_config",
]

DEFAULT_X_MAX = 50.0
DEFAULT_GRID_STEP = 0.01
LIPSCHITZ_WARN_BOUND = 1e6


class NoJumpError(ValueError):
    """Jump requested from a state with zero jump intensity."""


def _as_coefficient(value) -> Callable:
    """Wrap constants as vectorized callables; pass callables through."""
    if callable(value):
        return value
    c = float(value)

    def const(x, _c=c):
        x = np.asarray(x, dtype=float)
        return _c if x.ndim == 0 else np.full(x.shape, _c)

    const.constant_value = c
    return const


@dataclass(frozen=True)
class DriftDiffusionSpec:
    """Drift g(x) (state/time) and diffusion coefficient sigma^2(x) (state^2/time).

    Coefficient callables must be pure and accept numpy arrays. sigma^2 may be
    zero (deterministic drift paths are useful fixtures); positivity bounded
    away from zero is a validation concern, not a construction one.
    """

    g: Callable
    sigma2: Callable

    @classmethod
    def constants(cls, g: float, sigma2: float) -> "DriftDiffusionSpec":
        return cls(_as_coefficient(g), _as_coefficient(sigma2))

    def g_at(self, x):
        return np.asarray(self.g(x), dtype=float)

    def sigma2_at(self, x):
        return np.asarray(self.sigma2(x), dtype=float)

    def is_constant(self, probe=(0.0, 0.37, 1.0, 4.3, 17.0, 49.0)) -> bool:
        xs = np.asarray(probe)
        g = self.g_at(xs)
        s = self.sigma2_at(xs)
        return bool(np.all(g == g.flat[0]) and np.all(s == s.flat[0]))


class JumpFamily:
    """Family of finite jump measures nu_x indexed by the state x >= 0.

    Subclasses provide intensity, inverse-CDF sampling, tails/CDF, the
    exponential moment integral exp(lam (y - x)) nu_x(dy), and the mean
    displacement integral (y - x) nu_x(dy). All state/uniform arguments accept
    scalars or numpy arrays.
    """

    kind = "abstract"
    translation_invariant = False

    def rate(self, x):
        raise NotImplementedError

    def rate_bound(self) -> float:
        """sup_x r(x); the thinning proposal rate."""
        raise NotImplementedError

    def constant_rate(self) -> bool:
        return False

    def sample(self, x, u):
        raise NotImplementedError

    def cdf(self, x, z):
        """Normalized destination CDF: P(destination <= z | jump from x)."""
        raise NotImplementedError

    def tail_mass(self, x, z):
        """nu_x([z, inf)), unnormalized, closed at z."""
        raise NotImplementedError

    def exp_moment(self, x, lam):
        raise NotImplementedError

    def mean_displacement(self, x):
        raise NotImplementedError

    def lambda_sup(self) -> float:
        """Threshold above which the exponential moment diverges (inf if none)."""
        return np.inf

    def to_config(self) -> dict:
        raise NotImplementedError(f"{self.kind} family has no file form")


class NoJumps(JumpFamily):
    kind = "none"
    translation_invariant = True

    def rate(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if x.ndim == 0 else np.zeros(x.shape)

    def rate_bound(self) -> float:
        return 0.0

    def constant_rate(self) -> bool:
        return True

    def sample(self, x, u):
        raise NoJumpError("no jump measure defined (rate is zero everywhere)")

    def cdf(self, x, z):
        raise NoJumpError("no jump measure defined (rate is zero everywhere)")

    def tail_mass(self, x, z):
        z = np.asarray(z, dtype=float)
        return 0.0 if z.ndim == 0 else np.zeros(z.shape)

    def exp_moment(self, x, lam):
        x = np.asarray(x, dtype=float)
        return 0.0 if x.ndim == 0 else np.zeros(x.shape)

    def mean_displacement(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if x.ndim == 0 else np.zeros(x.shape)

    def to_config(self) -> dict:
        return {"kind": "none"}


class TranslationInvariant(JumpFamily):
    """nu_x = push-forward of a fixed measure mu on [0, inf) under z -> x + z.

    Jumps are rightward with x-independent magnitude law and intensity
    mu([0, inf)); the family is stochastically ordered by construction.
    """

    kind = "translation_invariant"
    translation_invariant = True

    def __init__(self, mu: FiniteMeasure):
        if mu.mass() <= 0:
            raise ValueError("displacement measure must have positive mass")
        if mu.support_min() < 0:
            raise ValueError("displacement measure must be supported on [0, inf)")
        self.mu = mu
        self._mass = mu.mass()

    def rate(self, x):
        x = np.asarray(x, dtype=float)
        return self._mass if x.ndim == 0 else np.full(x.shape, self._mass)

    def rate_bound(self) -> float:
        return self._mass

    def constant_rate(self) -> bool:
        return True

    def sample(self, x, u):
        return np.asarray(x, dtype=float) + self.mu.ppf(u)

    def cdf(self, x, z):
        return self.mu.cdf_mass(np.asarray(z, dtype=float) - np.asarray(x, dtype=float)) / self._mass

    def tail_mass(self, x, z):
        return self.mu.tail(np.asarray(z, dtype=float) - np.asarray(x, dtype=float))

    def exp_moment(self, x, lam):
        val = self.mu.exp_moment(lam)
        x = np.asarray(x, dtype=float)
        return val if x.ndim == 0 else np.full(x.shape, val)

    def mean_displacement(self, x):
        val = self.mu.mean()
        x = np.asarray(x, dtype=float)
        return val if x.ndim == 0 else np.full(x.shape, val)

    def lambda_sup(self) -> float:
        return self.mu.min_right_rate()

    def to_config(self) -> dict:
        return {"kind": "translation_invariant", "measure": self.mu.to_config()}


class PointShift(TranslationInvariant):
    """nu_x = intensity * delta_{x + c}: every jump moves c >= 0 to the right."""

    kind = "point_shift"

    def __init__(self, c: float, intensity: float = 1.0):
        if c < 0:
            raise ValueError("point shift must be nonnegative (nu_x lives on [0, inf))")
        super().__init__(FiniteMeasure.point(float(c), float(intensity)))
        self.c = float(c)
        self.intensity = float(intensity)

    def sample(self, x, u):
        return np.asarray(x, dtype=float) + self.c

    def to_config(self) -> dict:
        return {"kind": "point_shift", "c": self.c, "intensity": self.intensity}


class ExpRightTail(TranslationInvariant):
    """nu_x(dy) = intensity * 1{y > x} rate e^{-rate (y-x)} dy: Exp(rate) right jumps."""

    kind = "exp_right_tail"

    def __init__(self, rate: float = 1.0, intensity: float = 1.0):
        super().__init__(FiniteMeasure.exponential(float(rate), float(intensity)))
        self.jump_rate_param = float(rate)
        self.intensity = float(intensity)

    def to_config(self) -> dict:
        return {
            "kind": "exp_right_tail",
            "rate": self.jump_rate_param,
            "intensity": self.intensity,
        }


class PointMap(JumpFamily):
    """nu_x = intensity * delta_{psi(x)} for a map psi: [0,inf) -> [0,inf).

    Not stochastically ordered unless psi is nondecreasing; the certificate
    path for such models goes through a dominating ordered family.
    """

    kind = "point_map"

    def __init__(self, psi: Callable, intensity: float = 1.0):
        self.psi = psi
        self.intensity = float(intensity)
        if self.intensity <= 0:
            raise ValueError("intensity must be positive")

    def _dest(self, x):
        d = np.asarray(self.psi(np.asarray(x, dtype=float)), dtype=float)
        if np.any(d < 0):
            raise ValueError("point map produced a destination outside [0, inf)")
        return d

    def rate(self, x):
        x = np.asarray(x, dtype=float)
        return self.intensity if x.ndim == 0 else np.full(x.shape, self.intensity)

    def rate_bound(self) -> float:
        return self.intensity

    def constant_rate(self) -> bool:
        return True

    def sample(self, x, u):
        d = self._dest(x)
        return float(d) if d.ndim == 0 else d

    def cdf(self, x, z):
        out = (np.asarray(z, dtype=float) >= self._dest(x)) * 1.0
        return float(out) if out.ndim == 0 else out

    def tail_mass(self, x, z):
        out = self.intensity * (self._dest(x) >= np.asarray(z, dtype=float))
        return float(out) if out.ndim == 0 else out

    def exp_moment(self, x, lam):
        x = np.asarray(x, dtype=float)
        out = self.intensity * np.exp(float(lam) * (self._dest(x) - x))
        return float(out) if out.ndim == 0 else out

    def mean_displacement(self, x):
        x = np.asarray(x, dtype=float)
        out = self.intensity * (self._dest(x) - x)
        return float(out) if out.ndim == 0 else out

    def to_config(self) -> dict:
        body = getattr(self.psi, "expression", None)
        if body is None:
            raise NotImplementedError("only expression-backed point maps serialize")
        return {
            "kind": "point_map",
            "psi": {"kind": "expression", "body": body},
            "intensity": self.intensity,
        }


class DifferencePushforward(JumpFamily):
    """nu_x = law of |x + S| where S ~ diff, a finite signed-support measure.

    This is the jump family of a two-particle gap process: S is the law of the
    displacement difference, and the folding |.| is the reflection of the gap
    at zero. When diff is supported on [0, inf) the family coincides with a
    translation-invariant one and is stochastically ordered.
    """

    kind = "difference_pushforward"

    def __init__(self, diff: FiniteMeasure):
        if diff.mass() <= 0:
            raise ValueError("difference law must have positive mass")
        self.diff = diff
        self._mass = diff.mass()

    @property
    def translation_invariant(self) -> bool:  # type: ignore[override]
        return self.diff.support_min() >= 0

    def rate(self, x):
        x = np.asarray(x, dtype=float)
        return self._mass if x.ndim == 0 else np.full(x.shape, self._mass)

    def rate_bound(self) -> float:
        return self._mass

    def constant_rate(self) -> bool:
        return True

    def sample(self, x, u):
        return np.abs(np.asarray(x, dtype=float) + self.diff.ppf(u))

    def cdf(self, x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        # |x + s| <= z  <=>  s in [-z - x, z - x] (empty for z < 0)
        lo, hi = -z - x, z - x
        out = np.where(
            z < 0,
            0.0,
            self.diff.cdf_mass(hi) - self.diff.cdf_mass(lo) + self._atoms_at(lo),
        ) / self._mass
        return float(out) if out.ndim == 0 else out

    def _atoms_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape)
        for loc, m in zip(self.diff.atom_locations, self.diff.atom_masses):
            out = out + m * (np.abs(pts - loc) <= 1e-12 * max(1.0, abs(loc)))
        return out

    def tail_mass(self, x, z):
        # |x+s| >= z  <=>  s >= z-x or s <= -z-x; for z > 0 the two half-lines
        # are disjoint, and both boundary points are included (closed tails)
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        out = np.where(
            z <= 0,
            self._mass,
            self.diff.tail(z - x) + self.diff.cdf_mass(-z - x),
        )
        return float(out) if out.ndim == 0 else out

    def exp_moment(self, x, lam):
        """Closed-form integral of exp(lam (|x+s| - x)) over the difference law."""
        lam = float(lam)
        thr = self.lambda_sup()
        if lam >= thr:
            raise DivergentMomentError(lam, thr)
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for loc, m in zip(self.diff.atom_locations, self.diff.atom_masses):
            out = out + m * np.exp(lam * (np.abs(x + loc) - x))
        for c in self.diff.exponentials:
            r, m = c.rate, c.mass
            if c.side > 0:
                out = out + m * r / (r - lam)
            else:
                # split at s = -x: surviving part stays right of 0, rest folds back
                out = out + m * r * (1.0 - np.exp(-(lam + r) * x)) / (lam + r)
                out = out + m * r * np.exp(-(r + lam) * x) / (r - lam)
        return float(out) if out.ndim == 0 else out

    def mean_displacement(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for loc, m in zip(self.diff.atom_locations, self.diff.atom_masses):
            out = out + m * (np.abs(x + loc) - x)
        for c in self.diff.exponentials:
            r, m = c.rate, c.mass
            if c.side > 0:
                out = out + m / r
            else:
                out = out + m * (2.0 * np.exp(-r * x) - 1.0) / r
        return float(out) if out.ndim == 0 else out

    def lambda_sup(self) -> float:
        # reflection at 0 turns far-left mass into far-right mass, so left
        # exponential tails constrain the moment exactly like right ones
        return min(self.diff.min_right_rate(), self.diff.min_left_rate())

    def to_config(self) -> dict:
        return {"kind": "difference_pushforward", "difference": self.diff.to_config()}


# ---------------------------------------------------------------------------
# model container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RJDModel:
    """Reflected jump-diffusion model with numerical truncation parameters.

    ``lambda0`` is the exponential-moment radius: rate evaluations are only
    admitted for lambda in [0, lambda0). ``x_max``/``grid_step`` bound the
    grids used wherever the theory takes a supremum over all states.
    ``k_constant_in_x`` may only be set when the jump family is translation
    invariant and the coefficients are constant, in which case suprema in x
    are exact instead of grid-approximated.
    """

    dd: DriftDiffusionSpec
    jumps: JumpFamily
    lambda0: float
    x_max: float = DEFAULT_X_MAX
    grid_step: float = DEFAULT_GRID_STEP
    k_constant_in_x: bool = False

    def __post_init__(self):
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.x_max <= 0 or self.grid_step <= 0:
            raise ValueError("x_max and grid_step must be positive")
        if self.k_constant_in_x:
            if not self.jumps.translation_invariant:
                raise ValueError(
                    "k_constant_in_x requires a translation-invariant jump family"
                )
            if not self.dd.is_constant():
                raise ValueError("k_constant_in_x requires constant g and sigma^2")

    def x_grid(self, grid_step: Optional[float] = None) -> np.ndarray:
        step = self.grid_step if grid_step is None else grid_step
        n = int(round(self.x_max / step))
        return np.linspace(0.0, n * step, n + 1)

    def with_jumps(self, jumps: JumpFamily, k_constant: Optional[bool] = None) -> "RJDModel":
        if k_constant is None:
            k_constant = jumps.translation_invariant and self.dd.is_constant()
        return replace(self, jumps=jumps, k_constant_in_x=k_constant)


# ---------------------------------------------------------------------------
# operations on families
# ---------------------------------------------------------------------------


def jump_rate(family: JumpFamily, x):
    """Jump intensity r(x) = nu_x([0, inf))."""
    if np.any(np.asarray(x) < 0):
        raise ValueError("states live on [0, inf)")
    out = family.rate(x)
    return float(out) if np.ndim(out) == 0 else out


def exp_moment(family: JumpFamily, x, lam: float):
    """Integral of exp(lam (y - x)) nu_x(dy); raises past the divergence threshold."""
    if np.any(np.asarray(x) < 0):
        raise ValueError("states live on [0, inf)")
    return family.exp_moment(x, lam)


def sample_jump(family: JumpFamily, x, u):
    """Inverse-CDF jump destination for state x and uniform u in (0, 1)."""
    if np.any(np.asarray(x) < 0):
        raise ValueError("states live on [0, inf)")
    if np.any(np.asarray(family.rate(x)) <= 0):
        raise NoJumpError(f"no jump defined from x={x}")
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr >= 1)):
        raise ValueError("uniforms must lie strictly inside (0, 1)")
    out = np.asarray(family.sample(x, u), dtype=float)
    if np.any(out < 0):
        raise ValueError("jump destination outside [0, inf)")
    return float(out) if out.ndim == 0 else out


def _default_z_grid(family: JumpFamily, x_grid: Sequence[float]) -> np.ndarray:
    """Destination quantiles across states; separates any tail-order violation."""
    qs = np.linspace(0.05, 0.95, 9)
    zs = []
    for x in x_grid:
        try:
            zs.append(np.atleast_1d(family.sample(np.full(qs.shape, float(x)), qs)))
        except NoJumpError:
            return np.array([0.0])
    return np.unique(np.concatenate(zs))


def is_stochastically_ordered(
    family: JumpFamily,
    x_grid: Optional[Sequence[float]] = None,
    z_grid: Optional[Sequence[float]] = None,
    rtol: float = 1e-9,
) -> bool:
    """Grid evidence that nu_x <= nu_y in the upper-tail order for x <= y.

    True requires a state-independent intensity plus tail masses
    nu_x([z, inf)) nondecreasing in x for every threshold z. A true result is
    evidence on the grids supplied, not a proof.
    """
    if x_grid is None:
        x_grid = np.linspace(0.0, 8.0, 33)
    x_grid = np.asarray(sorted(x_grid), dtype=float)
    if x_grid.size == 0:
        raise ValueError("x_grid must be nonempty")
    rates = np.atleast_1d(np.asarray(family.rate(x_grid), dtype=float))
    if rates.max() <= 0:
        return True  # the zero family is trivially ordered
    if rates.max() - rates.min() > rtol * max(1.0, rates.max()):
        return False
    if z_grid is None:
        z_grid = _default_z_grid(family, x_grid)
    z_grid = np.asarray(sorted(z_grid), dtype=float)
    tol = rtol * max(1.0, rates.max())
    for z in z_grid:
        tails = np.atleast_1d(np.asarray(family.tail_mass(x_grid, z), dtype=float))
        if np.any(np.diff(tails) < -tol):
            return False
    return True


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    assumption1_ok: bool
    assumption2_ok: bool
    assumption3_ok: bool
    rho: float
    expmoment_sup: float
    lipschitz_estimate: float
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.assumption1_ok and self.assumption2_ok and self.assumption3_ok

    def to_dict(self) -> dict:
        return {
            "assumption1_ok": self.assumption1_ok,
            "assumption2_ok": self.assumption2_ok,
            "assumption3_ok": self.assumption3_ok,
            "rho": self.rho,
            "expmoment_sup": self.expmoment_sup,
            "lipschitz_estimate": self.lipschitz_estimate,
            "notes": list(self.notes),
            "verdict": "pass" if self.ok else "fail",
        }


def validate_model(
    model: RJDModel,
    grid_step: Optional[float] = None,
    lipschitz_bound: float = LIPSCHITZ_WARN_BOUND,
) -> ValidationReport:
    """Check the standing hypotheses on the grid {0, grid_step, ..., x_max}."""
    step = model.grid_step if grid_step is None else float(grid_step)
    if step <= 0:
        raise ValueError("grid_step must be positive")
    if model.x_max < 10 * step:
        raise ValueError("x_max must cover at least ten grid steps")
    xs = model.x_grid(step)
    notes: List[str] = []

    # Hypothesis 1: finite Lipschitz coefficients, sigma bounded away from 0.
    a1 = True
    lip_est = np.inf
    g = model.dd.g_at(xs)
    s2 = model.dd.sigma2_at(xs)
    bad = ~(np.isfinite(g) & np.isfinite(s2))
    if bad.any():
        a1 = False
        notes.append(f"non-finite coefficient at x={xs[bad][0]:.6g}")
    else:
        if s2.min() <= 0:
            a1 = False
            notes.append(
                f"sigma^2 not bounded away from zero (min {s2.min():.3g} "
                f"at x={xs[int(np.argmin(s2))]:.6g})"
            )
        sig = np.sqrt(np.maximum(s2, 0.0))
        ratios = (np.abs(np.diff(g)) + np.abs(np.diff(sig))) / step
        lip_est = float(ratios.max()) if ratios.size else 0.0
        if lip_est > lipschitz_bound:
            notes.append(
                f"finite-difference ratio {lip_est:.3g} exceeds the Lipschitz bound "
                f"{lipschitz_bound:.3g} (warning only)"
            )

    # Hypothesis 2: bounded intensity. Weak continuity is not machine-checkable.
    rates = np.atleast_1d(np.asarray(model.jumps.rate(xs), dtype=float))
    a2 = bool(np.all(np.isfinite(rates)) and np.all(rates >= 0))
    rho = float(rates.max()) if rates.size else 0.0
    if not a2:
        notes.append("jump intensity not finite and nonnegative on the grid")
    notes.append("weak continuity of x -> nu_x is assumed, not checked")

    # Hypothesis 3: exponential moment radius lambda0.
    a3 = True
    expmoment_sup = 0.0
    thr = model.jumps.lambda_sup()
    if model.lambda0 > thr:
        a3 = False
        notes.append(
            f"exponential moment diverges at lambda={thr:g} < lambda0={model.lambda0:g}"
        )
        expmoment_sup = np.inf
    elif rho > 0:
        lam_chk = model.lambda0
        if model.lambda0 == thr:
            lam_chk = thr * (1.0 - 1e-6)
            notes.append(
                f"moment integral diverges at lambda0={model.lambda0:g} itself; "
                f"finite for every lambda < lambda0 (checked at {lam_chk:.8g})"
            )
        try:
            vals = np.atleast_1d(np.asarray(model.jumps.exp_moment(xs, lam_chk), dtype=float))
        except DivergentMomentError as exc:
            a3 = False
            vals = np.array([np.inf])
            notes.append(str(exc))
        expmoment_sup = float(vals.max())
        if not np.isfinite(expmoment_sup):
            a3 = False
            notes.append("exponential moment not finite over the grid")
        elif vals.size > 1 and int(np.argmax(vals)) == vals.size - 1 and vals[-1] > 2 * vals[0]:
            notes.append(
                "exponential moment still growing at x_max; tail beyond the grid uncontrolled"
            )

    return ValidationReport(a1, a2, a3, rho, expmoment_sup, lip_est, notes)


# ---------------------------------------------------------------------------
# model files
# ---------------------------------------------------------------------------


def _coefficient_from_config(cfg) -> Callable:
    if isinstance(cfg, (int, float)):
        return _as_coefficient(cfg)
    kind = cfg.get("kind")
    if kind == "constant":
        return _as_coefficient(cfg["value"])
    if kind == "expression":
        return compile_expression(cfg["body"])
    raise ValueError(f"unknown coefficient kind {kind!r}")


def _family_from_config(cfg) -> JumpFamily:
    if cfg is None:
        return NoJumps()
    kind = cfg.get("kind", "none")
    if kind == "none":
        return NoJumps()
    if kind == "point_shift":
        return PointShift(float(cfg["c"]), float(cfg.get("intensity", 1.0)))
    if kind == "point_map":
        return PointMap(_coefficient_from_config(cfg["psi"]), float(cfg.get("intensity", 1.0)))
    if kind == "exp_right_tail":
        return ExpRightTail(float(cfg["rate"]), float(cfg.get("intensity", 1.0)))
    if kind == "translation_invariant":
        return TranslationInvariant(FiniteMeasure.from_config(cfg["measure"]))
    if kind == "difference_pushforward":
        return DifferencePushforward(FiniteMeasure.from_config(cfg["difference"]))
    raise ValueError(f"unknown jump family kind {kind!r}")


def model_from_config(cfg: dict) -> RJDModel:
    """Build a model from its dictionary form (see the README for the schema)."""
    try:
        dd = DriftDiffusionSpec(
            _coefficient_from_config(cfg["drift"]),
            _coefficient_from_config(cfg["sigma2"]),
        )
        jumps = _family_from_config(cfg.get("jumps"))
        k_const = cfg.get("k_constant_in_x")
        if k_const is None:
            k_const = jumps.translation_invariant and dd.is_constant()
        model = RJDModel(
            dd=dd,
            jumps=jumps,
            lambda0=float(cfg["lambda0"]),
            x_max=float(cfg.get("x_max", DEFAULT_X_MAX)),
            grid_step=float(cfg.get("grid_step", DEFAULT_GRID_STEP)),
            k_constant_in_x=bool(k_const),
        )
    except KeyError as exc:
        raise ValueError(f"model file missing required field {exc.args[0]!r}") from exc
    return model


def load_model(path) -> RJDModel:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    return model_from_config(cfg)


def bundled_model_path(name: str):
    """Path of a packaged example model file (see rjd/models/)."""
    from importlib import resources

    path = resources.files("rjd").joinpath("models", name)
    if not path.is_file():
        available = sorted(p.name for p in resources.files("rjd").joinpath("models").iterdir())
        raise FileNotFoundError(f"no bundled model {name!r}; available: {available}")
    return path
