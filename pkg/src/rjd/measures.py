"""Finite Borel measures on the real line with closed-form operations.

Jump families are parametrized by finite measures built from two kinds of
component: point atoms and one-sided exponential densities. This covers all
built-in families (point displacements, exponential right tails, measures of
particle-displacement differences) while keeping every operation the rate
machinery needs (total mass, mean, exponential moment, tails, quantiles)
exact rather than quadrature-based.

A "right" exponential component with rate ``r`` and mass ``m`` has density
``m * r * exp(-r s)`` on ``s >= 0``; a "left" one has ``m * r * exp(r s)`` on
``s <= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

__all__ = ["DivergentMomentError", "ExpComponent", "FiniteMeasure"]

_PPF_BISECTIONS = 200
_ATOM_SNAP = 1e-9


class DivergentMomentError(ValueError):
    """Exponential-moment request at or beyond the divergence threshold."""

    def __init__(self, lam: float, threshold: float):
        self.lam = lam
        self.threshold = threshold
        super().__init__(
            f"exponential moment diverges at lambda={lam:g} "
            f"(finite only for lambda < {threshold:g})"
        )


@dataclass(frozen=True)
class ExpComponent:
    rate: float
    mass: float
    side: int  # +1 supported on [0, inf), -1 on (-inf, 0]

    def __post_init__(self):
        if self.rate <= 0 or self.mass <= 0 or self.side not in (-1, 1):
            raise ValueError("exponential component needs rate > 0, mass > 0, side ±1")


class FiniteMeasure:
    """Finite measure = atoms + one-sided exponential components."""

    def __init__(
        self,
        atom_locations: Sequence[float] = (),
        atom_masses: Sequence[float] = (),
        exponentials: Sequence[ExpComponent] = (),
    ):
        locs = np.asarray(atom_locations, dtype=float)
        masses = np.asarray(atom_masses, dtype=float)
        if locs.shape != masses.shape or locs.ndim > 1:
            raise ValueError("atom locations/masses must be matching 1-d sequences")
        if np.any(masses <= 0):
            raise ValueError("atom masses must be positive")
        order = np.argsort(locs, kind="stable")
        self._locs = locs[order]
        self._masses = masses[order]
        # merge equal-rate same-side exponentials so common mixtures stay single-component
        merged: dict[Tuple[float, int], float] = {}
        for comp in exponentials:
            key = (comp.rate, comp.side)
            merged[key] = merged.get(key, 0.0) + comp.mass
        self._exps = tuple(
            ExpComponent(rate, mass, side) for (rate, side), mass in sorted(merged.items())
        )

    # ---------------- constructors ----------------

    @classmethod
    def zero(cls) -> "FiniteMeasure":
        return cls()

    @classmethod
    def point(cls, location: float, mass: float = 1.0) -> "FiniteMeasure":
        return cls([location], [mass])

    @classmethod
    def atoms(cls, locations, masses) -> "FiniteMeasure":
        return cls(locations, masses)

    @classmethod
    def exponential(cls, rate: float, mass: float = 1.0) -> "FiniteMeasure":
        """Exponential density on [0, inf): magnitude ~ Exp(rate), total mass ``mass``."""
        return cls(exponentials=[ExpComponent(rate, mass, +1)])

    @classmethod
    def exponential_negative(cls, rate: float, mass: float = 1.0) -> "FiniteMeasure":
        """Exponential density on (-inf, 0]: |magnitude| ~ Exp(rate)."""
        return cls(exponentials=[ExpComponent(rate, mass, -1)])

    def __add__(self, other: "FiniteMeasure") -> "FiniteMeasure":
        return FiniteMeasure(
            np.concatenate([self._locs, other._locs]),
            np.concatenate([self._masses, other._masses]),
            self._exps + other._exps,
        )

    def reflect(self) -> "FiniteMeasure":
        """Push-forward under s -> -s."""
        return FiniteMeasure(
            -self._locs,
            self._masses,
            [ExpComponent(c.rate, c.mass, -c.side) for c in self._exps],
        )

    # ---------------- basic functionals ----------------

    @property
    def atom_locations(self) -> np.ndarray:
        return self._locs

    @property
    def atom_masses(self) -> np.ndarray:
        return self._masses

    @property
    def exponentials(self) -> Tuple[ExpComponent, ...]:
        return self._exps

    def mass(self) -> float:
        return float(self._masses.sum() + sum(c.mass for c in self._exps))

    def mean(self) -> float:
        """Integral of s against the measure."""
        out = float(np.dot(self._locs, self._masses))
        for c in self._exps:
            out += c.side * c.mass / c.rate
        return out

    def support_min(self) -> float:
        lo = np.inf
        if self._locs.size:
            lo = float(self._locs[0])
        for c in self._exps:
            lo = min(lo, 0.0 if c.side > 0 else -np.inf)
        return lo

    def min_right_rate(self) -> float:
        rates = [c.rate for c in self._exps if c.side > 0]
        return min(rates) if rates else np.inf

    def min_left_rate(self) -> float:
        rates = [c.rate for c in self._exps if c.side < 0]
        return min(rates) if rates else np.inf

    def exp_moment(self, lam: float) -> float:
        """Integral of exp(lam*s); diverges once lam reaches a right-tail rate."""
        lam = float(lam)
        if lam >= 0 and lam >= self.min_right_rate():
            raise DivergentMomentError(lam, self.min_right_rate())
        if lam < 0 and -lam >= self.min_left_rate():
            raise DivergentMomentError(lam, -self.min_left_rate())
        out = float(np.dot(np.exp(lam * self._locs), self._masses))
        for c in self._exps:
            out += c.mass * c.rate / (c.rate - c.side * lam)
        return out

    # ---------------- distribution functions ----------------

    @staticmethod
    def _edge(loc) -> float:
        # thresholds reaching an atom through float arithmetic (e.g. x + c
        # recomputed as z - x) land within a few ulps; snap the comparison
        return 1e-12 * max(1.0, abs(loc))

    def tail(self, z):
        """Measure of [z, inf) (closed at z, so an atom at z counts)."""
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        for loc, m in zip(self._locs, self._masses):
            out = out + m * (z <= loc + self._edge(loc))
        for c in self._exps:
            if c.side > 0:
                out = out + c.mass * np.exp(-c.rate * np.maximum(z, 0.0))
            else:
                out = out + c.mass * (1.0 - np.exp(c.rate * np.minimum(z, 0.0)))
        return float(out) if out.ndim == 0 else out

    def cdf_mass(self, z):
        """Measure of (-inf, z] (unnormalized, right-continuous)."""
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        for loc, m in zip(self._locs, self._masses):
            out = out + m * (z >= loc - self._edge(loc))
        for c in self._exps:
            if c.side > 0:
                out = out + c.mass * (1.0 - np.exp(-c.rate * np.maximum(z, 0.0))) * (z >= 0)
            else:
                out = out + c.mass * np.exp(c.rate * np.minimum(z, 0.0))
        return float(out) if out.ndim == 0 else out

    def atom_mass_at(self, z) -> float:
        z = float(z)
        hit = np.abs(self._locs - z) <= np.array([self._edge(l) for l in self._locs])
        return float(self._masses[hit].sum()) if hit.any() else 0.0

    def interval_mass_closed(self, a: float, b: float) -> float:
        """Measure of [a, b]."""
        if b < a:
            return 0.0
        return float(self.cdf_mass(b) - self.cdf_mass(a) + self.atom_mass_at(a))

    # ---------------- sampling ----------------

    def ppf(self, u):
        """Quantile function of the normalized measure: inf{z : F(z) >= u}.

        Inverse-CDF sampling through this map is comonotone: a shared uniform
        produces ordered draws from ordered measures, which the pathwise
        coupling construction relies on.
        """
        total = self.mass()
        if total <= 0:
            raise ValueError("cannot sample from the zero measure")
        u_arr = np.asarray(u, dtype=float)
        if np.any((u_arr <= 0) | (u_arr >= 1)):
            raise ValueError("uniforms must lie strictly inside (0, 1)")
        scalar = u_arr.ndim == 0
        u_arr = np.atleast_1d(u_arr)

        if not self._exps:
            cum = np.cumsum(self._masses) / total
            idx = np.searchsorted(cum, u_arr, side="left")
            out = self._locs[np.minimum(idx, len(cum) - 1)]
        elif len(self._exps) == 1 and not self._locs.size:
            c = self._exps[0]
            if c.side > 0:
                out = -np.log1p(-u_arr) / c.rate
            else:
                out = np.log(u_arr) / c.rate
        else:
            out = self._ppf_bisect(u_arr, total)
        out = out.astype(float)
        return float(out[0]) if scalar else out

    def _ppf_bisect(self, u: np.ndarray, total: float) -> np.ndarray:
        target = u * total
        lo_candidates = [0.0]
        hi_candidates = [0.0]
        if self._locs.size:
            lo_candidates.append(float(self._locs[0]) - 1.0)
            hi_candidates.append(float(self._locs[-1]) + 1.0)
        lo = np.full(u.shape, min(lo_candidates))
        hi = np.full(u.shape, max(hi_candidates))
        span = max(1.0, max(hi_candidates) - min(lo_candidates))
        while np.any(self.cdf_mass(lo) >= target):
            lo -= span
            span *= 2
        span = max(1.0, span)
        while np.any(self.cdf_mass(hi) < target):
            hi += span
            span *= 2
        for _ in range(_PPF_BISECTIONS):
            mid = 0.5 * (lo + hi)
            below = self.cdf_mass(mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = hi
        for loc in self._locs:
            out = np.where(np.abs(out - loc) < _ATOM_SNAP, loc, out)
        return out

    # ---------------- serialization ----------------

    def to_config(self) -> dict:
        cfg: dict = {}
        if self._locs.size:
            cfg["atoms"] = [[float(l), float(m)] for l, m in zip(self._locs, self._masses)]
        if self._exps:
            cfg["exponentials"] = [
                {"rate": c.rate, "mass": c.mass, "side": "right" if c.side > 0 else "left"}
                for c in self._exps
            ]
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "FiniteMeasure":
        atoms = cfg.get("atoms", [])
        exps = [
            ExpComponent(
                float(e["rate"]),
                float(e.get("mass", 1.0)),
                +1 if e.get("side", "right") == "right" else -1,
            )
            for e in cfg.get("exponentials", [])
        ]
        return cls([a[0] for a in atoms], [a[1] for a in atoms], exps)

    def __repr__(self) -> str:
        parts = []
        if self._locs.size:
            parts.append(f"atoms={list(zip(self._locs, self._masses))}")
        if self._exps:
            parts.append(f"exps={self._exps}")
        return f"FiniteMeasure({', '.join(parts) or 'zero'})"
