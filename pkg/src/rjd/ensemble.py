"""Vectorized path ensembles for Monte-Carlo estimation.

The scalar simulators in :mod:`rjd.sim` record whole paths; the estimators in
:mod:`rjd.verify` need only state snapshots at a handful of times across many
paths, so these kernels evolve all paths of a chunk simultaneously with numpy
arithmetic. Dynamics are identical to the scalar scheme: projection-reflected
Euler segments, thinning against a rate-rho proposal clock, jumps applied
exactly at their event times by splitting the step there.

Randomness: paths are processed in fixed-size chunks (``CHUNK`` paths), one
counter-based substream per chunk, with a fixed draw order inside each step
(event-segment normals, acceptance uniforms, destination uniforms, next
proposal gaps, then one closing normal per path). Chunks own disjoint output
slices, so results are bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from .model import RJDModel
from .streams import substream

__all__ = ["CHUNK", "terminal_states", "coupled_states"]

CHUNK = 32768
_U_FLOOR = 1e-16  # keep destination uniforms strictly inside (0, 1)


def _snap_indices(times: Sequence[float], dt: float) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("need at least one snapshot time")
    idx = np.rint(times / dt).astype(int)
    if np.any(np.abs(idx * dt - times) > 1e-9 * np.maximum(1.0, times)):
        raise ValueError("snapshot times must be multiples of dt")
    if np.any(idx < 0):
        raise ValueError("snapshot times must be nonnegative")
    return idx


def _coeff_arrays(model: RJDModel):
    g_fn, s2_fn = model.dd.g, model.dd.sigma2
    gc = getattr(g_fn, "constant_value", None)
    sc = getattr(s2_fn, "constant_value", None)

    def g(x):
        return gc if gc is not None else np.asarray(g_fn(x), dtype=float)

    def s2(x):
        return sc if sc is not None else np.asarray(s2_fn(x), dtype=float)

    return g, s2


def _reflect_step(x, ell, h, xi, g, s2):
    y = x + g(x) * h + np.sqrt(np.maximum(s2(x) * h, 0.0)) * xi
    neg = y < 0.0
    ell = ell + np.where(neg, -y, 0.0)
    return np.where(neg, 0.0, y), ell


def _chunk_ranges(n_paths: int) -> list:
    return [(c, s, min(CHUNK, n_paths - s)) for c, s in enumerate(range(0, n_paths, CHUNK))]


def _run_chunks(n_paths: int, threads: int, worker) -> None:
    ranges = _chunk_ranges(n_paths)
    if threads <= 1 or len(ranges) == 1:
        for r in ranges:
            worker(*r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda r: worker(*r), ranges))


def terminal_states(
    model: RJDModel,
    x0,
    times: Sequence[float],
    dt: float,
    n_paths: int,
    seed: int,
    threads: int = 1,
    count_jumps: bool = False,
    stream_key: Tuple[int, ...] = (),
):
    """States of ``n_paths`` independent paths at the requested grid times.

    Returns an array of shape (len(times), n_paths); with ``count_jumps`` a
    pair (snapshots, jump counts per path). ``x0`` may be a scalar or an
    array of per-path starting states.
    """
    snap_idx = _snap_indices(times, dt)
    n_steps = int(snap_idx.max())
    g, s2 = _coeff_arrays(model)
    fam = model.jumps
    rho = fam.rate_bound()
    x0_arr = np.broadcast_to(np.asarray(x0, dtype=float), (n_paths,))
    if np.any(x0_arr < 0):
        raise ValueError("starting states must lie in [0, inf)")

    out = np.empty((len(snap_idx), n_paths))
    counts = np.zeros(n_paths, dtype=np.int64)
    snap_map: dict = {}
    for pos, step in enumerate(snap_idx):
        snap_map.setdefault(int(step), []).append(pos)

    def worker(chunk_index: int, start: int, size: int) -> None:
        gen = substream(seed, *stream_key, chunk_index)
        x = x0_arr[start : start + size].copy()
        ell = np.zeros(size)
        cnt = np.zeros(size, dtype=np.int64)
        t_prop = gen.exponential(1.0 / rho, size=size) if rho > 0 else np.full(size, np.inf)
        for pos in snap_map.get(0, []):
            out[pos, start : start + size] = x
        for step in range(1, n_steps + 1):
            t_cur, t_next = (step - 1) * dt, step * dt
            h_close = np.full(size, dt)
            idx = np.nonzero(t_prop <= t_next)[0]
            if idx.size:
                xs, ells, tp = x[idx], ell[idx], t_prop[idx]
                cur = np.full(idx.size, t_cur)
                while True:
                    j = np.nonzero(tp <= t_next)[0]
                    if j.size == 0:
                        break
                    hseg = tp[j] - cur[j]
                    xi = gen.standard_normal(j.size)
                    xs_j, ell_j = _reflect_step(xs[j], ells[j], hseg, xi, g, s2)
                    xs[j], ells[j] = xs_j, ell_j
                    cur[j] = tp[j]
                    u_acc = gen.uniform(size=j.size)
                    acc = u_acc * rho < np.asarray(fam.rate(xs[j]), dtype=float)
                    ja = j[acc]
                    if ja.size:
                        u_dest = np.maximum(gen.uniform(size=ja.size), _U_FLOOR)
                        xs[ja] = np.asarray(fam.sample(xs[ja], u_dest), dtype=float)
                        cnt[idx[ja]] += 1
                    tp[j] = tp[j] + gen.exponential(1.0 / rho, size=j.size)
                x[idx], ell[idx], t_prop[idx] = xs, ells, tp
                h_close[idx] = t_next - cur
            xi = gen.standard_normal(size)
            x, ell = _reflect_step(x, ell, h_close, xi, g, s2)
            for pos in snap_map.get(step, []):
                out[pos, start : start + size] = x
        counts[start : start + size] = cnt

    _run_chunks(n_paths, threads, worker)
    return (out, counts) if count_jumps else out


def coupled_states(
    model: RJDModel,
    x1: float,
    x2: float,
    times: Sequence[float],
    dt: float,
    n_paths: int,
    seed: int,
    threads: int = 1,
    meet_threshold: Optional[float] = None,
    stream_key: Tuple[int, ...] = (),
):
    """Monotone coupled pairs: shared noise, clock and jump uniforms per pair.

    Returns (low, high) snapshot arrays of shape (len(times), n_paths); with
    ``meet_threshold`` set, also the first grid time both paths of a pair sat
    below it (nan where never). The family must have state-independent
    intensity (every stochastically ordered family does); orderedness itself
    is the caller's contract.
    """
    if not 0 <= x1 <= x2:
        raise ValueError("need 0 <= x1 <= x2")
    if not model.jumps.constant_rate():
        raise ValueError("coupled ensembles need a state-independent jump intensity")
    snap_idx = _snap_indices(times, dt)
    n_steps = int(snap_idx.max())
    g, s2 = _coeff_arrays(model)
    fam = model.jumps
    rho = fam.rate_bound()

    lo_out = np.empty((len(snap_idx), n_paths))
    hi_out = np.empty((len(snap_idx), n_paths))
    meets = np.full(n_paths, np.nan)
    snap_map: dict = {}
    for pos, step in enumerate(snap_idx):
        snap_map.setdefault(int(step), []).append(pos)
    track_meet = meet_threshold is not None

    def worker(chunk_index: int, start: int, size: int) -> None:
        gen = substream(seed, *stream_key, chunk_index)
        a = np.full(size, float(x1))
        b = np.full(size, float(x2))
        ell_a = np.zeros(size)
        ell_b = np.zeros(size)
        met = np.zeros(size, dtype=bool)
        meet_t = np.full(size, np.nan)
        if track_meet:
            met = (a <= meet_threshold) & (b <= meet_threshold)
            meet_t[met] = 0.0
        t_prop = gen.exponential(1.0 / rho, size=size) if rho > 0 else np.full(size, np.inf)
        for pos in snap_map.get(0, []):
            lo_out[pos, start : start + size] = a
            hi_out[pos, start : start + size] = b
        for step in range(1, n_steps + 1):
            t_cur, t_next = (step - 1) * dt, step * dt
            h_close = np.full(size, dt)
            idx = np.nonzero(t_prop <= t_next)[0]
            if idx.size:
                aa, bb = a[idx], b[idx]
                la, lb = ell_a[idx], ell_b[idx]
                tp = t_prop[idx]
                cur = np.full(idx.size, t_cur)
                while True:
                    j = np.nonzero(tp <= t_next)[0]
                    if j.size == 0:
                        break
                    hseg = tp[j] - cur[j]
                    xi = gen.standard_normal(j.size)
                    aj, laj = _reflect_step(aa[j], la[j], hseg, xi, g, s2)
                    bj, lbj = _reflect_step(bb[j], lb[j], hseg, xi, g, s2)
                    aa[j], la[j] = aj, laj
                    bb[j], lb[j] = bj, lbj
                    cur[j] = tp[j]
                    u_acc = gen.uniform(size=j.size)
                    acc = u_acc * rho < np.asarray(fam.rate(aa[j]), dtype=float)
                    ja = j[acc]
                    if ja.size:
                        u_dest = np.maximum(gen.uniform(size=ja.size), _U_FLOOR)
                        aa[ja] = np.asarray(fam.sample(aa[ja], u_dest), dtype=float)
                        bb[ja] = np.asarray(fam.sample(bb[ja], u_dest), dtype=float)
                    tp[j] = tp[j] + gen.exponential(1.0 / rho, size=j.size)
                a[idx], b[idx] = aa, bb
                ell_a[idx], ell_b[idx] = la, lb
                t_prop[idx] = tp
                h_close[idx] = t_next - cur
            xi = gen.standard_normal(size)
            a, ell_a = _reflect_step(a, ell_a, h_close, xi, g, s2)
            b, ell_b = _reflect_step(b, ell_b, h_close, xi, g, s2)
            if track_meet:
                new = ~met & (a <= meet_threshold) & (b <= meet_threshold)
                meet_t[new] = step * dt
                met |= new
            for pos in snap_map.get(step, []):
                lo_out[pos, start : start + size] = a
                hi_out[pos, start : start + size] = b
        meets[start : start + size] = meet_t

    _run_chunks(n_paths, threads, worker)
    if track_meet:
        return lo_out, hi_out, meets
    return lo_out, hi_out
