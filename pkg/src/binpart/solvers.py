"""Packing algorithms.

Baselines (next/first/best fit and their decreasing variants), an exact
branch and bound for small instances, and the two near-identical
partitioning solvers:

* :func:`algorithm_b` cuts the distribution vector into ``l`` copies of a
  ``c``-length segment, solves one truncated segment exactly and repeats it;
* :func:`heuristic_c` does the same but covers each segment with a handful of
  sampled low-waste configurations.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import kernels
from .bounds import bound_report
from .configs import ConfigSet, SizeSet, build_kpg, delta_feasible, make_rng, min_delta, prune_useless, sample_configs
from .core import Instance, SizeLike, distribution_vector, segment, to_fraction
from .cover import (
    DEFAULT_MAX_STATES,
    Cover,
    CoverError,
    Demand,
    Packing,
    ScaleExceeded,
    materialize,
    min_cover,
    validate_packing,
)

log = logging.getLogger(__name__)

__all__ = [
    "SolveDiagnostics",
    "next_fit",
    "first_fit",
    "best_fit",
    "nfd",
    "ffd",
    "bfd",
    "exact_min_packing",
    "algorithm_b",
    "heuristic_c",
    "c_range",
    "BASELINES",
]


@dataclass
class SolveDiagnostics:
    algo: str
    epsilon: Fraction | None = None
    c_star: int | None = None
    delta_star: Fraction | None = None
    ratios: dict[int, Fraction] = field(default_factory=dict)
    deltas: dict[int, Fraction] = field(default_factory=dict)
    n_configs: dict[int, int] = field(default_factory=dict)
    skipped: dict[int, str] = field(default_factory=dict)
    n_configs_used: int | None = None
    escalations: int = 0
    copies: int | None = None
    segment_bins: int | None = None
    residual_bins: int | None = None
    residual_method: str | None = None
    fallback: bool = False
    bins: int = 0
    lb_size: int = 0
    lb_waste: int = 0
    runtime_s: float = 0.0
    segment_integral: bool | None = None
    cover_configs: list[tuple[int, ...]] = field(default_factory=list)


# --- baselines ----------------------------------------------------------

def _order(inst: Instance, order: str, sequence: Sequence[SizeLike] | None):
    if sequence is not None:
        idx = inst.type_index()
        types = [idx[inst.grid.to_units(s)] for s in sequence]
        if sorted(types) != sorted(t for t in range(inst.k) for _ in range(inst.counts[t])):
            raise ValueError("sequence is not a permutation of the instance's items")
        if order == "decreasing":
            types.sort(key=lambda t: -t)
        return types
    if order == "given":
        return [t for t in range(inst.k) for _ in range(inst.counts[t])]
    if order == "decreasing":
        return [t for t in range(inst.k - 1, -1, -1) for _ in range(inst.counts[t])]
    raise ValueError(f"unknown order {order!r}")


def _run(kernel, inst: Instance, order: str, sequence) -> Packing:
    types = _order(inst, order, sequence)
    sizes = [inst.sizes_units[t] for t in types]
    return Packing.from_assignment(inst, types, kernel(sizes, inst.u))


def next_fit(inst: Instance, order: str = "given", sequence=None) -> Packing:
    """Only the most recently opened bin accepts items."""
    return _run(kernels.next_fit, inst, order, sequence)


def first_fit(inst: Instance, order: str = "given", sequence=None) -> Packing:
    return _run(kernels.first_fit, inst, order, sequence)


def best_fit(inst: Instance, order: str = "given", sequence=None) -> Packing:
    """Fullest bin that still fits; ties go to the lowest index."""
    return _run(kernels.best_fit, inst, order, sequence)


def nfd(inst: Instance) -> Packing:
    return next_fit(inst, "decreasing")


def ffd(inst: Instance) -> Packing:
    return first_fit(inst, "decreasing")


def bfd(inst: Instance) -> Packing:
    return best_fit(inst, "decreasing")


BASELINES = {
    "nf": next_fit,
    "ff": first_fit,
    "bf": best_fit,
    "nfd": nfd,
    "ffd": ffd,
    "bfd": bfd,
}


# --- exact branch and bound ---------------------------------------------

def exact_min_packing(inst: Instance, max_items: int = 60, max_nodes: int = 500_000) -> Packing:
    """Optimal packing of a small instance.

    Each branch closes one bin around the largest unpacked item, trying only
    maximal configurations (nothing left fits).  First-fit-decreasing seeds
    the incumbent.  Pruning uses the size bound under the largest achievable
    fill together with the count of items above one half.
    """
    if inst.n > max_items:
        raise ScaleExceeded(f"{inst.n} items exceed the exact limit {max_items}")
    incumbent = ffd(inst)
    if inst.n == 0:
        return incumbent
    u = inst.u
    sizes = inst.sizes_units
    k = inst.k
    f_max = bound_report(inst).f_max * u  # in units, integral
    f_max = int(f_max)
    half = [s * 2 > u for s in sizes]

    def lower(rem) -> int:
        total = 0
        big = 0
        for i in range(k):
            if rem[i]:
                total += rem[i] * sizes[i]
                if half[i]:
                    big += rem[i]
        lb = -(-total // f_max)
        return lb if lb > big else big

    best_bins = [incumbent.n_bins]
    best_sol: list[list[tuple[int, ...]] | None] = [None]
    if lower(inst.counts) >= best_bins[0]:
        return incumbent

    seen: dict[tuple[int, ...], int] = {}
    nodes = [0]
    stack: list[tuple[int, ...]] = []

    def maximal_configs(rem: tuple[int, ...], top: int) -> list[tuple[int, ...]]:
        out = []
        row = [0] * k
        row[top] = 1
        start_room = u - sizes[top]

        def rec(i: int, room: int):
            # types are tried from large to small
            if i < 0:
                # maximal: no remaining item fits in the leftover room
                for j in range(k):
                    if rem[j] - row[j] > 0 and sizes[j] <= room:
                        return
                out.append(tuple(row))
                return
            avail = rem[i] - row[i]
            hi = min(avail, room // sizes[i])
            base = row[i]
            for m in range(hi, -1, -1):
                row[i] = base + m
                rec(i - 1, room - m * sizes[i])
            row[i] = base

        rec(k - 1, start_room)
        out.sort(key=lambda c: -sum(m * s for m, s in zip(c, sizes)))
        return out

    def dfs(rem: tuple[int, ...], used: int):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise ScaleExceeded(f"branch and bound exceeded {max_nodes} nodes")
        if not any(rem):
            if used < best_bins[0]:
                best_bins[0] = used
                best_sol[0] = list(stack)
            return
        if used + lower(rem) >= best_bins[0]:
            return
        prev = seen.get(rem)
        if prev is not None and prev <= used:
            return
        seen[rem] = used
        top = max(i for i in range(k) if rem[i])
        for cfg in maximal_configs(rem, top):
            stack.append(cfg)
            dfs(tuple(r - c for r, c in zip(rem, cfg)), used + 1)
            stack.pop()
            if best_bins[0] <= lower(inst.counts):
                return

    dfs(tuple(inst.counts), 0)
    if best_sol[0] is None:
        return incumbent
    return Packing(inst, tuple(best_sol[0]))


def _lift(p: Packing, parent: Instance) -> list[tuple[int, ...]]:
    """Re-index bins of a sub-instance packing onto the parent's types."""
    idx = parent.type_index()
    pos = [idx[s] for s in p.instance.sizes_units]
    out = []
    for b in p.bins:
        row = [0] * parent.k
        for j, m in enumerate(b):
            row[pos[j]] = m
        out.append(tuple(row))
    return out


def c_range(epsilon: SizeLike) -> range:
    eps = to_fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("epsilon must lie in (0, 1/2)")
    return range(math.ceil(1 / eps), math.ceil(2 / eps) + 1)


def _finish(inst: Instance, packing: Packing, diag: SolveDiagnostics, t0: float):
    report = validate_packing(inst, packing)
    if not report.ok:
        raise RuntimeError("internal error: invalid packing: " + "; ".join(report.errors[:5]))
    b = bound_report(inst)
    diag.bins = packing.n_bins
    diag.lb_size = b.lb_size
    diag.lb_waste = b.lb_waste
    diag.runtime_s = time.perf_counter() - t0
    return packing, diag


def _pack_small(inst: Instance, max_items: int) -> tuple[Packing, str]:
    if inst.n == 0:
        return Packing(inst, ()), "empty"
    if inst.n <= max_items:
        try:
            return exact_min_packing(inst, max_items), "exact"
        except ScaleExceeded:
            pass
    return ffd(inst), "ffd"


# --- Algorithm B --------------------------------------------------------

def algorithm_b(inst: Instance, epsilon: SizeLike, max_items: int = 60) -> tuple[Packing, SolveDiagnostics]:
    """Repeat an exactly packed segment of the distribution vector.

    For every ``c`` in ``[ceil(1/eps), ceil(2/eps)]`` the ``c``-length
    segment is truncated to whole items and packed optimally; its packing
    ratio is bins over the truncated length.  The best segment is repeated
    ``floor(|d| / c*)`` times and the leftover items are packed separately.
    """
    t0 = time.perf_counter()
    eps = to_fraction(epsilon)
    cs = c_range(eps)
    diag = SolveDiagnostics("algob", eps)
    if inst.n == 0:
        return _finish(inst, Packing(inst, ()), diag, t0)
    d = distribution_vector(inst)
    total = d.length
    best = None
    for c in cs:
        if c > total:
            diag.skipped[c] = "segment longer than instance"
            continue
        seg = segment(d, c)
        counts = seg.item_counts("floor")
        sub = inst.with_counts(counts)
        if sub.n == 0:
            diag.skipped[c] = "segment holds no whole item"
            continue
        try:
            p = exact_min_packing(sub, max_items)
        except ScaleExceeded as exc:
            diag.skipped[c] = str(exc)
            continue
        ratio = Fraction(p.n_bins) / sub.total
        diag.ratios[c] = ratio
        if best is None or ratio < best[0]:
            best = (ratio, c, counts, p, seg.is_integral())
    if best is None:
        # short instances: nothing to partition, pack the whole thing
        if total < cs.start:
            packing, method = _pack_small(inst, max_items)
            diag.residual_method = method
            diag.residual_bins = packing.n_bins
            diag.copies = 0
            return _finish(inst, packing, diag, t0)
        raise ScaleExceeded("every segment length exceeded the exact solver's guard")
    ratio, c_star, counts, seg_pack, integral = best
    copies = math.floor(total / c_star)
    residual = [n - copies * q for n, q in zip(inst.counts, counts)]
    res_inst = inst.with_counts(residual)
    res_pack, method = _pack_small(res_inst, max_items)
    seg_cover = Cover.from_bins(inst.sizes, _lift(seg_pack, inst))
    res_cover = Cover.from_bins(inst.sizes, _lift(res_pack, inst))
    packing = materialize(inst, [(seg_cover, copies), (res_cover, 1)])
    diag.c_star = c_star
    diag.copies = copies
    diag.segment_bins = seg_pack.n_bins
    diag.residual_bins = res_pack.n_bins
    diag.residual_method = method
    diag.segment_integral = integral
    diag.cover_configs = [cfg.counts for cfg, _ in seg_cover.entries]
    diag.n_configs_used = len(seg_cover.entries)
    return _finish(inst, packing, diag, t0)


# --- Heuristic C --------------------------------------------------------

def _segment_graph(inst: Instance, counts, eps: Fraction):
    """Knapsack graph for one demand vector, capped at its own item counts.

    Returns ``(delta, graph)`` for the smallest multiple of ``eps`` up to 1/2
    at which every demanded type is coverable, or ``None`` if there is none.
    """
    caps = tuple(min(q, inst.u // s) for q, s in zip(counts, inst.sizes_units))
    ss = SizeSet(inst.sizes_units, inst.u, caps)
    need = [i for i, q in enumerate(counts) if q]
    delta = min_delta(ss, eps, need)
    if not delta_feasible(ss, delta, need):
        return None
    return delta, prune_useless(build_kpg(ss, delta))


def _sampled_cover(graph, demand: Demand, n0: int, n_max: int, rounds: int, rng, depth, max_states, weighted, directed):
    """Cover ``demand`` from random samples, doubling the sample on failure."""
    n = n0
    last = None
    for attempt in range(rounds):
        need = [i for i, q in enumerate(demand.item_counts()) if q] if directed else ()
        sample = sample_configs(graph, n, rng, weighted=weighted, require=need)
        sample = ConfigSet(demand.sizes, sample.delta, tuple(sample), "sampled", n)
        try:
            cover = min_cover(demand, sample, depth, max_states)
            return cover, sample, attempt
        except CoverError as exc:
            last = exc
            n = min(2 * n, n_max)
    raise last


def heuristic_c(
    inst: Instance,
    epsilon: SizeLike,
    seed: int = 0,
    n_max: int = 25,
    rounds: int = 4,
    weighted: bool = True,
    directed: bool = True,
    max_states: int = DEFAULT_MAX_STATES,
    max_items: int = 60,
) -> tuple[Packing, SolveDiagnostics]:
    """Partition into identical segments covered by sampled configurations.

    For each segment length ``c`` the segment is truncated to whole items.
    Its own ``delta_c`` is the smallest multiple of ``epsilon`` (capped at
    1/2) at which every type in the segment fits in a configuration of waste
    at most ``delta_c`` that uses no more copies of a type than the segment
    holds.  A random sample of ``ceil(c / (1 - delta_c))`` such
    configurations (at most ``n_max``) is drawn from the knapsack graph and
    the segment is covered with as few of them as possible; failed covers
    are retried with a doubled sample, up to ``rounds`` attempts.  The
    cheapest segment per unit size is repeated.  Leftover items are either
    packed on their own (exactly when small, else by a sampled cover or FFD)
    or dropped first-fit-decreasing into the slack of the segment bins,
    whichever needs fewer bins.  If every
    segment fails, the better of FFD and BFD is returned with ``fallback``
    set.

    ``weighted`` samples configurations uniformly (by path counting) rather
    than by a uniform choice at every layer.  ``directed`` forces at least
    one sampled configuration through each demanded type.
    """
    t0 = time.perf_counter()
    eps = to_fraction(epsilon)
    cs = c_range(eps)
    diag = SolveDiagnostics("heurc", eps)
    if inst.n == 0:
        return _finish(inst, Packing(inst, ()), diag, t0)

    d = distribution_vector(inst)
    total = d.length
    best = None
    for c in cs:
        if c > total:
            diag.skipped[c] = "segment longer than instance"
            continue
        seg = segment(d, c)
        counts = seg.item_counts("floor")
        if not any(counts):
            diag.skipped[c] = "segment holds no whole item"
            continue
        built = _segment_graph(inst, counts, eps)
        if built is None:
            diag.skipped[c] = "no feasible delta"
            continue
        delta, graph = built
        diag.deltas[c] = delta
        demand = Demand.from_counts(inst.sizes, counts)
        n0 = min(math.ceil(c / (1 - delta)), n_max)
        depth = math.ceil(c / (1 - delta)) + 2
        rng = make_rng([seed, c])
        try:
            cover, sample, esc = _sampled_cover(
                graph, demand, n0, n_max, rounds, rng, depth, max_states, weighted, directed
            )
        except CoverError as exc:
            diag.skipped[c] = f"cover failed ({exc.status})"
            continue
        ratio = cover.size / demand.total
        diag.ratios[c] = ratio
        diag.n_configs[c] = len(sample)
        key = (ratio, c, delta, len(sample))
        if best is None or key < best[0]:
            best = (key, c, delta, seg, counts, cover, sample, esc)

    if best is None:
        if total < cs.start:
            packing, method = _pack_small(inst, max_items)
            diag.residual_method = method
            diag.residual_bins = packing.n_bins
            diag.copies = 0
            return _finish(inst, packing, diag, t0)
        return _fallback(inst, diag, t0, "every segment length failed")

    _, c_star, delta, seg, counts, cover, sample, esc = best
    diag.delta_star = delta
    copies = math.floor(total / c_star)
    residual = [n - copies * q for n, q in zip(inst.counts, counts)]
    res_inst = inst.with_counts(residual)
    res_cover, method = _residual_cover(
        inst, res_inst, residual, eps, seed, n_max, rounds, max_states, max_items, weighted, directed
    )
    packing = materialize(inst, [(cover, copies), (res_cover, 1)])
    # leftovers can also go into the slack of the segment bins
    merged = materialize(inst, [(cover, copies)], allow_shortfall=True)
    res_bins = res_cover.size
    if merged.n_bins < packing.n_bins:
        packing = merged
        res_bins = max(0, merged.n_bins - copies * cover.size)
        method = "slack"
    diag.c_star = c_star
    diag.copies = copies
    diag.n_configs_used = len(sample)
    diag.escalations = esc
    diag.segment_bins = cover.size
    diag.residual_bins = res_bins
    diag.residual_method = method
    diag.segment_integral = seg.is_integral()
    diag.cover_configs = [cfg.counts for cfg, _ in cover.entries]
    return _finish(inst, packing, diag, t0)


def _residual_cover(inst, res_inst, residual, eps, seed, n_max, rounds, max_states, max_items, weighted, directed):
    """Pack what the repeated segment leaves over, as cheaply as the guards allow."""
    if res_inst.n == 0:
        return Cover((), None, Demand(inst.sizes, (Fraction(0),) * inst.k)), "empty"
    if res_inst.n <= max_items:
        try:
            p = exact_min_packing(res_inst, max_items)
            return Cover.from_bins(inst.sizes, _lift(p, inst)), "exact"
        except ScaleExceeded:
            pass
    built = _segment_graph(inst, residual, eps)
    if built is not None:
        delta, graph = built
        demand = Demand.from_counts(inst.sizes, residual)
        n0 = min(math.ceil(demand.total / (1 - delta)), n_max)
        depth = math.ceil(demand.total / (1 - delta)) + 2
        try:
            cover, _, _ = _sampled_cover(
                graph, demand, max(n0, 1), n_max, rounds, make_rng([seed, 0]), depth, max_states, weighted, directed
            )
            return cover, "cover"
        except CoverError:
            pass
    p = ffd(res_inst)
    return Cover.from_bins(inst.sizes, _lift(p, inst)), "ffd"


def _fallback(inst: Instance, diag: SolveDiagnostics, t0: float, why: str):
    log.info("heuristic C falls back to FFD/BFD: %s", why)
    a, b = ffd(inst), bfd(inst)
    diag.fallback = True
    diag.residual_method = why
    return _finish(inst, a if a.n_bins <= b.n_bins else b, diag, t0)
