"""Bin configurations with bounded waste.

A configuration is a per-type count vector for one bin.  The set of
configurations whose fill lies in ``[1 - delta, 1]`` is enumerated directly
(:func:`enumerate_configs`, used as an oracle) or encoded as a layered
knapsack DAG (:class:`KnapsackGraph`) whose source-to-sink paths are exactly
those configurations.  Random walks over the pruned graph sample them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .core import Instance, SizeLike, to_fraction

__all__ = [
    "BinConfiguration",
    "ConfigSet",
    "KnapsackGraph",
    "SizeSet",
    "size_set",
    "enumerate_configs",
    "delta_feasible",
    "min_delta",
    "build_kpg",
    "prune_useless",
    "sample_configs",
    "make_rng",
]


@dataclass(frozen=True)
class SizeSet:
    """Distinct sizes on a common integer grid with per-type copy caps."""

    units: tuple[int, ...]
    capacity: int
    caps: tuple[int, ...]

    @property
    def sizes(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(s, self.capacity) for s in self.units)

    @property
    def k(self) -> int:
        return len(self.units)

    def min_fill_units(self, delta: Fraction) -> int:
        """Smallest integer fill with waste at most ``delta``."""
        return max(0, math.ceil((1 - delta) * self.capacity))


def size_set(sizes: Union[Instance, SizeSet, Sequence[SizeLike]]) -> SizeSet:
    """Normalize sizes to a :class:`SizeSet`.

    An :class:`Instance` contributes its true counts as caps; a bare list of
    sizes is capped at ``floor(1/s)`` copies only.
    """
    if isinstance(sizes, SizeSet):
        return sizes
    if isinstance(sizes, Instance):
        return SizeSet(sizes.sizes_units, sizes.u, sizes.caps)
    fracs = [to_fraction(s) for s in sizes]
    for f in fracs:
        if f <= 0 or f > 1:
            raise ValueError(f"size {f} outside (0, 1]")
    if len(set(fracs)) != len(fracs):
        raise ValueError("sizes must be distinct")
    u = 1
    for f in fracs:
        u = math.lcm(u, f.denominator)
    units = tuple(int(f * u) for f in fracs)
    return SizeSet(units, u, tuple(u // s for s in units))


@dataclass(frozen=True)
class BinConfiguration:
    counts: tuple[int, ...]
    sizes: tuple[Fraction, ...] = field(compare=False, repr=False)

    @property
    def fill(self) -> Fraction:
        return sum((m * s for m, s in zip(self.counts, self.sizes)), Fraction(0))

    @property
    def waste(self) -> Fraction:
        return 1 - self.fill

    @property
    def size_vector(self) -> tuple[Fraction, ...]:
        return tuple(m * s for m, s in zip(self.counts, self.sizes))

    @property
    def n_items(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        parts = [f"{m}x{s}" for m, s in zip(self.counts, self.sizes) if m]
        return "{" + ", ".join(parts) + f"}} fill={self.fill}"


@dataclass(frozen=True)
class ConfigSet:
    """Distinct configurations, all with waste at most ``delta``."""

    sizes: tuple[Fraction, ...]
    delta: Fraction
    configs: tuple[BinConfiguration, ...]
    provenance: str = "exhaustive"
    requested: int | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self) -> Iterator[BinConfiguration]:
        return iter(self.configs)

    def __getitem__(self, i: int) -> BinConfiguration:
        return self.configs[i]

    def count_vectors(self) -> list[tuple[int, ...]]:
        return [c.counts for c in self.configs]

    def as_set(self) -> frozenset:
        return frozenset(c.counts for c in self.configs)


def enumerate_configs(sizes, delta: SizeLike) -> ConfigSet:
    """All configurations with fill in ``[1 - delta, 1]``, by brute force.

    >>> [c.counts for c in enumerate_configs(["0.5", "0.3"], "0.1")]
    [(0, 3), (2, 0)]
    """
    ss = size_set(sizes)
    delta = to_fraction(delta)
    lo = ss.min_fill_units(delta)
    k = ss.k
    out: list[tuple[int, ...]] = []
    counts = [0] * k

    def rec(t: int, fill: int) -> None:
        if t == k:
            if fill >= lo:
                out.append(tuple(counts))
            return
        s = ss.units[t]
        for m in range(min(ss.caps[t], (ss.capacity - fill) // s) + 1):
            counts[t] = m
            rec(t + 1, fill + m * s)
        counts[t] = 0

    rec(0, 0)
    fr = ss.sizes
    return ConfigSet(fr, delta, tuple(BinConfiguration(c, fr) for c in out), "exhaustive")


@dataclass
class KnapsackGraph:
    """Layered DAG of partial fills.

    Layer ``t`` holds the fills reachable using the first ``t`` types; an edge
    from ``(t, w)`` to ``(t + 1, w + m * s)`` places ``m`` copies of type
    ``t``.  Paths from ``(0, 0)`` to layer ``k`` correspond one-to-one with
    count vectors of fill at most 1.  Once pruned, only paths ending at fills
    in ``[1 - delta, 1]`` remain.
    """

    sizeset: SizeSet
    delta: Fraction
    layers: list[set[int]]
    edges: list[dict[int, list[tuple[int, int]]]]
    pruned: bool = False
    order: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.order:
            self.order = tuple(range(self.sizeset.k))

    def to_counts(self, path: Sequence[int]) -> tuple[int, ...]:
        """Map per-layer multiplicities back to canonical type order."""
        out = [0] * self.k
        for layer, m in enumerate(path):
            out[self.order[layer]] = m
        return tuple(out)

    @property
    def k(self) -> int:
        return self.sizeset.k

    @property
    def min_fill_units(self) -> int:
        return self.sizeset.min_fill_units(self.delta)

    @property
    def is_empty(self) -> bool:
        return not self.layers or 0 not in self.layers[0]

    def n_nodes(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def n_edges(self) -> int:
        return sum(len(out) for layer in self.edges for out in layer.values())

    def accepting(self) -> set[int]:
        lo = self.min_fill_units
        return {w for w in self.layers[self.k] if w >= lo} if not self.is_empty else set()

    def path_counts(self) -> list[dict[int, int]]:
        """Number of accepting completions from every node."""
        k = self.k
        counts: list[dict[int, int]] = [dict() for _ in range(k + 1)]
        if self.is_empty:
            return counts
        lo = self.min_fill_units
        counts[k] = {w: (1 if w >= lo else 0) for w in self.layers[k]}
        for t in range(k - 1, -1, -1):
            nxt = counts[t + 1]
            counts[t] = {w: sum(nxt.get(v, 0) for _, v in self.edges[t].get(w, ())) for w in self.layers[t]}
        return counts

    def count_paths(self) -> int:
        if self.is_empty:
            return 0
        return self.path_counts()[0].get(0, 0)

    def iter_paths(self) -> Iterator[tuple[int, ...]]:
        """Count vectors of every source-to-layer-``k`` path ending in an accepting fill."""
        if self.is_empty:
            return
        lo = self.min_fill_units
        k = self.k
        stack: list[int] = []

        def rec(t: int, w: int):
            if t == k:
                if w >= lo:
                    yield self.to_counts(stack)
                return
            for m, v in self.edges[t].get(w, ()):
                stack.append(m)
                yield from rec(t + 1, v)
                stack.pop()

        yield from rec(0, 0)

    def configurations(self) -> ConfigSet:
        fr = self.sizeset.sizes
        cfgs = tuple(BinConfiguration(c, fr) for c in self.iter_paths())
        return ConfigSet(fr, self.delta, cfgs, "exhaustive")


def build_kpg(sizes, delta: SizeLike, order: str = "decreasing") -> KnapsackGraph:
    """Layered knapsack graph over the types.

    ``order`` fixes which type each layer places: ``"decreasing"`` (largest
    first) or ``"increasing"``.  The set of paths is the same either way;
    the order only changes where a random walk spends its choices.
    """
    ss = size_set(sizes)
    delta = to_fraction(delta)
    cap = ss.capacity
    if order == "decreasing":
        perm = tuple(range(ss.k - 1, -1, -1)) if _ascending(ss) else tuple(
            sorted(range(ss.k), key=lambda i: -ss.units[i])
        )
    elif order == "increasing":
        perm = tuple(sorted(range(ss.k), key=lambda i: ss.units[i]))
    else:
        raise ValueError(f"unknown layer order {order!r}")
    layers: list[set[int]] = [{0}]
    edges: list[dict[int, list[tuple[int, int]]]] = []
    for t in range(ss.k):
        s = ss.units[perm[t]]
        c = ss.caps[perm[t]]
        nxt: set[int] = set()
        out: dict[int, list[tuple[int, int]]] = {}
        for w in sorted(layers[t]):
            lst = []
            for m in range(min(c, (cap - w) // s) + 1):
                v = w + m * s
                lst.append((m, v))
                nxt.add(v)
            out[w] = lst
        edges.append(out)
        layers.append(nxt)
    return KnapsackGraph(ss, delta, layers, edges, order=perm)


def _ascending(ss: SizeSet) -> bool:
    return all(a < b for a, b in zip(ss.units, ss.units[1:]))


def prune_useless(g: KnapsackGraph) -> KnapsackGraph:
    """Drop every node that lies on no path to an accepting fill.

    Layer by layer from the sink side this reaches the fixpoint of repeatedly
    deleting low-fill dead ends in one sweep.  An empty result means no
    configuration has waste at most ``delta``.
    """
    k = g.k
    if g.is_empty:
        return KnapsackGraph(g.sizeset, g.delta, [set() for _ in range(k + 1)], [dict() for _ in range(k)], True, g.order)
    lo = g.min_fill_units
    alive: list[set[int]] = [set() for _ in range(k + 1)]
    alive[k] = {w for w in g.layers[k] if w >= lo}
    new_edges: list[dict[int, list[tuple[int, int]]]] = [dict() for _ in range(k)]
    for t in range(k - 1, -1, -1):
        for w in g.layers[t]:
            kept = [(m, v) for m, v in g.edges[t].get(w, ()) if v in alive[t + 1]]
            if kept:
                alive[t].add(w)
                new_edges[t][w] = kept
    if 0 not in alive[0]:
        return KnapsackGraph(g.sizeset, g.delta, [set() for _ in range(k + 1)], [dict() for _ in range(k)], True, g.order)
    # keep only what the source still reaches
    reach: list[set[int]] = [{0}]
    for t in range(k):
        out = {w: new_edges[t][w] for w in reach[t]}
        new_edges[t] = out
        reach.append({v for lst in out.values() for _, v in lst})
    return KnapsackGraph(g.sizeset, g.delta, reach, new_edges, True, g.order)


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _pick(gen: np.random.Generator, out, weights=None) -> int:
    if weights is None:
        return int(gen.integers(len(out)))
    r = int(gen.integers(sum(weights)))
    j = 0
    while r >= weights[j]:
        r -= weights[j]
        j += 1
    return j


def _through_sets(g: KnapsackGraph, layer: int) -> list[set[int]]:
    """Nodes of layers ``0..layer`` from which a walk can place type ``layer``."""
    good = [set() for _ in range(layer + 1)]
    good[layer] = {w for w, out in g.edges[layer].items() if any(m > 0 for m, _ in out)}
    for t in range(layer - 1, -1, -1):
        good[t] = {w for w, out in g.edges[t].items() if any(v in good[t + 1] for _, v in out)}
    return good


def _walk(g: KnapsackGraph, gen, pc, through: int | None = None) -> tuple[int, ...]:
    good = _through_sets(g, through) if through is not None else None
    w = 0
    path = []
    for t in range(g.k):
        out = g.edges[t][w]
        if good is not None and t < through:
            out = [e for e in out if e[1] in good[t + 1]]
        elif good is not None and t == through:
            out = [e for e in out if e[0] > 0]
        weights = [pc[t + 1][v] for _, v in out] if pc is not None else None
        m, w = out[_pick(gen, out, weights)]
        path.append(m)
    return g.to_counts(path)


def sample_configs(
    g: KnapsackGraph,
    count: int,
    rng=None,
    weighted: bool = False,
    require: Sequence[int] = (),
) -> ConfigSet:
    """Random walks from the source of a pruned graph.

    Each step picks an outgoing edge uniformly; with ``weighted=True`` edges
    are weighted by the number of configurations below them, which makes the
    walk uniform over configurations.  Duplicate outcomes are dropped, so the
    result holds at most ``count`` configurations.

    ``require`` lists types that must appear in the sample.  Each required
    type not yet present gets one walk forced through an edge placing it;
    these walks count against ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not g.pruned:
        g = prune_useless(g)
    if g.is_empty:
        raise ValueError(f"no configuration has waste <= {g.delta}")
    seed = seed_of(rng)
    gen = make_rng(rng)
    pc = g.path_counts() if weighted else None
    layer_of = {t: i for i, t in enumerate(g.order)}
    seen: dict[tuple[int, ...], None] = {}
    walks = 0
    pending = [t for t in require]
    if pending:
        pending = [pending[i] for i in gen.permutation(len(pending))]
    for t in pending:
        if walks >= count:
            break
        if any(c[t] for c in seen):
            continue
        layer = layer_of[t]
        if not any(m > 0 for out in g.edges[layer].values() for m, _ in out):
            continue  # type cannot appear at this delta
        seen.setdefault(_walk(g, gen, pc, layer), None)
        walks += 1
    while walks < count:
        seen.setdefault(_walk(g, gen, pc), None)
        walks += 1
    fr = g.sizeset.sizes
    cfgs = tuple(BinConfiguration(c, fr) for c in seen)
    return ConfigSet(fr, g.delta, cfgs, "sampled", requested=count, seed=seed)


def seed_of(rng) -> int | None:
    return rng if isinstance(rng, int) and not isinstance(rng, bool) else None


def coverable_types(sizes, delta: SizeLike) -> list[bool]:
    """For each type, whether some configuration with waste <= delta contains it."""
    g = prune_useless(build_kpg(sizes, delta))
    if g.is_empty:
        return [False] * g.k
    present = [any(m > 0 for lst in g.edges[t].values() for m, _ in lst) for t in range(g.k)]
    out = [False] * g.k
    for t, ok in enumerate(present):
        out[g.order[t]] = ok
    return out


def delta_feasible(sizes, delta: SizeLike, types: Sequence[int] | None = None) -> bool:
    """True when every type appears in some configuration of waste <= delta.

    Repeating such configurations covers any demand, so this is exactly the
    condition for a finite cover to exist.  ``types`` restricts the check to
    the types a demand actually uses.
    """
    cov = coverable_types(sizes, delta)
    if types is None:
        return all(cov)
    return all(cov[i] for i in types)


def min_delta(sizes, epsilon: SizeLike, types: Sequence[int] | None = None) -> Fraction:
    """Smallest ``delta`` in ``epsilon, 2*epsilon, ... <= 1/2`` that is feasible.

    Returns 1/2 when nothing smaller works.  With the default ``floor(1/s)``
    caps 1/2 is always feasible; with true item counts it may not be, so
    callers holding an :class:`Instance` should check :func:`delta_feasible`.
    """
    eps = to_fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("epsilon must lie in (0, 1/2)")
    half = Fraction(1, 2)
    ss = size_set(sizes)
    delta = eps
    while delta <= half:
        if delta_feasible(ss, delta, types):
            return delta
        delta += eps
    return half
