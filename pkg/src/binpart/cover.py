"""Covers of a demand vector by bin configurations, and concrete packings.

A cover is a multiset of configurations whose per-type item counts dominate
a demand.  :func:`min_cover` finds a smallest cover over a given
:class:`~binpart.configs.ConfigSet`; :func:`materialize` turns covers into an
item-to-bin assignment for a real instance.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import kernels
from .configs import BinConfiguration, ConfigSet, enumerate_configs, size_set
from .core import Instance, SizeLike, to_fraction

__all__ = [
    "CoverError",
    "ScaleExceeded",
    "Demand",
    "Cover",
    "Packing",
    "PackingReport",
    "min_cover",
    "min_cover_exact",
    "materialize",
    "validate_packing",
    "DEFAULT_MAX_STATES",
]

DEFAULT_MAX_STATES = 200_000


class CoverError(Exception):
    """No cover was found; ``status`` says why.

    ``uncoverable``: some demanded type appears in no configuration.
    ``depth``: every cover needs more bins than the depth cap allows.
    ``budget``: the search gave up after ``max_states`` expansions.
    ``infeasible``: the configuration set itself is empty.
    """

    def __init__(self, status: str, message: str = ""):
        super().__init__(message or status)
        self.status = status


class ScaleExceeded(ValueError):
    """An exact routine was asked to solve something beyond its guard."""


@dataclass(frozen=True)
class Demand:
    """Remaining size per type; components are non-negative rationals."""

    sizes: tuple[Fraction, ...]
    remaining: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.sizes) != len(self.remaining):
            raise ValueError("sizes and demand differ in length")
        if any(r < 0 for r in self.remaining):
            raise ValueError("demand components must be non-negative")

    @classmethod
    def of(cls, sizes: Sequence[SizeLike], remaining: Sequence[SizeLike]) -> "Demand":
        return cls(tuple(to_fraction(s) for s in sizes), tuple(to_fraction(r) for r in remaining))

    @classmethod
    def from_counts(cls, sizes: Sequence[SizeLike], counts: Sequence[int]) -> "Demand":
        fr = tuple(to_fraction(s) for s in sizes)
        return cls(fr, tuple(n * s for n, s in zip(counts, fr)))

    def item_counts(self) -> tuple[int, ...]:
        """Whole items needed per type; equal counts need identical covers."""
        return tuple(math.ceil(r / s) for r, s in zip(self.remaining, self.sizes))

    @property
    def total(self) -> Fraction:
        return sum(self.remaining, Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.remaining)


@dataclass(frozen=True)
class Cover:
    entries: tuple[tuple[BinConfiguration, int], ...]
    delta: Fraction | None
    demand: Demand

    @property
    def size(self) -> int:
        return sum(m for _, m in self.entries)

    def supplied_counts(self) -> tuple[int, ...]:
        k = len(self.demand.sizes)
        out = [0] * k
        for cfg, mult in self.entries:
            for i, m in enumerate(cfg.counts):
                out[i] += mult * m
        return tuple(out)

    def dominates(self) -> bool:
        return all(x >= q for x, q in zip(self.supplied_counts(), self.demand.item_counts()))

    @property
    def n_distinct(self) -> int:
        return len(self.entries)

    @classmethod
    def from_bins(cls, sizes: tuple[Fraction, ...], bins: Sequence[tuple[int, ...]], delta=None) -> "Cover":
        tally = Counter(tuple(b) for b in bins)
        entries = tuple((BinConfiguration(c, sizes), m) for c, m in sorted(tally.items()))
        k = len(sizes)
        totals = [0] * k
        for c, m in tally.items():
            for i in range(k):
                totals[i] += c[i] * m
        return cls(entries, delta, Demand.from_counts(sizes, totals))


def _entries_from_indices(configs: ConfigSet, indices: Sequence[int]):
    tally = Counter(indices)
    return tuple((configs[j], tally[j]) for j in sorted(tally))


def min_cover(
    demand: Demand,
    configs: ConfigSet,
    max_depth: int | None = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> Cover:
    """Smallest cover of ``demand`` using only configurations in ``configs``.

    Residuals are clamped at zero and keyed by whole-item counts.  Raises
    :class:`CoverError` when no cover exists within ``max_depth`` bins or the
    search exceeds ``max_states`` expansions.
    """
    if tuple(demand.sizes) != tuple(configs.sizes):
        raise ValueError("demand and configuration set use different size vectors")
    if demand.is_zero():
        return Cover((), configs.delta, demand)
    if len(configs) == 0:
        raise CoverError("infeasible", "configuration set is empty")
    ss = size_set(list(configs.sizes))
    indices, status, _ = kernels.cover_search(
        list(demand.item_counts()), configs.count_vectors(), list(ss.units), max_depth, max_states
    )
    if indices is None:
        raise CoverError(status, f"no cover over {len(configs)} configurations ({status})")
    return Cover(_entries_from_indices(configs, indices), configs.delta, demand)


def min_cover_exact(
    demand: Demand,
    sizes,
    delta: SizeLike,
    max_configs: int = 5000,
    max_states: int = DEFAULT_MAX_STATES,
) -> Cover:
    """Globally smallest cover over every configuration of waste <= delta.

    Meant as an oracle on small inputs; refuses configuration sets larger
    than ``max_configs`` and searches larger than ``max_states``.
    """
    cs = enumerate_configs(sizes, delta)
    if len(cs) > max_configs:
        raise ScaleExceeded(f"{len(cs)} configurations exceed the oracle limit {max_configs}")
    if len(cs) == 0 and not demand.is_zero():
        raise CoverError("infeasible", f"no configuration has waste <= {to_fraction(delta)}")
    try:
        return min_cover(Demand(cs.sizes, demand.remaining), cs, None, max_states)
    except CoverError as exc:
        if exc.status == "budget":
            raise ScaleExceeded(f"oracle search exceeded {max_states} states") from exc
        raise


@dataclass(frozen=True)
class Packing:
    """Bins as per-type count vectors over the types of ``instance``."""

    instance: Instance
    bins: tuple[tuple[int, ...], ...]

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    def fills_units(self) -> list[int]:
        s = self.instance.sizes_units
        return [sum(m * x for m, x in zip(b, s)) for b in self.bins]

    def fills(self) -> list[Fraction]:
        u = self.instance.u
        return [Fraction(f, u) for f in self.fills_units()]

    def totals(self) -> tuple[int, ...]:
        k = self.instance.k
        out = [0] * k
        for b in self.bins:
            for i in range(k):
                out[i] += b[i]
        return tuple(out)

    def bin_items(self, j: int) -> list[Fraction]:
        out: list[Fraction] = []
        for m, s in zip(self.bins[j], self.instance.sizes):
            out.extend([s] * m)
        return sorted(out, reverse=True)

    def as_cover(self) -> Cover:
        return Cover.from_bins(self.instance.sizes, self.bins)

    @classmethod
    def from_assignment(cls, inst: Instance, types: Sequence[int], assign: Sequence[int]) -> "Packing":
        """Build from parallel lists of item type indices and bin indices."""
        nb = max(assign) + 1 if assign else 0
        rows = [[0] * inst.k for _ in range(nb)]
        for t, b in zip(types, assign):
            rows[b][t] += 1
        return cls(inst, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class PackingReport:
    ok: bool
    fills_ok: bool
    conservation_ok: bool
    bins: int
    waste: Fraction
    max_fill: Fraction | None
    min_fill: Fraction | None
    errors: tuple[str, ...] = field(default=())


def validate_packing(inst: Instance, p: Packing) -> PackingReport:
    errors = []
    if p.instance.sizes_units != inst.sizes_units or p.instance.u != inst.u:
        errors.append("packing refers to a different type vector")
        return PackingReport(False, False, False, p.n_bins, Fraction(0), None, None, tuple(errors))
    fills = p.fills_units()
    fills_ok = True
    for j, f in enumerate(fills):
        if f > inst.u:
            fills_ok = False
            errors.append(f"bin {j} overfull: fill {Fraction(f, inst.u)} > 1")
        if any(m < 0 for m in p.bins[j]):
            fills_ok = False
            errors.append(f"bin {j} has a negative count")
    totals = p.totals()
    conservation_ok = totals == inst.counts
    if not conservation_ok:
        for i, (got, want) in enumerate(zip(totals, inst.counts)):
            if got != want:
                errors.append(f"type {inst.sizes[i]}: packed {got}, instance has {want}")
    waste = p.n_bins - inst.total
    mx = Fraction(max(fills), inst.u) if fills else None
    mn = Fraction(min(fills), inst.u) if fills else None
    ok = fills_ok and conservation_ok
    return PackingReport(ok, fills_ok, conservation_ok, p.n_bins, waste, mx, mn, tuple(errors))


def materialize(
    inst: Instance,
    covers: Sequence[tuple[Cover, int]],
    allow_shortfall: bool = False,
) -> Packing:
    """Open one bin per configuration occurrence and fill it with real items.

    Each bin takes up to ``m_i`` of the still-unplaced items of type ``i``,
    so bins near the end may come out under-filled.  Items the covers leave
    over are placed first-fit-decreasing into existing bins, then new ones;
    that is only allowed with ``allow_shortfall``.  Empty bins are dropped.
    """
    k = inst.k
    supplied = [0] * k
    for cover, reps in covers:
        if len(cover.demand.sizes) != k or tuple(cover.demand.sizes) != inst.sizes:
            raise ValueError("cover does not match the instance's types")
        for i, x in enumerate(cover.supplied_counts()):
            supplied[i] += reps * x
    short = [max(0, n - s) for n, s in zip(inst.counts, supplied)]
    if any(short) and not allow_shortfall:
        raise ValueError(f"covers do not dominate the instance (short by {short})")

    left = list(inst.counts)
    bins: list[list[int]] = []
    rooms: list[int] = []
    su = inst.sizes_units
    for cover, reps in covers:
        for _ in range(reps):
            for cfg, mult in cover.entries:
                for _ in range(mult):
                    row = [0] * k
                    fill = 0
                    for i, m in enumerate(cfg.counts):
                        if m and left[i]:
                            take = m if m < left[i] else left[i]
                            row[i] = take
                            left[i] -= take
                            fill += take * su[i]
                    if fill:
                        bins.append(row)
                        rooms.append(inst.u - fill)
    # leftovers, largest first, into the first bin with room
    for i in range(k - 1, -1, -1):
        s = su[i]
        while left[i]:
            for j, room in enumerate(rooms):
                if s <= room:
                    break
            else:
                bins.append([0] * k)
                rooms.append(inst.u)
                j = len(bins) - 1
            fit = min(left[i], rooms[j] // s)
            bins[j][i] += fit
            rooms[j] -= fit * s
            left[i] -= fit
    return Packing(inst, tuple(tuple(b) for b in bins))
