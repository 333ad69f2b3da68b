"""Exact-arithmetic instances, distribution vectors and segments.

Item sizes live on a fixed-point grid: every size is an integer number of
``1/u`` units, so fills and sums are computed with
integers and never drift.  Public accessors hand out :class:`fractions.Fraction`
values; the ``*_units`` attributes expose the raw integers used by the solvers.

>>> inst = build_instance([("0.21", 1200), ("0.27", 600), ("0.29", 600), ("0.52", 600)])
>>> inst.n, inst.k
(3000, 4)
>>> [str(x) for x in distribution_vector(inst).components]
['252', '162', '174', '312']
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, TextIO, Union

SizeLike = Union[str, int, float, Fraction]

__all__ = [
    "SizeGrid",
    "Instance",
    "DistributionVector",
    "Segment",
    "to_fraction",
    "build_instance",
    "round_sizes",
    "distribution_vector",
    "segment",
    "truncate_segment",
    "format_size",
    "read_bpx",
    "write_bpx",
    "parse_bpx",
    "format_bpx",
]


def to_fraction(value: SizeLike) -> Fraction:
    """Convert ``value`` to an exact rational.

    Floats go through their shortest ``repr`` so ``0.21`` means 21/100 rather
    than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not sizes")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite size {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class SizeGrid:
    """All sizes are integer multiples of ``1/u``."""

    u: int = 100

    def __post_init__(self):
        if not isinstance(self.u, int) or self.u < 2:
            raise ValueError(f"grid denominator must be an integer >= 2, got {self.u!r}")

    def to_units(self, value: SizeLike) -> int:
        frac = to_fraction(value)
        scaled = frac * self.u
        if scaled.denominator != 1:
            raise ValueError(f"size {value} is not a multiple of 1/{self.u}")
        return scaled.numerator

    def to_fraction(self, units: int) -> Fraction:
        return Fraction(units, self.u)

    def refine(self, k: int) -> "SizeGrid":
        return SizeGrid(math.lcm(self.u, k))


@dataclass(frozen=True)
class Instance:
    """A multiset of item sizes aggregated by type.

    ``sizes_units`` is strictly increasing and every count is positive.
    """

    grid: SizeGrid
    sizes_units: tuple[int, ...]
    counts: tuple[int, ...]
    meta: Mapping[str, object] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.sizes_units) != len(self.counts):
            raise ValueError("sizes and counts differ in length")
        prev = 0
        for s, n in zip(self.sizes_units, self.counts):
            if s <= prev:
                raise ValueError("sizes must be strictly increasing and positive")
            if s > self.grid.u:
                raise ValueError(f"size {Fraction(s, self.grid.u)} exceeds the bin capacity")
            if n < 1:
                raise ValueError("type counts must be positive")
            prev = s

    @property
    def u(self) -> int:
        return self.grid.u

    @property
    def k(self) -> int:
        return len(self.sizes_units)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def sizes(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(s, self.grid.u) for s in self.sizes_units)

    @property
    def total_units(self) -> int:
        return sum(s * n for s, n in zip(self.sizes_units, self.counts))

    @property
    def total(self) -> Fraction:
        return Fraction(self.total_units, self.grid.u)

    @property
    def caps(self) -> tuple[int, ...]:
        """Most copies of each type a single bin can hold."""
        return tuple(min(n, self.grid.u // s) for s, n in zip(self.sizes_units, self.counts))

    def items_units(self, decreasing: bool = False) -> list[int]:
        """Expand into one size per item, in type order (or non-increasing)."""
        order = range(self.k - 1, -1, -1) if decreasing else range(self.k)
        out: list[int] = []
        for i in order:
            out.extend([self.sizes_units[i]] * self.counts[i])
        return out

    def type_index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.sizes_units)}

    def with_counts(self, counts: Sequence[int]) -> "Instance":
        """Sub-instance over the same types; zero-count types are dropped."""
        if len(counts) != self.k:
            raise ValueError("count vector has the wrong length")
        if any(c < 0 for c in counts):
            raise ValueError("negative count")
        pairs = [(s, c) for s, c in zip(self.sizes_units, counts) if c > 0]
        return Instance(self.grid, tuple(s for s, _ in pairs), tuple(c for _, c in pairs))

    def __str__(self) -> str:
        body = ", ".join(f"{Fraction(s, self.u)}x{n}" for s, n in zip(self.sizes_units, self.counts))
        return f"Instance(u={self.u}, [{body}])"


def build_instance(pairs: Iterable[tuple[SizeLike, int]], grid: SizeGrid | int = 100) -> Instance:
    """Aggregate ``(size, count)`` pairs into a canonical :class:`Instance`.

    Duplicate sizes are merged and zero counts dropped.  Sizes must be on the
    grid and in ``(0, 1]``.
    """
    if isinstance(grid, int):
        grid = SizeGrid(grid)
    agg: dict[int, int] = {}
    for size, count in pairs:
        frac = to_fraction(size)
        if frac <= 0 or frac > 1:
            raise ValueError(f"size {size} outside (0, 1]")
        if int(count) != count or count < 0:
            raise ValueError(f"count {count!r} for size {size} is not a non-negative integer")
        units = grid.to_units(frac)
        agg[units] = agg.get(units, 0) + int(count)
    kept = sorted((s, c) for s, c in agg.items() if c > 0)
    return Instance(grid, tuple(s for s, _ in kept), tuple(c for _, c in kept))


def instance_from_sizes(sizes: Iterable[SizeLike], grid: SizeGrid | int | None = None) -> Instance:
    """Build an instance from a flat list of item sizes.

    Without an explicit grid the coarsest grid holding every size is used.
    """
    fracs = [to_fraction(s) for s in sizes]
    if grid is None:
        u = 1
        for f in fracs:
            u = math.lcm(u, f.denominator)
        grid = SizeGrid(max(u, 2))
    return build_instance(((f, 1) for f in fracs), grid)


def round_sizes(inst: Instance, k: int) -> Instance:
    """Round every size up to the next multiple of ``1/k``.

    The result lives on the grid ``lcm(u, k)``; types that collide merge.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    grid = inst.grid.refine(k)
    pairs = []
    for s, n in zip(inst.sizes, inst.counts):
        rounded = Fraction(math.ceil(s * k), k)
        pairs.append((rounded, n))
    return build_instance(pairs, grid)


@dataclass(frozen=True)
class DistributionVector:
    """Per-type total size ``n_i * s_i``."""

    sizes: tuple[Fraction, ...]
    components: tuple[Fraction, ...]

    @property
    def length(self) -> Fraction:
        return sum(self.components, Fraction(0))

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class Segment:
    """A vector parallel to a distribution vector with component sum ``c``.

    Components may be fractional; :func:`truncate_segment` rounds them down
    to whole items.
    """

    c: Fraction
    sizes: tuple[Fraction, ...]
    components: tuple[Fraction, ...]

    @property
    def length(self) -> Fraction:
        return sum(self.components, Fraction(0))

    def item_counts(self, rounding: str = "floor") -> tuple[int, ...]:
        """Number of whole items of each type, rounded down or up."""
        op = math.floor if rounding == "floor" else math.ceil
        if rounding not in ("floor", "ceil"):
            raise ValueError(f"unknown rounding {rounding!r}")
        return tuple(op(t / s) for t, s in zip(self.components, self.sizes))

    def is_integral(self) -> bool:
        return all((t / s).denominator == 1 for t, s in zip(self.components, self.sizes))


def distribution_vector(inst: Instance) -> DistributionVector:
    if inst.k == 0:
        raise ValueError("empty instance has no distribution vector")
    sizes = inst.sizes
    return DistributionVector(sizes, tuple(s * n for s, n in zip(sizes, inst.counts)))


def segment(d: DistributionVector, c: SizeLike) -> Segment:
    c = to_fraction(c)
    total = d.length
    if c <= 0:
        raise ValueError("segment length must be positive")
    if c > total:
        raise ValueError(f"segment length {c} exceeds the vector length {total}")
    scale = c / total
    return Segment(c, d.sizes, tuple(x * scale for x in d.components))


def truncate_segment(t: Segment) -> Segment:
    comps = tuple(math.floor(x / s) * s for x, s in zip(t.components, t.sizes))
    return Segment(t.c, t.sizes, comps)


# --- BPX v1 text format -------------------------------------------------

_HEADER = re.compile(r"^bpx\s+1\s+(\d+)\s*$")


def format_size(frac: Fraction) -> str:
    den = frac.denominator
    # terminating decimal iff the reduced denominator only has factors 2 and 5
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{frac.numerator}/{den}"
    digits = 0
    while (frac * 10**digits).denominator != 1:
        digits += 1
    if digits == 0:
        return str(frac.numerator)
    scaled = frac.numerator * (10**digits // den)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, rest = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{rest:0{digits}d}"


def format_bpx(inst: Instance, meta: Mapping[str, object] | None = None) -> str:
    lines = [f"bpx 1 {inst.u}"]
    meta = dict(inst.meta if meta is None else meta)
    for key in sorted(meta):
        lines.append(f"# {key}: {meta[key]}")
    for s, n in zip(inst.sizes, inst.counts):
        lines.append(f"{format_size(s)} {n}")
    return "\n".join(lines) + "\n"


def parse_bpx(text: str) -> Instance:
    """Parse BPX v1, or a flat list with one size per line.

    Comment lines of the form ``# key: value`` are kept as metadata.
    """
    meta: dict[str, str] = {}
    rows: list[list[str]] = []
    header_u: int | None = None
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                meta[key.strip()] = value.strip()
            continue
        m = _HEADER.match(line)
        if m and not seen_data and header_u is None:
            header_u = int(m.group(1))
            continue
        if line.startswith("bpx"):
            raise ValueError(f"line {lineno}: malformed header {line!r}")
        seen_data = True
        rows.append(line.split() + [str(lineno)])

    if header_u is not None:
        grid = SizeGrid(header_u)
        pairs = []
        for row in rows:
            *fields, lineno = row
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected '<size> <count>'")
            try:
                count = int(fields[1])
            except ValueError:
                raise ValueError(f"line {lineno}: bad count {fields[1]!r}") from None
            try:
                pairs.append((to_fraction(fields[0]), count))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"line {lineno}: bad size {fields[0]!r}") from None
        inst = build_instance(pairs, grid)
    else:
        sizes = []
        for row in rows:
            *fields, lineno = row
            if len(fields) != 1:
                raise ValueError(f"line {lineno}: flat lists hold one size per line")
            sizes.append(to_fraction(fields[0]))
        inst = instance_from_sizes(sizes)
    return Instance(inst.grid, inst.sizes_units, inst.counts, meta)


def read_bpx(path_or_file: str | TextIO) -> Instance:
    if hasattr(path_or_file, "read"):
        return parse_bpx(path_or_file.read())
    with open(path_or_file, encoding="utf-8") as fh:
        return parse_bpx(fh.read())


def write_bpx(inst: Instance, path: str, meta: Mapping[str, object] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_bpx(inst, meta))
