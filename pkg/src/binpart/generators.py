"""Random instance families.

``h`` instances cut ``n`` unit intervals into ``l`` pieces each, so an
``n``-bin perfect packing is known.  ``r`` instances draw ``k`` sizes and a
random probability vector, then sample ``n`` item types from the resulting
multinomial.  Sizes are on the 0.05 grid; instances use ``u = 100``.

All randomness comes from numpy's PCG64 seeded through ``SeedSequence``, so
one seed always gives the same instance on the same numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Instance, SizeGrid, build_instance

__all__ = ["GenSpec", "generate_h", "generate_r", "corpus_seeds", "STEPS", "RNG_NAME"]

STEPS = 20  # 0.05 grid
RNG_NAME = "numpy.PCG64/SeedSequence"
_GRID = SizeGrid(100)


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int
    l: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.family not in ("h", "r"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.family == "h" and (self.l is None or not 3 <= self.l <= 5):
            raise ValueError("family h needs 3 <= l <= 5")
        if self.family == "r" and (self.k is None or self.k < 2):
            raise ValueError("family r needs k >= 2")

    def build(self) -> Instance:
        if self.family == "h":
            return generate_h(self.n, self.l, self.seed)
        return generate_r(self.n, self.k, self.seed)


def _round_steps(x: float) -> int:
    """Nearest multiple of 1/STEPS, halves rounded up, as an integer step count."""
    return int(np.floor(x * STEPS + 0.5))


def generate_h(n: int, l: int, seed: int) -> Instance:
    """``n`` unit intervals, each cut into ``l`` pieces at rounded uniform points.

    A partition whose rounded cuts collide or land on 0 or 1 is redrawn, so
    every piece is positive and the optimum is exactly ``n`` bins.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 3 <= l <= 5:
        raise ValueError("l must be in [3, 5]")
    rng = np.random.default_rng(seed)
    tally: dict[int, int] = {}
    for _ in range(n):
        while True:
            cuts = sorted(_round_steps(x) for x in rng.random(l - 1))
            if cuts[0] > 0 and cuts[-1] < STEPS and len(set(cuts)) == l - 1:
                break
        edges = [0, *cuts, STEPS]
        for a, b in zip(edges, edges[1:]):
            tally[b - a] = tally.get(b - a, 0) + 1
    inst = build_instance(((Fraction(s, STEPS), c) for s, c in tally.items()), _GRID)
    meta = {"family": "h", "n": n, "l": l, "seed": seed, "opt": n, "rng": RNG_NAME}
    return Instance(inst.grid, inst.sizes_units, inst.counts, meta)


def _probabilities(rng: np.random.Generator, k: int) -> list[Fraction]:
    cuts = sorted(Fraction(float(x)) for x in rng.random(k - 1))
    edges = [Fraction(0), *cuts, Fraction(1)]
    return [b - a for a, b in zip(edges, edges[1:])]


def generate_r(n: int, k: int, seed: int) -> Instance:
    """``n`` items over at most ``k`` sizes drawn by a random multinomial.

    Sizes that round to 0, to 1 or to an earlier size are redrawn.  Type
    counts come from sequential binomial draws on the conditional
    probabilities; types that receive no items are dropped.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 2 <= k <= STEPS - 1:
        raise ValueError(f"k must be in [2, {STEPS - 1}]")
    rng = np.random.default_rng(seed)
    steps: list[int] = []
    while len(steps) < k:
        s = _round_steps(float(rng.random()))
        if 0 < s < STEPS and s not in steps:
            steps.append(s)
    probs = _probabilities(rng, k)
    counts = _multinomial(rng, n, probs)
    inst = build_instance(((Fraction(s, STEPS), c) for s, c in zip(steps, counts)), _GRID)
    meta = {"family": "r", "n": n, "k": k, "seed": seed, "rng": RNG_NAME}
    return Instance(inst.grid, inst.sizes_units, inst.counts, meta)


def _multinomial(rng: np.random.Generator, n: int, probs: list[Fraction]) -> list[int]:
    counts = []
    left = n
    mass = Fraction(1)
    for i, p in enumerate(probs):
        if i == len(probs) - 1 or left == 0:
            counts.append(left)
            left = 0
            continue
        q = float(p / mass) if mass > 0 else 0.0
        x = int(rng.binomial(left, min(max(q, 0.0), 1.0)))
        counts.append(x)
        left -= x
        mass -= p
    return counts


def corpus_seeds(master: int, count: int) -> list[int]:
    """Independent 63-bit seeds for ``count`` instances split from ``master``."""
    children = np.random.SeedSequence(master).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0] >> np.uint64(1)) for c in children]
