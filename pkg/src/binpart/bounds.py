"""Lower bounds on the optimal number of bins.

Besides the size bound ``ceil(total)``, every bin of any packing holds at
most ``f_max``, the largest fill a single bin can reach with the available
items, so ``OPT >= ceil(total / f_max)``.  When no subset of items fills a
bin exactly this is strictly better than the size bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .core import Instance

__all__ = ["BoundReport", "lb_size", "max_fill", "lb_waste", "bound_report"]


@dataclass(frozen=True)
class BoundReport:
    lb_size: int
    f_max: Fraction
    lb_waste: int
    witness: tuple[int, ...]

    @property
    def delta_min(self) -> Fraction:
        """Least waste any bin must carry."""
        return 1 - self.f_max

    @property
    def best(self) -> int:
        return max(self.lb_size, self.lb_waste)


def lb_size(inst: Instance) -> int:
    return -(-inst.total_units // inst.u)


def max_fill(inst: Instance) -> tuple[Fraction, tuple[int, ...]]:
    """Largest single-bin fill and a count vector attaining it."""
    if inst.k == 0:
        return Fraction(0), ()
    best, witness = kernels.reachable_fills(list(inst.sizes_units), list(inst.caps), inst.u)
    return Fraction(best, inst.u), witness


def lb_waste(inst: Instance) -> int:
    if inst.k == 0:
        return 0
    f_max, _ = max_fill(inst)
    return math.ceil(inst.total / f_max)


def bound_report(inst: Instance) -> BoundReport:
    if inst.k == 0:
        return BoundReport(0, Fraction(0), 0, ())
    f_max, witness = max_fill(inst)
    return BoundReport(lb_size(inst), f_max, math.ceil(inst.total / f_max), witness)
