"""Mapping-success statistics over batch archives.

A threat counts as mapped exactly when its mapping satisfies the
MitreMapping invariant (non-sentinel id and a real technique id);
hallucinated selections are quarantined to the sentinel upstream and
tallied separately here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..domain import StrideCategory


@dataclass(frozen=True)
class CategoryStats:
    total: int
    mapped: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.mapped, self.total) if self.total else Fraction(0)


@dataclass(frozen=True)
class MappingStats:
    total: int
    mapped: int
    hallucination_count: int
    per_category: dict[StrideCategory, CategoryStats]

    @property
    def rate(self) -> Fraction:
        """Exact mapped/total so rate * total == mapped holds exactly."""
        return Fraction(self.mapped, self.total) if self.total else Fraction(0)

    @property
    def rate_percent(self) -> float:
        return round(float(self.rate) * 100, 1)


def mapping_stats(runs) -> MappingStats:
    total = mapped = hallucinations = 0
    per_category: dict[StrideCategory, list[int]] = {c: [0, 0] for c in StrideCategory}
    for run in runs:
        for threat, mapping in zip(run.threats, run.mappings):
            total += 1
            per_category[threat.threat_type][0] += 1
            if mapping.mapped:
                mapped += 1
                per_category[threat.threat_type][1] += 1
            if mapping.hallucination:
                hallucinations += 1
    return MappingStats(
        total=total,
        mapped=mapped,
        hallucination_count=hallucinations,
        per_category={
            category: CategoryStats(total=counts[0], mapped=counts[1])
            for category, counts in per_category.items()
        },
    )
