"""Statistical and text-analytic operations behind the evaluation protocol."""

from .mapping import MappingStats, mapping_stats
from .readability import FkGrade, fk_grade
from .similarity import (
    BatchVerdict,
    CaseVerdict,
    SimilarityRecord,
    cosine_similarity,
    embed_texts,
    similarity_analysis,
)
from .stats import (
    MwuResult,
    box_cox,
    descriptive_stats,
    mann_whitney,
    normality_suite,
    one_proportion,
    pearson_correlation,
)

__all__ = [
    "BatchVerdict",
    "CaseVerdict",
    "FkGrade",
    "MappingStats",
    "MwuResult",
    "SimilarityRecord",
    "box_cox",
    "cosine_similarity",
    "descriptive_stats",
    "embed_texts",
    "fk_grade",
    "mann_whitney",
    "mapping_stats",
    "normality_suite",
    "one_proportion",
    "pearson_correlation",
    "similarity_analysis",
]
