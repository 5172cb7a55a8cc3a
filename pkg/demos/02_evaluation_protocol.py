"""Tour of the evaluation kit: readability, similarity voting, mapping
rates, and the nonparametric statistics behind them.

Run from the repository root:  python3 demos/02_evaluation_protocol.py
"""

import numpy as np

from aegisshield.domain import EvalProtocol
from aegisshield.evalkit import (
    cosine_similarity,
    descriptive_stats,
    fk_grade,
    mann_whitney,
    normality_suite,
    one_proportion,
)

protocol = EvalProtocol()
print(f"protocol: threshold {protocol.similarity_threshold}, majority "
      f"{protocol.majority_fraction:.0%}, {protocol.batches_per_case} batches/case, "
      f"mapping benchmark {protocol.mapping_benchmark:.0%}, alpha {protocol.alpha}")

# --- readability -----------------------------------------------------------
simple = "The cat sat on the mat."
dense = ("Administrative functions are reachable without a second "
         "authentication factor.")
for text in (simple, dense):
    grade = fk_grade(text)
    print(f"FKGL {grade.grade:6.2f}  ({grade.words} words, {grade.syllables} "
          f"syllables)  {text}")

# --- distribution shape ----------------------------------------------------
rng = np.random.default_rng(42)
grades = rng.normal(12.8, 3.0, 500)
stats = descriptive_stats(grades)
print(f"\nsimulated grade sample: mean {stats.mean:.2f}, median {stats.median:.2f}, "
      f"IQR {stats.iqr:.2f}, skewness {stats.skewness:.2f}")
suite = normality_suite(grades)
print(f"normality: AD stat {suite.anderson_darling[0]:.3f} "
      f"(p {suite.anderson_darling[1]:.3f}), "
      f"Lilliefors KS p {suite.lilliefors_ks[1]:.3f}")

# --- two-sample comparison -------------------------------------------------
tool = rng.normal(12.7, 3.0, 400)
expert = rng.normal(13.5, 3.8, 120)
result = mann_whitney(list(expert), list(tool), alternative="greater")
print(f"\nMann-Whitney (expert vs tool): W {result.w:.1f}, "
      f"p {result.p_value_tie_adjusted:.4f}, "
      f"shift estimate {result.hodges_lehmann_estimate:.2f} "
      f"(95% lower bound {result.one_sided_lower_bound:.2f}), "
      f"rank-biserial {result.rank_biserial:+.3f}")

# --- batch majority vote ---------------------------------------------------
for successes in (30, 20, 16):
    test = one_proportion(successes, 30, protocol.majority_fraction,
                          alternative="greater", alpha=protocol.alpha)
    verdict = "passes" if (test.sample_p > protocol.majority_fraction
                           and test.p_value < protocol.alpha) else "fails"
    print(f"{successes}/30 batch successes: sample p {test.sample_p:.1%}, "
          f"exact p {test.p_value:.4f}, 95% lower bound {test.lower_bound:.1%} "
          f"-> {verdict}")

# --- mapping benchmark -----------------------------------------------------
test = one_proportion(6921, 8100, protocol.mapping_benchmark, alternative="greater")
print(f"\n6921/8100 mapped: rate {6921 / 8100:.1%}, p {test.p_value:.2e}, "
      f"95% lower bound {test.lower_bound:.1%} against the "
      f"{protocol.mapping_benchmark:.0%} benchmark")

# --- cosine basics ---------------------------------------------------------
print(f"\ncosine identities: self {cosine_similarity([1, 2], [1, 2]):.1f}, "
      f"orthogonal {cosine_similarity([1, 0], [0, 1]):.1f}, "
      f"hand case {cosine_similarity([1, 2, 3], [4, 5, 6]):.4f}")
