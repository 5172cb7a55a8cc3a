"""Independent reference readability implementation.

Used once to freeze the expected grades in tests/test_readability.py;
kept so the corpus can be regenerated. The algorithm is deliberately
different from the package counter: silent suffixes are stripped before
group counting, and adjustments come from a pattern list rather than
positional rules.
"""

import re

SUB_SYL = [re.compile(p) for p in (r"giu", r".ely$")]
ADD_SYL = [re.compile(p) for p in (r"[^tsc]ia", r"riet", r"dien", r"iu", r"[^tscgx]io",
                                   r"ii", r"[aeiouym]bl$", r"^mc", r"ism$",
                                   r"[aeiou]y[aeiou]")]


def oracle_syllables(token: str) -> int:
    word = re.sub(r"[^a-z]", "", token.lower())
    if not word:
        return 1
    if word.endswith("ed") and len(word) > 3 and word[-3] not in "tdaeiouy":
        word = word[:-2]
    elif word.endswith("es") and len(word) > 3 and word[-3] not in "sxzcghaeiouy":
        word = word[:-2]
    elif word.endswith("e") and not word.endswith("le"):
        word = word[:-1]
    count = len(re.findall(r"[aeiouy]+", word))
    for pattern in SUB_SYL:
        if pattern.search(word):
            count -= 1
    for pattern in ADD_SYL:
        count += len(pattern.findall(word))
    return max(1, count)


def oracle_grade(text: str) -> float:
    sentences = [s for s in re.split(r"[.!?]+(?:\s+|$)", text) if s.strip()]
    words = [w for w in re.split(r"\s+", text) if re.search(r"[A-Za-z0-9]", w)]
    syllables = sum(oracle_syllables(w) for w in words)
    return 0.39 * len(words) / len(sentences) + 11.8 * syllables / len(words) - 15.59


if __name__ == "__main__":
    import sys

    sys.path.insert(0, "tests")
    from test_readability import REFERENCE_CORPUS

    for text, frozen in REFERENCE_CORPUS:
        fresh = oracle_grade(text)
        marker = "" if abs(fresh - frozen) < 5e-7 else "  <-- drifted"
        print(f"{fresh:10.6f} (frozen {frozen:10.6f}){marker}  {text[:60]}")
