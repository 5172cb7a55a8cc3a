"""Flesch-Kincaid grade level with a deterministic sentence splitter and
syllable counter.

grade = 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59

Sentence splitting: runs of ``.!?`` followed by whitespace or end of text
terminate a sentence; stretches with no terminator count as one sentence.

Syllable counting rules (applied to the lowercased, letters-only word):
 1. count maximal vowel groups (aeiouy);
 2. subtract one for a silent trailing 'e' ("make"), but keep the 'e' of a
    consonant + "le" ending ("table");
 3. subtract one for an '-es'/'-ed' ending pronounced without its own
    syllable ("makes", "jumped"), keeping it after sibilants, after t/d
    ("boxes", "wanted"), and after a vowel group ("binaries", "agreed");
 4. subtract one for the silent 'e' inside a consonant + '-ely' ending
    ("remotely", "lovely");
 5. add one for an 'io'/'ia'/'iu' hiatus ("radio", "media", "premium")
    except in the fused 'tion'/'sion'/'cial'-style endings;
 6. every word has at least one syllable.

The counter is intentionally rule-based rather than lexicon-backed so the
grade is reproducible everywhere; small disagreements with dictionary
counters stay inside the documented ±0.5-grade tolerance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import EmptyTextError

_WORD = re.compile(r"[A-Za-z0-9'’-]+")
_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class FkGrade:
    grade: float
    words: int
    sentences: int
    syllables: int


def split_sentences(text: str) -> list[str]:
    pieces = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        piece = text[start:match.end()].strip()
        if piece:
            pieces.append(piece)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return pieces


def split_words(text: str) -> list[str]:
    return _WORD.findall(text)


def count_syllables(word: str) -> int:
    letters = re.sub(r"[^a-z]", "", word.lower())
    if not letters:
        return 1  # numeric / symbol tokens carry one beat
    groups = _VOWEL_GROUP.findall(letters)
    count = len(groups)
    if count > 1 and letters.endswith("e") and not letters.endswith(("le", "ee", "ye", "oe", "ie", "ae", "ue")):
        count -= 1
    if count > 1 and letters.endswith("es") and len(letters) > 2 \
            and letters[-3] not in "sxzcg" and letters[-3] not in "aeiouy" \
            and letters[-3:] != "hes":
        count -= 1
    if count > 1 and letters.endswith("ed") and len(letters) > 2 \
            and letters[-3] not in "td" and letters[-3] not in "aeiouy":
        count -= 1
    if count > 1 and letters.endswith("ely") and len(letters) > 3 \
            and letters[-4] not in "aeiouy":
        count -= 1
    count += len(re.findall(r"[^tscgx]i[oau]", letters))
    return max(count, 1)


def fk_grade(text: str) -> FkGrade:
    """Grade level of ``text``; raises EmptyTextError when it has no words."""
    words = split_words(text)
    if not words:
        raise EmptyTextError("text contains no words")
    sentences = split_sentences(text) or [text]
    syllables = sum(count_syllables(w) for w in words)
    grade = (
        0.39 * (len(words) / len(sentences))
        + 11.8 * (syllables / len(words))
        - 15.59
    )
    return FkGrade(grade=grade, words=len(words), sentences=len(sentences), syllables=syllables)
