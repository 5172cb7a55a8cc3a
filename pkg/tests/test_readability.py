import math

import pytest
from hypothesis import given, strategies as st

from aegisshield.errors import EmptyTextError
from aegisshield.evalkit import fk_grade
from aegisshield.evalkit.readability import count_syllables, split_sentences, split_words


class TestFormula:
    def test_hand_derived_cat_sentence(self):
        # 6 words, 1 sentence, 6 syllables:
        # 0.39*6 + 11.8*1 - 15.59 = -1.45
        result = fk_grade("The cat sat on the mat.")
        assert result.words == 6
        assert result.sentences == 1
        assert result.syllables == 6
        assert result.grade == pytest.approx(-1.45, abs=0.01)

    def test_two_sentence_hand_case(self):
        # "Attackers flood the network. Users lose access." ->
        # 7 words, 2 sentences, syllables: at-tack-ers(3)+flood+the+net-work(2)
        # +users(2)+lose+ac-cess(2) = 12
        text = "Attackers flood the network. Users lose access."
        result = fk_grade(text)
        assert result.words == 7
        assert result.sentences == 2
        assert result.syllables == 12
        expected = 0.39 * (7 / 2) + 11.8 * (12 / 7) - 15.59
        assert result.grade == pytest.approx(expected, abs=1e-12)

    def test_empty_text_rejected(self):
        with pytest.raises(EmptyTextError):
            fk_grade("")
        with pytest.raises(EmptyTextError):
            fk_grade("  ...  ")

    def test_negative_grades_permitted(self):
        assert fk_grade("The cat sat on the mat.").grade < 0

    def test_no_terminator_is_one_sentence(self):
        assert fk_grade("threat without punctuation").sentences == 1

    @given(st.integers(min_value=1, max_value=40))
    def test_monotone_in_syllables_per_word(self, extra):
        # holding words/sentence fixed, more syllables per word -> higher grade
        words = 10
        base = 0.39 * words + 11.8 * (words / words) - 15.59
        higher = 0.39 * words + 11.8 * ((words + extra) / words) - 15.59
        assert higher > base


class TestTokenizers:
    def test_sentence_split_on_terminators(self):
        parts = split_sentences("One threat. Another threat! A third? done")
        assert len(parts) == 4

    def test_words_keep_contractions_and_hyphens(self):
        words = split_words("The operator's up-to-date system, isn't it?")
        assert "operator's" in words
        assert "up-to-date" in words

    @pytest.mark.parametrize("word,expected", [
        ("the", 1), ("cat", 1), ("table", 2), ("make", 1), ("makes", 1),
        ("boxes", 2), ("jumped", 1), ("wanted", 2), ("radio", 3), ("media", 3),
        ("binaries", 3), ("agreed", 2), ("remotely", 3), ("credential", 3),
        ("firmware", 2), ("vulnerability", 6), ("interception", 4),
        ("unauthorized", 4), ("availability", 6), ("spoofing", 2),
    ])
    def test_syllable_counter_reference_words(self, word, expected):
        assert count_syllables(word) == expected

    def test_minimum_one_syllable(self):
        assert count_syllables("tsk") == 1
        assert count_syllables("42") == 1


# Frozen outputs of the independent reference implementation in
# tools/readability_oracle.py (run once over this corpus; regenerate with
# `python3 tools/readability_oracle.py`).
REFERENCE_CORPUS = [
    ("An attacker intercepts the session token and replays it against the server.",
     9.740000),
    ("Weak passwords allow brute force attacks on the login portal.",
     6.010000),
    ("The drone uploads mission data to the cloud after each flight.",
     4.790909),
    ("Unsigned firmware can be replaced by anyone with physical access to the device.",
     8.541538),
    ("A malicious insider exports the customer database to a personal drive.",
     12.300000),
    ("Logs are stored locally and can be deleted by the same account that created them.",
     6.780000),
    ("Flooding the gateway with requests makes the service unavailable to real users.",
     10.723333),
    ("The mobile client caches credentials in plain text on the device.",
     6.936364),
    ("Expired certificates are still accepted by the legacy endpoint.",
     11.520000),
    ("A crafted packet crashes the parser and stops all message processing.",
     8.009091),
    ("Privileged containers share the host kernel and weaken isolation between tenants.",
     12.300000),
    ("Phishing messages trick operators into revealing their access codes.",
     12.831111),
    ("Sensor readings travel over an unencrypted radio link that anyone can monitor.",
     12.690000),
    ("Session identifiers are sequential and easy to guess.",
     9.655000),
    ("Database backups are written to a public storage bucket.",
     8.897778),
    ("Error pages reveal stack traces and internal host names to visitors.",
     9.081818),
    ("An exposed debug interface lets users run arbitrary commands on the controller.",
     11.706667),
    ("Administrative functions are reachable without a second authentication factor.",
     18.075556),
    ("The scheduler grants every job full network access regardless of its role.",
     9.740000),
    ("Replay of captured commands lets an adversary steer the vehicle remotely.",
     11.227273),
]


class TestReferenceCorpus:
    def test_twenty_texts(self):
        assert len(REFERENCE_CORPUS) == 20

    @pytest.mark.parametrize("text,reference", REFERENCE_CORPUS)
    def test_agreement_within_half_grade(self, text, reference):
        assert abs(fk_grade(text).grade - reference) <= 0.5

    def test_grades_finite(self):
        for text, _ in REFERENCE_CORPUS:
            assert math.isfinite(fk_grade(text).grade)
