"""Reference-string normalisation and Jaro-Winkler similarity."""

from __future__ import annotations

import re

_PAGINATION = re.compile(r"\bpp?\.\s*\d+(?:\s*[-–]\s*\d+)?")
_TRAILING_DIGITS = re.compile(r"[\s,;:.\-–]*\d+(?:\s*[-–]\s*\d+)?[\s,;:.]*$")
_WHITESPACE = re.compile(r"\s+")


def normalize_reference(text: str) -> str:
    """Lowercase, drop pagination fragments and trailing digit runs, collapse whitespace.

    >>> normalize_reference("Gaskell,  New Introduction to Bibliography, pp. 12-15")
    'gaskell, new introduction to bibliography'
    """
    out = _PAGINATION.sub(" ", text.lower())
    prev = None
    while prev != out:
        prev = out
        out = _TRAILING_DIGITS.sub("", out)
    out = _WHITESPACE.sub(" ", out).strip()
    return out.rstrip(",;:. ")


def jaro(s1: str, s2: str) -> float:
    if s1 == s2:
        return 1.0
    n1, n2 = len(s1), len(s2)
    if n1 == 0 or n2 == 0:
        return 0.0
    window = max(max(n1, n2) // 2 - 1, 0)
    matched1 = [False] * n1
    matched2 = [False] * n2
    matches = 0
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(n2, i + window + 1)
        for j in range(lo, hi):
            if not matched2[j] and s2[j] == ch:
                matched1[i] = matched2[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    transpositions = 0
    j = 0
    for i in range(n1):
        if matched1[i]:
            while not matched2[j]:
                j += 1
            if s1[i] != s2[j]:
                transpositions += 1
            j += 1
    m = float(matches)
    # half-transpositions rounded down, as in strcmp95
    return (m / n1 + m / n2 + (m - transpositions // 2) / m) / 3.0


def jaro_winkler(
    s1: str,
    s2: str,
    prefix_weight: float = 0.1,
    max_prefix: int = 4,
    boost_threshold: float = 0.7,
) -> float:
    """Jaro similarity boosted by the common prefix (at most `max_prefix` chars).

    The boost only applies when the plain Jaro score exceeds `boost_threshold`,
    as in Winkler's original formulation.
    """
    sim = jaro(s1, s2)
    if sim <= boost_threshold:
        return sim
    prefix = 0
    for a, b in zip(s1[:max_prefix], s2[:max_prefix]):
        if a != b:
            break
        prefix += 1
    return sim + prefix * prefix_weight * (1.0 - sim)
