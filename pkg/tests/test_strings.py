import jellyfish
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corecite.strings import jaro, jaro_winkler, normalize_reference


@pytest.mark.parametrize(
    "a, b",
    [
        ("martha", "marhta"),
        ("dixon", "dicksonx"),
        ("jellyfish", "smellyfish"),
        ("gaskell, new introduction to bibliography", "gaskell, a new introduction to bibliography"),
        ("", "abc"),
        ("same", "same"),
    ],
)
def test_jaro_winkler_matches_reference_library(a, b):
    assert jaro_winkler(a, b) == pytest.approx(jellyfish.jaro_winkler_similarity(a, b), abs=1e-12)


@given(st.text(alphabet="abcde ,.", max_size=12), st.text(alphabet="abcde ,.", max_size=12))
@settings(max_examples=300, deadline=None)
def test_jaro_winkler_agrees_with_jellyfish(a, b):
    if not a or not b:
        return
    assert jaro_winkler(a, b) == pytest.approx(jellyfish.jaro_winkler_similarity(a, b), abs=1e-12)
    assert jaro(a, b) == pytest.approx(jellyfish.jaro_similarity(a, b), abs=1e-12)


@given(st.text(max_size=15), st.text(max_size=15))
@settings(max_examples=200, deadline=None)
def test_similarity_symmetric_and_bounded(a, b):
    s = jaro_winkler(a, b)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(jaro_winkler(b, a))


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Gaskell, New Introduction to Bibliography, pp. 12-15", "gaskell, new introduction to bibliography"),
        ("Lane, Venice: A Maritime Republic, p. 45", "lane, venice: a maritime republic"),
        ("  BRAUDEL   La Méditerranée 1949 ", "braudel la méditerranée"),
        ("Chambers, Venice, 102-110", "chambers, venice"),
        ("no digits here", "no digits here"),
    ],
)
def test_normalize_reference(raw, expected):
    assert normalize_reference(raw) == expected
