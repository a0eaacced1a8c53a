"""Persistent identifier grammar, canonicalization, and minting."""

from __future__ import annotations

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdom.errors import InvalidPrefix, MalformedPid
from fdom.pid import DEFAULT_PREFIX, Pid, mint

SEGMENT_ALPHABET = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-"
)
LOWER_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789._-"

GRAMMAR = re.compile(r"[A-Za-z0-9._-]+/[A-Za-z0-9._-]+\Z")

segments = st.text(alphabet=SEGMENT_ALPHABET, min_size=1, max_size=24)
lower_segments = st.text(alphabet=LOWER_ALPHABET, min_size=1, max_size=24)


@given(prefix=segments, suffix=lower_segments)
def test_parse_format_round_trip(prefix, suffix):
    pid = Pid(prefix, suffix)
    assert Pid.parse(str(pid)) == pid
    assert str(pid) == f"{prefix}/{suffix}"


def test_round_trip_over_minted_pids():
    for _ in range(1000):
        pid = mint()
        assert Pid.parse(str(pid)) == pid


def test_parse_lowercases_suffix():
    pid = Pid.parse("Fdom.Local/ABCdef123")
    assert pid.prefix == "Fdom.Local"  # prefix case is preserved
    assert pid.suffix == "abcdef123"
    assert str(pid) == "Fdom.Local/abcdef123"


def test_canonical_comparison_is_exact():
    assert Pid.parse("x/ABC") == Pid.parse("x/abc")
    assert Pid.parse("X/abc") != Pid.parse("x/abc")
    assert len({Pid.parse("x/abc"), Pid.parse("x/ABC")}) == 1


@pytest.mark.parametrize("text", [
    "no-slash",
    "",
    "/suffix-only",
    "prefix-only/",
    "a b/c",
    "a/b c",
    "pre/suf/fix",
    "pre:fix/x",
    "héllo/x",
    "a/",
    "/",
])
def test_parse_rejects_bad_grammar(text):
    with pytest.raises(MalformedPid):
        Pid.parse(text)


@given(st.text(max_size=40))
def test_rejection_completeness(text):
    """Exactly the strings matching segment "/" segment parse; all others raise."""
    if GRAMMAR.match(text):
        pid = Pid.parse(text)
        assert str(pid).lower() == text.lower()
    else:
        with pytest.raises(MalformedPid):
            Pid.parse(text)


def test_constructor_rejects_non_canonical_suffix():
    with pytest.raises(MalformedPid):
        Pid("x", "ABC")
    with pytest.raises(MalformedPid):
        Pid("x", "")
    with pytest.raises(MalformedPid):
        Pid("", "abc")


def test_mint_shape():
    pid = mint("fdom.local")
    assert pid.prefix == "fdom.local"
    assert re.fullmatch(r"[0-9a-f]{32}", pid.suffix)


def test_mint_default_prefix():
    assert mint().prefix == DEFAULT_PREFIX


@pytest.mark.parametrize("prefix", ["", "has/slash", "has space", "héllo", None, 7])
def test_mint_rejects_bad_prefix(prefix):
    with pytest.raises(InvalidPrefix):
        mint(prefix)


def test_mint_injectivity_at_desk_scale():
    suffixes = {mint().suffix for _ in range(10_000)}
    assert len(suffixes) == 10_000
