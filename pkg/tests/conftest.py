"""Shared helpers and hypothesis strategies for the test suite."""

from hypothesis import strategies as st

from sandlab.pile import Configuration, HeightProfile, parse_height_literal, parse_literal


def cfg(text: str) -> Configuration:
    return parse_literal(text)


def hp(text: str) -> HeightProfile:
    return parse_height_literal(text)


configurations = st.builds(
    Configuration,
    st.lists(st.integers(0, 50), max_size=40),
    st.integers(-10, 10),
)

small_configurations = st.builds(
    Configuration,
    st.lists(st.integers(0, 9), max_size=12),
    st.integers(-6, 6),
)

boolean_configurations = st.builds(
    Configuration,
    st.lists(st.integers(0, 1), max_size=30),
    st.integers(-10, 10),
)

height_profiles = st.builds(
    HeightProfile,
    st.lists(st.integers(-6, 6), max_size=25),
    st.integers(-10, 10),
)
