"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from safeherd.geometry import Vec2

coord = st.floats(-50.0, 50.0, allow_nan=False, allow_infinity=False)
vec = st.builds(Vec2, coord, coord)
alpha = st.floats(0.05, 0.95)
