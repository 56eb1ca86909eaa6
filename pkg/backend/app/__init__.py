"""Exact p-local toolkit for the X(k̃) = 0 criteria."""
