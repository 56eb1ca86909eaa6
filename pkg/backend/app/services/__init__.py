"""Domain services: arithmetic, lattices, Galois models and criteria."""
