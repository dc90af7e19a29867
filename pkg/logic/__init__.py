"""Symbolic core: terms, literals, cubes, worlds and the elaborated system."""
