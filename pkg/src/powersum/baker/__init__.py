"""Linear forms in two logarithms: directed arithmetic, constants, bounds."""
