"""Trigonometric polynomials, grid operators, multipliers and dyadic martingales on the circle."""
