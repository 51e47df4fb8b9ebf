"""Randomized verification of the H^1 multiplier inequalities and the h1lab command line."""
