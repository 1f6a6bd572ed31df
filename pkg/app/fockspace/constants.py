"""
Numeric tolerances shared across the toolkit.
"""

# amplitudes below this magnitude are dropped from sparse states
PRUNE_THRESHOLD = 1e-12

# equality, normalization and isometry checks
TOLERANCE = 1e-9

# singular values above this count towards a numerical rank
RANK_THRESHOLD = 1e-9
