"""Shared numerical constants for the harmonic package."""

# --- Quadrature ---

DEFAULT_OVERSAMPLE = 8
MIN_OVERSAMPLE = 4
SUP_NORM_SAFETY = 2.0  # grid max of |f| times this stands in for ||f||_inf in error bounds

# --- Exactness tolerances ---

IDENTITY_TOL = 1e-12
ATOM_TOL = 1e-12
ALIGNMENT_TOL = 1e-12

# --- ind-norm ---

DEFAULT_ENUMERATION_BUDGET = 2**24
MC_CHUNK_SIZE = 4096
RADEMACHER_MAX_MEMBERS = 20
RADEMACHER_CHUNK = 2**12

# --- Atomic decomposition ---

# Sum of |c_k| <= C_DEC * ||f||_{H^1(delta)} for the stopping-time construction:
# each level j contributes at most 2^(j+1) |{S > 2^j}| and sum_j 2^j |{S > 2^j}| <= 2 ||S||_1.
C_DEC = 4.0

# --- Symbols ---

C_ALPHA_SAFETY = 2.0
