"""Identifiers and defaults shared across the verifier."""

import enum
import zlib


class ServiceName(enum.StrEnum):
    VERIFIER = "verifier"


class LemmaId(enum.StrEnum):
    ENL2 = "enl2"
    SCHODKAPR = "schodkapr"
    FEJER_IDENTITY = "fejer-identity"
    C_ALPHA = "c-alpha"
    STEIN = "stein"
    KHINTCHINE = "khintchine"
    DISCRETIZATION = "discretization"
    INDSTEP = "indstep"
    DYADICRBDD = "dyadicrbdd"
    OLDREV = "oldrev"
    TWO_D = "2d"
    SHIFT_AVERAGE = "shift-average"
    ATDEC = "atdec"
    NORM_TRANSFER = "norm-transfer"
    LACUNARY = "lacunary"


class EstimateTarget(enum.StrEnum):
    """Checks that produce an implied constant; ``estimate <target>`` runs the check of the same id."""

    C_ALPHA = "c-alpha"
    STEIN = "stein"
    OLDREV = "oldrev"
    TWO_D = "2d"


class BuildObject(enum.StrEnum):
    MU_EPS = "mu-eps"
    K_HAT = "k-hat"
    IDEM_SET = "idem-set"


class CheckKind(enum.StrEnum):
    """Strict checks assert explicit inequalities; estimate checks report an empirical constant."""

    STRICT = "strict"
    ESTIMATE = "estimate"


class ReportFormat(enum.StrEnum):
    JSON = "json"
    CSV = "csv"


class LogFormat(enum.StrEnum):
    JSON = "json"
    TEXT = "text"


class ExitCode(enum.IntEnum):
    OK = 0
    VIOLATION = 1
    CONFIGURATION = 2


# --- Harness defaults ---

DEFAULT_STABILITY_FACTOR = 2.0
# Largest relative gap between the constants of two disjoint seed batches.
DEFAULT_BATCH_TOLERANCE = 0.10
DEFAULT_CEILING = 50.0
DEFAULT_ABS_TOL = 1e-12
DEFAULT_GRID_POINTS = 2**14
DEFAULT_MC_SAMPLES = 50_000
DEFAULT_ENUMERATION_BUDGET = 2**22

# Ratio search
DEFAULT_SEARCH_STARTS = 2
DEFAULT_SEARCH_ITERATIONS = 40
INITIAL_STEP = 0.5
MIN_STEP = 1e-3
STEP_PATIENCE = 6

# Denominators at or below this are degenerate and the instance is skipped.
DEGENERATE_DENOMINATOR = 1e-300

# Monte Carlo comparisons allow this many standard errors of slack.
MC_SIGMAS = 4.0


def check_salt(lemma: str, scale: int = 1) -> int:
    """Stable per-check entropy word mixed into every instance seed."""
    return zlib.crc32(f"{lemma}:{scale}".encode())
