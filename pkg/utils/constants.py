"""
Constants used throughout the cyclotomic / SLV toolkit
"""

# Scale guards
DEFAULT_MAX_MODULUS = 10 ** 9
DEFAULT_MAX_DENSE_MODULUS = 10 ** 6
DEFAULT_MAX_POINTS = 4 ** 8
DEFAULT_MAX_CUBOIDS = 4 * 10 ** 6
DEFAULT_CENSUS_MAX_STATES = 2 * 10 ** 6
DEFAULT_MAX_POLY_DEGREE = 10 ** 5
DEFAULT_MAX_INTERVALS = 10 ** 6

# Numerics
DEFAULT_FAVARD_NODES = 2048
DEFAULT_FAVARD_CHUNK = 128
MIN_FAVARD_NODES = 16
DEFAULT_PHI_SAMPLES = 4096
DEFAULT_EPSILON = "1/2"

# Runtime
DEFAULT_N_JOBS = 1
DEFAULT_SEED = 0

# Cardinalities whose vanishing sets are all fiber sums of the small structures
SMALL_CARD_RANGE = (2, 10)

# Certificates
CERTIFICATE_KIND = "slv-certificate"
CERTIFICATE_VERSION = 1

# CLI
SUBCOMMANDS = ["profile", "bound", "slv", "verify", "census", "favard", "construct"]
EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_FALSIFICATION = 2

# Files
DEFAULT_CONFIG_FILE = "config/default_config.yml"
DEFAULT_LOG_FILE = "cyclo_slv.log"
