"""
Module containing the tolerances, defaults and other fixed numbers used throughout majoranalib.

Every numerical threshold the library compares against lives here, so a change of
convention (for example a looser clustering tolerance for larger Fock spaces) happens
in one place.

"""

# SITE LIMITS

MIN_SITE = 1                  # Majorana sites are 1-based, as written c_1, c_2, ...
MAX_SITES = 256               # Largest site index a SiteSet bitmask is allowed to carry
MIN_CHAIN_LENGTH = 2          # N >= 2 fermion sites per leg
MIN_LEGS = 1

# ALGEBRA

DEFAULT_PRUNE_TOL = 0.0       # Only exact zeros are dropped inside the algebra
DISPLAY_EPS = 1e-14           # Coefficients below this are hidden when rendering for humans
EXACT_TOL = 1e-14             # "Exact" coefficient cancellation of the worked algebra
ALGEBRA_TOL = 1e-12           # Identities where floating kappa powers enter

# FOCK SPACE

MAX_DENSE_MODES = 12          # Dense matrices up to 2**12 = 4096
MATRIX_TOL = 1e-10            # Matrix-level identities (homomorphism, rebuilt Hamiltonians)

# SPECTRA

DEFAULT_CLUSTER_TOL = 1e-9    # Consecutive eigenvalues closer than this share a cluster
HERMITIAN_TOL = 1e-10         # Allowed |H - H^dagger| before a Hamiltonian is rejected
PAIRING_TOL = 1e-10           # Max splitting between even- and odd-sector spectra
PARITY_EXPECTATION_MIN = 0.99 # |<P>| needed to label an eigenvector inside a nondegenerate cluster
ZERO_MODE_TOL = 1e-12         # Single-particle energies below this are zero modes of A
LIPSCHITZ_SAFETY = 4.0        # |gap(g') - gap(g)| <= LIPSCHITZ_SAFETY * ||V|| * |g' - g|
G_MAX_GAP_FRACTION = 0.5      # Empirical g_max: largest |g| keeping gap > fraction * gap(0)
CLUSTER_AMBIGUITY_FACTOR = 100.0 # Level spacings below this multiple of cluster_tol are flagged ambiguous

# The doubled Hamiltonian equals ETA_FORM_PREFACTOR * eta^dagger |A| eta minus a
# constant when {c_i, c_j} = 2 delta_ij and H = sum_ij c_i A_ij c_j.
ETA_FORM_PREFACTOR = 4.0

# ZERO MODES

DEFAULT_KERNEL_TOL = 1e-10    # |eigenvalue| below this is a kernel direction
OBSTRUCTION_TOL = 1e-8        # Least-squares residual above this is an obstruction
LEFT_EDGE_WINDOW = 4          # Terms supported on sites <= this count as the left edge for mode selection
KERNEL_MAX_SITES = 6          # Kernel method: 2**(2N-2) <= 1024 odd monomials, dense eigensolve
DECAY_FIT_FLOOR = 1e-13       # Profile values at or below this are excluded from the rate fit
DENSE_SOLVE_MAX_COLUMNS = 4096
SLOPE_MARGIN = 0.2            # Residual scaling slope must reach order + 1 - SLOPE_MARGIN

# Sites of the single-quartic interaction V = c_1 c_2 c_3 c_4
C1C2C3C4_SITES = (1, 2, 3, 4)

# LADDERS

DEGENERACY_LOG_TOL = 1e-9     # log2(D) must be this close to an integer

# CLI / ARTIFACTS

CSV_DIGITS = 17
REPORT_FILE = 'report.txt'
DATA_FILE = 'data.csv'
META_FILE = 'meta'
OUTPUT_DIR_ENV = 'MAJORANALIB_OUTPUT_DIR'
DEFAULT_OUTPUT_DIR = 'out'

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG_ERROR = 2
EXIT_CONTRACT_ERROR = 3
EXIT_INTERNAL_ERROR = 4

