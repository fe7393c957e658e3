# Precision configuration (decimal digits)
DEFAULT_PRECISION = 30
RELATION_PRECISION = 60
MAX_PRECISION = 1000
PRECISION_GROWTH = 1.5

# Quadrature configuration
ADAPTIVE_TOLERANCE = 1e-6
ADAPTIVE_EPSREL = 1e-9
ADAPTIVE_LIMIT = 200
MC_SAMPLES = 10**6
MC_ITERATIONS = 10
DEFAULT_SEED = 12345
# Relative residual accepted when quadrature checks a reduction to boxes
REDUCTION_TOLERANCE = 1e-3
# Relative agreement accepted between finite-difference and exact face coefficients
DERIVATIVE_TOLERANCE = 1e-9
DERIVATIVE_STEP = 1e-12
DERIVATIVE_PRECISION = 50

# Parametric box integral over the Clausen sum taken with its 1/(16 sqrt|det C|) prefactor
BOX_NORMALIZATION = 2

# Relation search configuration
MAX_COEFF = 10**4
HELD_OUT_POINTS = 10
EXTRA_SAMPLE_POINTS = 5
RELATION_TOLERANCE = 1e-25
PRECISION_MARGIN = 10

# Graph limits
MAX_ONE_LOOP_EDGES = 6
MAX_GENERIC_LEGS = 6

# Worker configuration
NUMERIC_WORKERS = 1

# Logging configuration
LOG_LEVEL = "INFO"
