"""
Configuration constants for the encodings, solvers and experiment harness.

Every value here is a default: parameter objects read from this module at
construction time, so callers can override a knob at runtime, e.g.

    from hypercut import settings
    settings.SA_NUM_READS = 20
"""

# --- Numerics ----------------------------------------------------

# Polynomial terms with |coefficient| below this are dropped.
ZERO_TOLERANCE: float = 1e-12

# Two cut values closer than this count as equal when scoring optimality.
OPTIMALITY_TOLERANCE: float = 1e-9

# Assignments within this distance of the minimum are reported as argmins.
ARGMIN_TOLERANCE: float = 1e-9


# --- Instance generation -----------------------------------------

# Redraws allowed before giving up on a connected instance.
GENERATOR_RETRY_BUDGET: int = 10_000

# Below this many candidate edges we enumerate C(n, r) and sample indices;
# above it we rejection-sample distinct edges.
GENERATOR_ENUMERATION_LIMIT: int = 50_000

# Dataset defaults (uniform size-3 edges, average degree about 5)
DEFAULT_EDGE_SIZE: int = 3
DEFAULT_AVG_DEGREE: float = 5.0


# --- Encodings ---------------------------------------------------

DEFAULT_LAMBDA: float = 1.0

# Default multi-way validity weight: alpha = lambda * n + sum(w_e) + ALPHA_MARGIN
ALPHA_MARGIN: float = 1.0


# --- Exhaustive search -------------------------------------------

# exact_balanced refuses instances with n * log2(k) above this.
EXACT_MAX_BITS: int = 24

# exact_min_poly refuses polynomials with more variables than this.
EXACT_MAX_VARS: int = 24

# Labelings scored per numpy batch inside exact_balanced.
EXACT_BATCH_SIZE: int = 65_536


# --- Simulated annealing -----------------------------------------

SA_NUM_READS: int = 100
SA_NUM_SWEEPS: int = 1000
SA_BETA_MIN: float = 0.1
SA_BETA_MAX: float = 10.0


# --- QAOA statevector simulation ---------------------------------

QAOA_DEPTH: int = 1
QAOA_RESTARTS: int = 10
QAOA_MAX_ITER: int = 200
QAOA_TOP_K: int = 10

# Largest register the simulator accepts (2**20 amplitudes).
QAOA_MAX_QUBITS: int = 20

# Sign s in the mixer H_M = s * sum_i X_i. -1 gives H_M = -sum X, whose ground
# state is the uniform superposition.
QAOA_MIXER_SIGN: int = -1

# Nelder-Mead stopping tolerances
QAOA_XATOL: float = 1e-4
QAOA_FATOL: float = 1e-8


# --- Experiment harness ------------------------------------------

EXPERIMENT_N_VALUES = list(range(8, 16))
EXPERIMENT_INSTANCES: int = 100
EXPERIMENT_RUNS: int = 5
EXPERIMENT_LAMBDAS = [0.3, 1.0, 3.0]
EXPERIMENT_SOLVERS = ["exact", "sa", "qaoa"]
EXPERIMENT_BASE_SEED: int = 0

# run_seed = base_seed * RUN_SEED_MULTIPLIER + run_index
# instance_seed = run_seed * INSTANCE_SEED_MULTIPLIER + instance_index
RUN_SEED_MULTIPLIER: int = 10007
INSTANCE_SEED_MULTIPLIER: int = 10009

REPORT_COLUMNS = [
    "solver",
    "lambda",
    "n",
    "feasibility_mean",
    "feasibility_se",
    "optimality_mean",
    "optimality_se",
    "mean_seconds",
]
