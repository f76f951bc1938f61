"""
Configuration settings for the harvesting network toolkit.
"""

# Deployment Configuration
DISK_RADIUS = 100.0                 # deployment disk radius in meters, sink at the center
CONNECTIVITY_RADIUS = 40.0          # two nodes are linked iff their distance is below this
MAX_RETRIES = 1000                  # re-deployments before giving up on a connected network
DEFAULT_NODE_COUNT = 20

# Queueing Configuration
UNIT_RATIO_TOLERANCE = 1e-9         # |alpha - 1| below this uses the limit form

# Almost-fair bisection
BISECTION_MAX_ITER = 200
BISECTION_REL_WIDTH = 1e-14         # stop when the bracket is narrower than this times alpha+
BISECTION_REL_RESIDUAL = 1e-10      # stop when |f| <= this times mu (V-1)

# Simulated annealing (optimal allocation)
ANNEAL_ITERATIONS = 20000
ANNEAL_COOLING = 0.999              # geometric cooling factor per iteration
ANNEAL_INITIAL_TEMPERATURE = 0.1    # fraction of the initial score
ANNEAL_GREEDY_FRACTION = 0.1        # last share of iterations runs at zero temperature
ANNEAL_MU_STEP = 0.25               # std-dev of a move in log(mu)
ANNEAL_CAP_STEP = 0.1               # std-dev of a move in N, as a fraction of the average N
ANNEAL_MU_FLOOR = 1e-6              # mu_min as a fraction of the average mu
ANNEAL_RESTARTS = 1

# Simulation Configuration
SIM_MIN_EVENTS = 1_000_000
SIM_WARMUP_FRACTION = 0.1           # warmup reports as a fraction of counted reports
CONFIDENCE_LEVEL = 0.95
AGREEMENT_RELATIVE_SLACK = 0.1      # analytic vs simulated loss may differ by 10 %
AGREEMENT_CI_FACTOR = 3.0

# Experiment Configuration
MU_RANGE = (0.01, 10.0)             # admissible average harvest rates (packets/s)
CAP_RANGE = (1.0, 10000.0)          # admissible average capacities (packets)
SWEEP_NETWORKS = 100
SWEEP_WORKERS = 1
VALIDATION_NODE_RANGE = (10, 100)
JITTER_SPREAD = 0.5                 # multiplicative jitter U[1 - spread, 1 + spread]
CSV_SCHEMA_VERSION = 1
SCHEMES = ('uniform', 'fair', 'optimal')

# Runtime Configuration (set via command-line arguments)
DEFAULT_PROFILE = 'micaz-solar'
DEFAULT_SEED = 0
VERBOSE = False                     # Overridden by --verbose flag

# Parameter Profiles
# Select via --profile (default: micaz-solar)
# Hardware profiles are converted to packets by config.profiles; 'load' (or
# load_factor * mu) is the network-wide report rate, each sensor generating load / V.
PROFILES = {
    'micaz-solar': {
        'report_energy_j': 4.73e-3,     # one processed and transmitted report
        'storage_wh': 3e-3,             # supercapacitor
        'harvest_power_w': 1.1e-3,      # solar cell, average
        'load_factor': 2.0,
        'channel_loss': 1e-5,
    },
    'micaz-measured': {
        'active_time_s': 56.96e-3,      # radio and CPU on per report
        'active_power_w': 83.1e-3,
        'storage_wh': 3e-3,
        'harvest_power_w': 1.1e-3,
        'load_factor': 2.0,
        'channel_loss': 1e-5,
    },
    'lossy-small': {
        'mu': 0.05,
        'cap': 20.0,
        'load': 0.2,
        'channel_loss': 1e-3,
    },
}
