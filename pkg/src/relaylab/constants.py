import os
from pathlib import Path


def get_results_path():
    results_path = Path.cwd() / "results"
    return results_path
RESULTS_PATH = get_results_path()


def get_log_dir():
    env_dir = os.environ.get("RELAYLAB_LOG_DIR")
    if env_dir:
        return Path(env_dir)
    return Path.cwd() / "logs"
LOG_DIR = get_log_dir()


THREADS_ENV = "RELAYLAB_THREADS"

# Reference settings: unit variances, R normalised to 1
DEFAULT_RATE = 1.0
DEFAULT_MAX_ROUNDS = 5
DEFAULT_SIGMA2 = 1.0
DEFAULT_SEED = 20100906
DEFAULT_TRIALS = 100_000
# Packet-level trials per SNR point in the published figures
FIGURE_TRIALS = 3_000_000

# Trials per RNG block in the Monte Carlo estimators; fixed so counts do not depend on workers
TRIAL_BLOCK = 1 << 14

# Largest relay count evaluated by subset expansion before falling back to quadrature
EXPANSION_MAX_RELAYS = 20


class Columns:
    RHO_DB = "rho_db"
    N_RELAYS = "n_relays"
    L = "l"
    METHOD = "method"
    CHI_TAIL = "chi_tail"
    VALUE = "value"
    CI3 = "ci3"
    WALL_TIME_MS = "wall_time_ms"

    ORDER = [RHO_DB, N_RELAYS, L, METHOD, CHI_TAIL, VALUE, CI3, WALL_TIME_MS]


class Tags:
    SIM = "sim"
    PDF = "pdf"
    LT = "lt"
    DL = "dl"
    REQUIRED_SNR = "required_snr_db"
