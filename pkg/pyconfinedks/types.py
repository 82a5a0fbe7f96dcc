from enum import Enum
import math


# ===== ENUMS =====

class FunctionalMode(str, Enum):
    X_ONLY = "x_only"
    XC_WIGNER = "xc_wigner"
    XC_LYP = "xc_lyp"


class Spin(str, Enum):
    UP = "up"
    DOWN = "down"


class DeterminantRole(str, Enum):
    CLOSED_SHELL = "closed_shell"
    HIGH_SPIN = "high_spin"
    MS0_AVERAGE = "ms0_average"


# ===== GRID =====

DEFAULT_N_R = 300
DEFAULT_MAP_LENGTH = 1.0
FREE_LIMIT_RADIUS = 40.0
FREE_LIMIT_TOKENS = {"inf", "infinity", "free"}
MIN_CAVITY_RADIUS = 0.05
MAX_COLLOCATION_ORDER = 2048
NEWTON_TOLERANCE = 1e-14


# ===== ANGULAR =====

L_MAX = 6
LOG_FACTORIAL_SIZE = 61
ORBITAL_LETTERS = "spdfghi"
TERM_LETTERS = "SPDFGHI"


# ===== FUNCTIONALS =====

DENSITY_FLOOR = 1e-30

WIGNER_A = 9.81
WIGNER_B = 21.437

LYP_A = 0.04918
LYP_B = 0.132
LYP_C = 0.2533
LYP_D = 0.349
LYP_CF = 0.3 * (3.0 * math.pi ** 2) ** (2.0 / 3.0)


# ===== SCF =====

DEFAULT_MIXING = 0.3
DEFAULT_MAX_ITER = 200
ENERGY_TOLERANCE = 1e-6
POTENTIAL_TOLERANCE = 1e-5
MIN_MIXING = 1e-3
OSCILLATION_WINDOW = 3


# ===== SYSTEMS =====

ELEMENTS = {"H": 1, "He": 2, "Li": 3, "Be": 4}
MOMENT_ORDERS = (-2, -1, 1, 2, 3, 4)
