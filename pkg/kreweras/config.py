"""
Configuration module for the kreweras toolkit.

This centralizes all tunable parameters to avoid hardcoded values.
Every value can be overridden by an environment variable; the CLI flags and
--config files override these in turn (see models.PipelineConfig).
"""

import os
from typing import Tuple


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


# ===== TRUNCATION ORDERS =====

# Default truncation order for enumerate / kernel-check / theta
PRECISION = int(os.getenv("KREWERAS_PRECISION", "64"))

# Order used for the enumeration stage of the pipeline
ENUMERATE_ORDER = int(os.getenv("KREWERAS_ENUMERATE_ORDER", "15"))

# Order of Theta fed to the ODE guesser (fit + reserve)
THETA_ORDER = int(os.getenv("KREWERAS_THETA_ORDER", "140"))

# Order of the closed form C compared against Theta
CLOSEDFORM_ORDER = int(os.getenv("KREWERAS_CLOSEDFORM_ORDER", "60"))


# ===== GUESSING =====

# Prime for modular guessing (F_45007)
PRIME = int(os.getenv("KREWERAS_PRIME", "45007"))

# Reserve coefficients withheld from fitting
RESERVE = int(os.getenv("KREWERAS_RESERVE", "10"))

# Reserve for the headline Theta guess
THETA_RESERVE = int(os.getenv("KREWERAS_THETA_RESERVE", "20"))

# First specialization points for symbolic-x guessing; more integers are
# appended when the x-degree bound needs them
X_POINTS = _int_list(os.getenv("KREWERAS_X_POINTS", "2,3,5,7,11"))

# Staircase bounds
MAX_ORDER = int(os.getenv("KREWERAS_MAX_ORDER", "4"))
MAX_DEGREE = int(os.getenv("KREWERAS_MAX_DEGREE", "22"))
MAX_X_DEGREE = int(os.getenv("KREWERAS_MAX_X_DEGREE", "16"))


# ===== CERTIFICATES =====

# Coefficients of margin required by every EMPIRICAL check
EMPIRICAL_MARGIN = int(os.getenv("KREWERAS_EMPIRICAL_MARGIN", "20"))

# Depth of the order-1 search that backs the minimality of the H equation
MINIMALITY_DEPTH = int(os.getenv("KREWERAS_MINIMALITY_DEPTH", "80"))

# Depth of the Q(0,0) and c = 0 modular experiments
MODULAR_DEPTH = int(os.getenv("KREWERAS_MODULAR_DEPTH", "200"))


# ===== OUTPUT =====

OUTPUT_DIR = os.getenv("KREWERAS_OUTPUT_DIR", "artifacts")


# ===== LOGGING CONFIGURATION =====

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
