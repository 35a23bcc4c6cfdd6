"""Physical constants, CODATA 2018.

Values are pinned here rather than imported from scipy so that results do not
drift when the environment's CODATA tables are updated.
"""

import math

# Exact defining constants of the SI (2019 redefinition)
BOLTZMANN = 1.380649e-23        # J/K
PLANCK = 6.62607015e-34         # J s
AVOGADRO = 6.02214076e23        # 1/mol

HBAR = PLANCK / (2.0 * math.pi)  # J s

# Measured constants
BOHR_RADIUS = 5.29177210903e-11  # m
ATOMIC_MASS = 1.66053906660e-27  # kg
