"""Physical constants (CODATA 2018, via scipy) and ion defaults."""

import math

from scipy.constants import atomic_mass, elementary_charge, epsilon_0, hbar

ELEMENTARY_CHARGE = elementary_charge   # C
VACUUM_PERMITTIVITY = epsilon_0         # F/m
HBAR = hbar                             # J s
ATOMIC_MASS = atomic_mass               # kg

# 171Yb atomic mass in u (AME2020); the electron-mass difference is far below
# the accuracy that matters here.
YB171_MASS_AMU = 170.936330
YB171_MASS = YB171_MASS_AMU * ATOMIC_MASS

# e^2 / (4 pi eps0), J m; used throughout the Coulomb-coupling formulas.
COULOMB_CONSTANT = ELEMENTARY_CHARGE**2 / (4.0 * math.pi * VACUUM_PERMITTIVITY)
