"""Physical constants (SI) used throughout the package."""

from scipy import constants as _c

MU0 = _c.mu_0
EPS0 = _c.epsilon_0
KB = _c.k

# free-electron gyromagnetic ratio [rad/(s T)]
GAMMA_E = 1.761e11
