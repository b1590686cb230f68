"""Physical constants and shared defaults (SI unless suffixed otherwise)."""

GRAVITY = 9.81  # m/s^2

# Galinstan (GaInSn) electrical resistivity, ohm*m.
GALINSTAN_RESISTIVITY = 2.89e-7

# Water at room temperature.
WATER_DENSITY = 1000.0  # kg/m^3
WATER_VISCOSITY = 1.0e-3  # Pa*s

# Driver hardware limit on coil current magnitude, A.
CURRENT_LIMIT = 2.0

# Default integration step for the planar engine, s.
DEFAULT_DT = 5e-5

# Contact penetration tolerance, m.
PENETRATION_TOL = 1e-5
