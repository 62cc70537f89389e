"""Physical constants and unit conversions (Hartree atomic units internally)."""

HARTREE_TO_CM = 219474.6313632
FINE_STRUCTURE = 7.2973525693e-3
SPEED_OF_LIGHT = 1.0 / FINE_STRUCTURE
BOHR_NM = 0.0529177210903
AU_TIME_S = 2.4188843265857e-17
AMU_TO_ME = 1822.888486209


def to_cm(energy_hartree):
    return energy_hartree * HARTREE_TO_CM


def to_hartree(energy_cm):
    return energy_cm / HARTREE_TO_CM
