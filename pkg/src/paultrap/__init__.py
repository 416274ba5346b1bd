"""Design and analysis toolkit for linear RF Paul traps.

Modules
-------
core        physical constants, ion species, RF drive, unit conversions
fields      analytic gapless-plate electrostatics and pseudopotential maps
analysis    RF null, secular frequencies, trap depth, Mathieu stability
crystal     linear Coulomb crystal equilibria
micromotion micromotion amplitudes and Bessel-sideband spectra
noise       electric-field-noise to motional-heating budget
resonator   lumped RLC models of the RF step-up resonator
transport   control-voltage waveforms that move an axial well
cantilever  passive RF cooling of a micromechanical cantilever
qft         coherent and semiclassical quantum Fourier transform
cli         the `paultrap` command-line front end
"""

__version__ = "0.1.0"

from .core import (CONSTANTS, Constants, IonSpecies, RfDrive, ValidationError,
                   ConvergenceError, make_species, db_power_ratio,
                   power_ratio_db)

__all__ = [
    "CONSTANTS", "Constants", "IonSpecies", "RfDrive", "ValidationError",
    "ConvergenceError", "make_species", "db_power_ratio", "power_ratio_db",
    "__version__",
]
