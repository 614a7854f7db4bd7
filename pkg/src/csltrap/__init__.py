"""Two-ion Paul trap physics and CSL heating bounds."""
from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .core import IonSpecies, MassDistribution, barium_ion, build_porphyrin_barrel, make_point_ion
from .csl import CslParams, csl_heating_extended, csl_heating_pointlike, exclusion_bound
from .modes import ModeId, TwoIonSystem, equilibrium, mode_spectrum
from .trap import TrapConfig

__all__ = [
    "__version__", "IonSpecies", "MassDistribution", "barium_ion", "build_porphyrin_barrel",
    "make_point_ion", "CslParams", "csl_heating_extended", "csl_heating_pointlike",
    "exclusion_bound", "ModeId", "TwoIonSystem", "equilibrium", "mode_spectrum", "TrapConfig",
]
