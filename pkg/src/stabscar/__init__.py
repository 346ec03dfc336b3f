"""Parent Hamiltonians for stabilizer-state many-body scars."""

import os as _os

# thread count for the numerical back ends; must be set before numpy loads
_threads = _os.environ.get("STABSCAR_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ[_var] = _threads

from .errors import (  # noqa: E402
    DimensionError,
    DomainError,
    InvalidGroupError,
    ParameterError,
    ResourceLimitError,
    SectorError,
    StabscarError,
    StatisticsError,
)
from .factorize import FactorizationPair, factorize_element, scan_group, verify_annihilator  # noqa: E402
from .hamiltonian import CouplingScheme, HamiltonianTerms, assemble, verify_scar  # noqa: E402
from .lattice import LatticeGeometry, named_site_map  # noqa: E402
from .models import MODELS, ModelSpec, build_model  # noqa: E402
from .pauli import P, PauliString, commutes, multiply  # noqa: E402
from .spectral import diagonalize, level_statistics, reference_band, run_spectrum  # noqa: E402
from .stabilizer import StabilizerGroup, entanglement_entropy, membership  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "StabscarError", "DimensionError", "DomainError", "InvalidGroupError", "ParameterError",
    "ResourceLimitError", "SectorError", "StatisticsError",
    "PauliString", "P", "commutes", "multiply",
    "LatticeGeometry", "named_site_map",
    "StabilizerGroup", "membership", "entanglement_entropy",
    "FactorizationPair", "factorize_element", "scan_group", "verify_annihilator",
    "CouplingScheme", "HamiltonianTerms", "assemble", "verify_scar",
    "diagonalize", "run_spectrum", "level_statistics", "reference_band",
    "ModelSpec", "MODELS", "build_model",
]
