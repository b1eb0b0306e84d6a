"""
Domain Models
"""
from src.models.beam import RB87, SPECIES, AtomicSpecies, GaussianBeam
from src.models.chip import ChipCrossSection, Conductor, DielectricRegion, GridSpec
from src.models.cloud import AtomCloud
from src.models.exposure import ExposureBudget
from src.models.fieldmap import FieldMap
from src.models.resonator import CouplingResult, ResonatorModel, ResonatorSolution
from src.models.sweep import SweepFailure, SweepPoint, SweepTable
from src.models.trace import FitResult, S11Trace

__all__ = [
    "GaussianBeam",
    "AtomicSpecies",
    "RB87",
    "SPECIES",
    "ChipCrossSection",
    "Conductor",
    "DielectricRegion",
    "GridSpec",
    "AtomCloud",
    "ExposureBudget",
    "FieldMap",
    "ResonatorModel",
    "ResonatorSolution",
    "CouplingResult",
    "SweepPoint",
    "SweepFailure",
    "SweepTable",
    "S11Trace",
    "FitResult",
]
