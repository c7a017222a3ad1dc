"""Slit-disk uniformization, intrinsic rotations and the torsion tower."""

from .maps import AnalyticMap, Compose, Identity, Mobius, RadialLift, Rotation, chain
from .slits import (
    SlitDomain,
    biaccessibility_probe,
    intrinsic_rotation,
    prop5_root,
    q_slit_uniformizer,
    single_slit_uniformizer,
)

__all__ = [
    "AnalyticMap",
    "Compose",
    "Identity",
    "Mobius",
    "RadialLift",
    "Rotation",
    "chain",
    "SlitDomain",
    "biaccessibility_probe",
    "intrinsic_rotation",
    "prop5_root",
    "q_slit_uniformizer",
    "single_slit_uniformizer",
]
