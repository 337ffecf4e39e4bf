"""Heavy-tailed random-field noise and SPDE mild solutions at desk scale.

Layers, bottom up: stable laws and the power-law jump measure (`stable`),
simulated jump fields and truncation (`noise`), Green kernels and their
integrability functionals (`kernels`), jump-sum stochastic integrals
(`integrate`), linear and Picard solvers (`solver`), and the seeded
statistical verification harness (`verify`).
"""

__version__ = "0.1.0"

from .boxes import Box, SpaceTimeBox
from .stable import LevyMeasure, StableConstants, StableParams
from .noise import JumpSet, NoiseConfig

__all__ = [
    "Box",
    "SpaceTimeBox",
    "LevyMeasure",
    "StableConstants",
    "StableParams",
    "JumpSet",
    "NoiseConfig",
    "__version__",
]
