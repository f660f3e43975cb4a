"""Point interactions in rotationally symmetric magnetic backgrounds.

Bound states created by a movable zero-range perturbation, their Berry
phases, the flux-ring persistent-current formula and the Wilczek-Zee
holonomy of the lowest Landau level.
"""
from .model import (Background, Gap, LoopPath, PointPerturbation, SystemConfig,
                    alpha_from_lambda, flux_through_loop, loop_area)
from .krein import NoSolutionInGap, SpectralSolution, eigenfunction, solve_level

__all__ = [
    "Background", "Gap", "LoopPath", "PointPerturbation", "SystemConfig",
    "alpha_from_lambda", "flux_through_loop", "loop_area",
    "NoSolutionInGap", "SpectralSolution", "eigenfunction", "solve_level",
]
__version__ = "0.1.0"
