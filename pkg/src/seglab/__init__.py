"""Surveillance-evasion game laboratory."""

from .config import LARGE, UNREACHABLE, RunConfig
from .grid import Grid2D, ScalarField, bilinear, dump_field, load_field, write_pgm
from .scene import (Circle, Diamond, Ellipse, Rectangle, SceneDescription,
                    free_mask, signed_distance)
from .eikonal import regularize_speed, solve_eikonal, speed_field
from .visibility import (VisibilityCache, grazing_field, is_end_game,
                         shadow_field, vantage_fields, visibility_field)

__all__ = [
    "LARGE", "UNREACHABLE", "RunConfig",
    "Grid2D", "ScalarField", "bilinear", "dump_field", "load_field", "write_pgm",
    "Circle", "Diamond", "Ellipse", "Rectangle", "SceneDescription",
    "free_mask", "signed_distance",
    "regularize_speed", "solve_eikonal", "speed_field",
    "VisibilityCache", "grazing_field", "is_end_game", "shadow_field",
    "vantage_fields", "visibility_field",
]

__version__ = "0.1.0"
