"""Random ideal tilings of the hyperbolic plane: samplers, geometry and checks."""

from .geom import (CAYLEY, CAYLEY_INV, BoundaryPoint, Geodesic, IdealPolygon, MobiusMap,
                   mobius_from_triples)
from .io import read_tiling, write_tiling
from .rng import RandomStream
from .tiling import Tiling, farey_ref, locate_triangle, sample_disk_triangulation
from .ngon import sample_disk_quadrangulation

__version__ = "0.1.0"

__all__ = ["CAYLEY", "CAYLEY_INV", "BoundaryPoint", "Geodesic", "IdealPolygon", "MobiusMap",
           "RandomStream", "Tiling", "farey_ref", "locate_triangle", "mobius_from_triples",
           "read_tiling", "sample_disk_quadrangulation", "sample_disk_triangulation",
           "write_tiling"]
