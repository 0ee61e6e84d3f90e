"""Moment classes of constant mean curvature surfaces in 3-dimensional space forms.

Space forms are realized as conic sections of the lightcone in R^{4,1};
Killing fields are bivectors.  The package evaluates the retraction form
eta of a surface, its moment representatives, and their periods.
"""
from . import calculus, forms, geometry, lorentz, parallel, spaceform, surfaces
from .spaceform import SpaceForm, killing_basis, make_spaceform
from .surfaces import catalog, jet, make_family, third_order_data

__all__ = [
    "calculus", "forms", "geometry", "lorentz", "parallel", "spaceform", "surfaces",
    "SpaceForm", "killing_basis", "make_spaceform", "catalog", "jet", "make_family",
    "third_order_data",
]
