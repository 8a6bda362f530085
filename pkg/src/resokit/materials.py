"""Shipped acoustic material table and the reference device geometry.

Densities and longitudinal sound speeds are representative handbook /
literature values, not measured properties of any particular film; they
are configuration inputs and can be overridden through the text config.
"""

from __future__ import annotations

from dataclasses import dataclass

from .acoustic1d import Layer, UnitCellGeometry


@dataclass(frozen=True)
class Material:
    """Bulk density (kg/m^3) and longitudinal sound speed (m/s)."""

    density: float
    velocity: float


DEFAULT_MATERIALS = {
    # CRC-style bulk metal values
    "ti": Material(density=4506.0, velocity=6070.0),
    "pt": Material(density=21450.0, velocity=3260.0),
    "al": Material(density=2700.0, velocity=6420.0),
    # sputtered AlScN at 24% Sc: density from AlN/ScN interpolation,
    # velocity from the Sc-softened c33 stiffness range reported for
    # films of this composition
    "alscn24": Material(density=3480.0, velocity=9500.0),
}


def make_layer(material: str, thickness: float,
               table: dict[str, Material] = DEFAULT_MATERIALS) -> Layer:
    """Build a Layer of `thickness` meters from a named material."""
    m = table[material]
    return Layer(thickness=thickness, density=m.density, velocity=m.velocity)


def reference_rod_stack() -> list[Layer]:
    """Rod-region stack of the shipped example device (bottom to top):
    Ti 20 nm / Pt 50 nm / AlScN 500 nm / Al 110 nm."""
    return [
        make_layer("ti", 20e-9),
        make_layer("pt", 50e-9),
        make_layer("alscn24", 500e-9),
        make_layer("al", 110e-9),
    ]


def reference_trench_stack() -> list[Layer]:
    """Trench-region stack of the shipped example device:
    Ti 20 nm / Pt 50 nm / AlScN 150 nm."""
    return [
        make_layer("ti", 20e-9),
        make_layer("pt", 50e-9),
        make_layer("alscn24", 150e-9),
    ]


def reference_unit_cell() -> UnitCellGeometry:
    """Unit cell of the shipped example device: 9 um rods on a 24 um pitch,
    150 nm trench film, 350 nm rod step."""
    return UnitCellGeometry(
        w_r=9e-6,
        w_u=24e-6,
        t1=150e-9,
        t2=350e-9,
        rod_stack=tuple(reference_rod_stack()),
        trench_stack=tuple(reference_trench_stack()),
    )
