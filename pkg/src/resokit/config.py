"""Line-oriented text configuration for devices, stacks and filters.

Format: INI-style sections of `key = value` lines, `#`/`;` comments.

    [materials]            # name = density_kg_m3 velocity_m_s
    alscn24 = 3480 9500

    [stack rod]            # layers bottom-to-top: material thickness_m
    layers = ti 20e-9, pt 50e-9, alscn24 500e-9, al 110e-9

    [cell]
    rod_width_m = 9e-6
    cell_width_m = 24e-6
    trench_film_m = 150e-9
    rod_step_m = 350e-9
    rod_stack = rod
    trench_stack = trench

    [resonator]            # targets; rs_ohm/r0_ohm optional (default 0)
    fres_hz = 5.31e9
    kt2 = 0.239
    qm = 101
    c0_f = 1.25e-12

    [filter]
    order = 5
    cap_ratio = 3
    z0_ohm = 50

Materials omitted from [materials] fall back to the shipped default
table. All numeric fields are SI.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .acoustic1d import Layer, UnitCellGeometry
from .errors import ValidationError
from .materials import DEFAULT_MATERIALS, Material


@dataclass(frozen=True)
class ResonatorTargets:
    fres: float
    kt2: float
    qm: float
    c0: float
    rs: float = 0.0
    r0: float = 0.0


@dataclass(frozen=True)
class FilterParams:
    order: int
    cap_ratio: float
    z0: float


@dataclass(frozen=True)
class DesignConfig:
    """Resolved configuration: structures referenced by name are expanded."""

    materials: dict
    stacks: dict
    cell: UnitCellGeometry | None
    resonator: ResonatorTargets | None
    filter_params: FilterParams | None


def _get_float(section, key, where):
    raw = section.get(key)
    if raw is None:
        raise ValidationError(f"[{where}] missing required key '{key}'")
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"[{where}] {key} = {raw!r} is not a number")


def _parse_materials(section) -> dict[str, Material]:
    table = dict(DEFAULT_MATERIALS)
    for name, raw in section.items():
        parts = raw.split()
        if len(parts) != 2:
            raise ValidationError(
                f"[materials] {name}: expected 'density velocity', got {raw!r}"
            )
        try:
            density, velocity = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValidationError(f"[materials] {name}: non-numeric field in {raw!r}")
        if density <= 0 or velocity <= 0:
            raise ValidationError(f"[materials] {name}: values must be > 0")
        table[name.lower()] = Material(density=density, velocity=velocity)
    return table


def _parse_stack(name, section, materials) -> list[Layer]:
    raw = section.get("layers")
    if raw is None:
        raise ValidationError(f"[stack {name}] missing required key 'layers'")
    layers = []
    for entry in raw.split(","):
        parts = entry.split()
        if len(parts) != 2:
            raise ValidationError(
                f"[stack {name}] layer entry {entry.strip()!r}: expected 'material thickness'"
            )
        mat_name = parts[0].lower()
        if mat_name not in materials:
            raise ValidationError(f"[stack {name}] unknown material '{parts[0]}'")
        try:
            thickness = float(parts[1])
        except ValueError:
            raise ValidationError(f"[stack {name}] bad thickness {parts[1]!r}")
        m = materials[mat_name]
        layers.append(Layer(thickness=thickness, density=m.density, velocity=m.velocity))
    if not layers:
        raise ValidationError(f"[stack {name}] must define at least one layer")
    return layers


def parse_config(text: str) -> DesignConfig:
    """Parse config text into a DesignConfig; names must resolve."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config syntax error: {exc}")

    materials = _parse_materials(cp["materials"] if cp.has_section("materials") else {})

    stacks = {}
    for sect in cp.sections():
        if sect.lower().startswith("stack "):
            name = sect[6:].strip()
            if not name:
                raise ValidationError("stack section needs a name: [stack <name>]")
            stacks[name] = _parse_stack(name, cp[sect], materials)

    cell = None
    if cp.has_section("cell"):
        s = cp["cell"]
        for key in ("rod_stack", "trench_stack"):
            ref = s.get(key)
            if ref is None:
                raise ValidationError(f"[cell] missing required key '{key}'")
            if ref not in stacks:
                raise ValidationError(f"[cell] {key} references unknown stack '{ref}'")
        cell = UnitCellGeometry(
            w_r=_get_float(s, "rod_width_m", "cell"),
            w_u=_get_float(s, "cell_width_m", "cell"),
            t1=_get_float(s, "trench_film_m", "cell"),
            t2=_get_float(s, "rod_step_m", "cell"),
            rod_stack=tuple(stacks[s.get("rod_stack")]),
            trench_stack=tuple(stacks[s.get("trench_stack")]),
        )

    resonator = None
    if cp.has_section("resonator"):
        s = cp["resonator"]
        resonator = ResonatorTargets(
            fres=_get_float(s, "fres_hz", "resonator"),
            kt2=_get_float(s, "kt2", "resonator"),
            qm=_get_float(s, "qm", "resonator"),
            c0=_get_float(s, "c0_f", "resonator"),
            rs=float(s.get("rs_ohm", 0.0)),
            r0=float(s.get("r0_ohm", 0.0)),
        )

    filter_params = None
    if cp.has_section("filter"):
        s = cp["filter"]
        order_raw = s.get("order")
        if order_raw is None:
            raise ValidationError("[filter] missing required key 'order'")
        try:
            order = int(order_raw)
        except ValueError:
            raise ValidationError(f"[filter] order = {order_raw!r} is not an integer")
        filter_params = FilterParams(
            order=order,
            cap_ratio=_get_float(s, "cap_ratio", "filter"),
            z0=_get_float(s, "z0_ohm", "filter"),
        )

    return DesignConfig(materials=materials, stacks=stacks, cell=cell,
                        resonator=resonator, filter_params=filter_params)


def load_config(path) -> DesignConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
