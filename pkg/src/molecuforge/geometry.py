"""Vacancy presets, angle measurement, and the rigid docking transform.

Each valency gets the maximally symmetric arrangement of bond slots:
linear for 2, trigonal planar for 3, tetrahedral for 4. Slot directions
live in the atom's local frame; the atom's orientation quaternion maps
them to world space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quat
from .elements import ElementSpec
from .errors import (
    DegeneratePositions,
    NoSuchSlot,
    NotBonded,
    SameComponent,
    SlotOccupied,
    UnsupportedValency,
)
from .model import SlotRef, VacancySlot, Workspace, are_bonded, connected_component

__all__ = [
    "TETRAHEDRAL_ANGLE",
    "RigidTransform",
    "SlotRef",
    "vacancy_directions",
    "preset_angle",
    "preset_slots",
    "world_direction",
    "bond_angle",
    "dihedral_angle",
    "docking_transform",
]

TETRAHEDRAL_ANGLE = math.acos(-1.0 / 3.0)  # 109.4712 degrees

_SQRT3 = math.sqrt(3.0)

_PRESETS: dict[int, tuple[tuple[float, float, float], ...]] = {
    1: ((0.0, 0.0, 1.0),),
    2: ((0.0, 0.0, 1.0), (0.0, 0.0, -1.0)),
    3: (
        (1.0, 0.0, 0.0),
        (-0.5, _SQRT3 / 2.0, 0.0),
        (-0.5, -_SQRT3 / 2.0, 0.0),
    ),
    4: (
        (1.0 / _SQRT3, 1.0 / _SQRT3, 1.0 / _SQRT3),
        (1.0 / _SQRT3, -1.0 / _SQRT3, -1.0 / _SQRT3),
        (-1.0 / _SQRT3, 1.0 / _SQRT3, -1.0 / _SQRT3),
        (-1.0 / _SQRT3, -1.0 / _SQRT3, 1.0 / _SQRT3),
    ),
}

_PRESET_ANGLES = {2: math.pi, 3: 2.0 * math.pi / 3.0, 4: TETRAHEDRAL_ANGLE}


def vacancy_directions(valency: int) -> list[np.ndarray]:
    """Preset local slot directions for a valency in 1..4."""
    try:
        dirs = _PRESETS[valency]
    except KeyError:
        raise UnsupportedValency(f"no vacancy preset for valency {valency!r}") from None
    return [np.array(d) for d in dirs]


def preset_angle(valency: int) -> float:
    """The equal pairwise angle of the valency's preset, radians."""
    try:
        return _PRESET_ANGLES[valency]
    except KeyError:
        raise UnsupportedValency(f"no preset angle for valency {valency!r}") from None


def preset_slots(element: ElementSpec) -> list[VacancySlot]:
    return [
        VacancySlot(i, d, None) for i, d in enumerate(vacancy_directions(element.valency))
    ]


@dataclass
class RigidTransform:
    rotation: np.ndarray  # unit quaternion, scalar-first
    translation: np.ndarray  # (3,)

    def apply_point(self, p: np.ndarray) -> np.ndarray:
        return quat.rotate(self.rotation, p) + self.translation


def _resolve_slot(ws: Workspace, ref: SlotRef):
    atom = ws.atom(ref.atom_id)
    if not 0 <= ref.slot_index < len(atom.slots):
        raise NoSuchSlot(f"atom {ref.atom_id} has no slot {ref.slot_index}")
    return atom, atom.slots[ref.slot_index]


def world_direction(ws: Workspace, slot: SlotRef) -> np.ndarray:
    """Slot direction rotated into world space; unit norm."""
    atom, vacancy = _resolve_slot(ws, slot)
    return quat.rotate(atom.orientation, vacancy.local_direction)


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def bond_angle(ws: Workspace, a: int, center: int, b: int) -> float:
    """Angle a-center-b in [0, pi]; both outer atoms must be bonded to center."""
    for outer in (a, b):
        if not are_bonded(ws, outer, center):
            raise NotBonded(f"atoms {outer} and {center} are not bonded")
    pa = ws.atom(a).position
    pc = ws.atom(center).position
    pb = ws.atom(b).position
    u = pa - pc
    v = pb - pc
    if np.linalg.norm(u) < 1e-9 or np.linalg.norm(v) < 1e-9:
        raise DegeneratePositions("angle arm shorter than 1e-9 A")
    return _angle_between(u, v)


def dihedral_angle(p1, p2, p3, p4) -> float:
    """Signed dihedral about the p2->p3 axis, in (-pi, pi].

    Convention: looking along p2->p3, the angle rotates p1's half-plane
    onto p4's, counterclockwise positive. Coplanar cis is 0, trans is pi.
    """
    p1, p2, p3, p4 = (np.asarray(p, dtype=float) for p in (p1, p2, p3, p4))
    b1 = p2 - p1
    b2 = p3 - p2
    b3 = p4 - p3
    for arm in (b1, b2, b3):
        if np.linalg.norm(arm) < 1e-9:
            raise DegeneratePositions("dihedral difference vector shorter than 1e-9 A")
    n1 = np.cross(b1, b2)
    n2 = np.cross(b2, b3)
    if np.linalg.norm(n1) < 1e-9 or np.linalg.norm(n2) < 1e-9:
        raise DegeneratePositions("dihedral arms parallel at the hinge")
    b2_hat = b2 / np.linalg.norm(b2)
    x = float(np.dot(n1, n2))
    y = float(np.dot(np.cross(n1, n2), b2_hat))
    angle = math.atan2(y, x)
    return math.pi if angle == -math.pi else angle


def docking_transform(
    ws: Workspace, held: SlotRef, target: SlotRef, rest_length: float
) -> RigidTransform:
    """Rigid motion that docks the held component onto the target slot.

    Afterwards the held slot points exactly against the target slot and
    the held atom sits at rest_length along the target slot direction.
    Among all such motions, the rotation closest to the current pose is
    chosen, which fixes the torsional freedom about the new bond.
    """
    held_atom, held_vacancy = _resolve_slot(ws, held)
    target_atom, target_vacancy = _resolve_slot(ws, target)
    if held_vacancy.occupied_by is not None:
        raise SlotOccupied(f"held slot {held.slot_index} on atom {held.atom_id} is occupied")
    if target_vacancy.occupied_by is not None:
        raise SlotOccupied(
            f"target slot {target.slot_index} on atom {target.atom_id} is occupied"
        )
    if held.atom_id in connected_component(ws, target.atom_id):
        raise SameComponent(f"atoms {held.atom_id} and {target.atom_id} are already connected")

    held_dir = world_direction(ws, held)
    target_dir = world_direction(ws, target)
    rotation = quat.rotation_between(held_dir, -target_dir)
    docked_position = target_atom.position + rest_length * target_dir
    translation = docked_position - quat.rotate(rotation, held_atom.position)
    return RigidTransform(rotation, translation)
