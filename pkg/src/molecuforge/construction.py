"""Interactive construction verbs: create, delete, grab/drag/release,
direct bonding, edit-mode anchoring, and rigid conformer moves.

Grabbing moves whole molecules unless edit mode is active, in which case
only the held atom moves and the force field settles the geometry after
release. Snap candidates are recomputed on every drag with a fully
deterministic tie-break so scripted sessions replay exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import quat
from .elements import ElementSpec, element_spec
from .errors import (
    AlreadyBonded,
    AlreadyGrabbing,
    AnchorGrabbed,
    AtomGrabbed,
    BondInCycle,
    DegeneratePositions,
    NoActiveGrab,
    NoFreeSlot,
    NoSuchBond,
    NotAnEndpoint,
    SelfBond,
)
from .forcefield import ForceFieldParams, RelaxReport, relax
from .geometry import bond_angle, docking_transform, preset_slots, world_direction
from .model import (
    SNAP_RADIUS_FACTOR,
    Atom,
    GrabState,
    SlotRef,
    SnapCandidate,
    Workspace,
    adjacency,
    connected_component,
    find_bond,
    make_bond,
)

__all__ = [
    "GrabState",
    "SnapCandidate",
    "AngleReading",
    "ReleaseOutcome",
    "snap_threshold",
    "create_atom",
    "delete_atom",
    "grab",
    "drag",
    "release",
    "form_bond",
    "angle_readout",
    "set_anchor",
    "rotate_about_bond",
    "move_molecule",
]


@dataclass
class AngleReading:
    a: int
    b: int
    degrees: float


@dataclass
class ReleaseOutcome:
    bond_id: int | None
    relax_report: RelaxReport | None


def snap_threshold(a: ElementSpec, b: ElementSpec) -> float:
    return SNAP_RADIUS_FACTOR * (a.covalent_radius + b.covalent_radius)


def create_atom(ws: Workspace, symbol: str, position) -> int:
    """Add an atom with identity orientation and all slots free; returns its id."""
    element = element_spec(symbol)
    atom_id = ws.next_atom_id
    ws.next_atom_id += 1
    ws.atoms[atom_id] = Atom(
        id=atom_id,
        element=element,
        position=np.asarray(position, dtype=float).reshape(3).copy(),
        orientation=quat.identity(),
        slots=preset_slots(element),
    )
    return atom_id


def delete_atom(ws: Workspace, atom_id: int) -> list[int]:
    """Remove the atom and its bonds; returns the removed bond ids ascending."""
    ws.atom(atom_id)
    if ws.grab is not None and ws.grab.held_atom == atom_id:
        raise AtomGrabbed(f"atom {atom_id} is currently held")

    removed = sorted(b.id for b in ws.bonds.values() if atom_id in b.atom_ids)
    for bid in removed:
        bond = ws.bonds.pop(bid)
        neighbor = bond.other(atom_id)
        ws.atoms[neighbor].slots[bond.slot_of(neighbor)].occupied_by = None
    del ws.atoms[atom_id]

    if ws.anchor == atom_id:
        ws.anchor = None
        if ws.grab is not None:
            ws.grab.mode = "molecule"
    if ws.grab is not None and ws.grab.candidate is not None:
        if ws.grab.candidate.target_slot.atom_id == atom_id:
            ws.grab.candidate = None
    return removed


def grab(ws: Workspace, atom_id: int) -> GrabState:
    """Pick up an atom; molecule mode normally, single-atom mode in edit mode."""
    ws.atom(atom_id)
    if ws.grab is not None:
        raise AlreadyGrabbing(f"atom {ws.grab.held_atom} is already held")
    if ws.anchor == atom_id:
        raise AnchorGrabbed(f"atom {atom_id} is the frozen anchor")
    mode = "single_atom" if ws.anchor is not None else "molecule"
    ws.grab = GrabState(held_atom=atom_id, mode=mode, candidate=None)
    _recompute_candidate(ws)
    return ws.grab


def drag(ws: Workspace, new_position) -> SnapCandidate | None:
    """Move the grabbed atom (or its whole molecule) and rescan for a snap pair."""
    if ws.grab is None:
        raise NoActiveGrab("nothing is grabbed")
    held = ws.atom(ws.grab.held_atom)
    target = np.asarray(new_position, dtype=float).reshape(3)
    if ws.grab.mode == "molecule":
        delta = target - held.position
        for aid in connected_component(ws, held.id):
            ws.atoms[aid].position = ws.atoms[aid].position + delta
    else:
        held.position = target.copy()
    return _recompute_candidate(ws)


def release(ws: Workspace, params: ForceFieldParams | None = None) -> ReleaseOutcome:
    """Drop the grabbed atom, bonding to the snap candidate if one is lit.

    Molecule mode docks the held component rigidly before bonding; edit
    mode leaves positions alone and lets relaxation (anchor fixed)
    settle the geometry afterwards.
    """
    if ws.grab is None:
        raise NoActiveGrab("nothing is grabbed")
    state = ws.grab
    bond_id = None
    if state.candidate is not None:
        cand = state.candidate
        rest = (
            ws.atom(cand.held_slot.atom_id).element.covalent_radius
            + ws.atom(cand.target_slot.atom_id).element.covalent_radius
        )
        if state.mode == "molecule":
            transform = docking_transform(ws, cand.held_slot, cand.target_slot, rest)
            _apply_rigid(
                ws,
                connected_component(ws, cand.held_slot.atom_id),
                transform.rotation,
                np.zeros(3),
                transform.translation,
            )
        bond_id = _create_bond(ws, cand.held_slot, cand.target_slot, rest)
    ws.grab = None
    report = None
    if ws.anchor is not None:
        report = relax(ws, params or ForceFieldParams(), fixed={ws.anchor})
    return ReleaseOutcome(bond_id, report)


def form_bond(ws: Workspace, a: int, b: int) -> int:
    """Bond two atoms directly, docking b's molecule when they are separate.

    Each side uses its free slot best aligned toward the partner.
    """
    atom_a = ws.atom(a)
    atom_b = ws.atom(b)
    if a == b:
        raise SelfBond(f"atom {a} cannot bond to itself")
    if find_bond(ws, a, b) is not None:
        raise AlreadyBonded(f"atoms {a} and {b} are already bonded")
    for atom in (atom_a, atom_b):
        if not atom.free_slots():
            raise NoFreeSlot(f"atom {atom.id} has no free slot")

    direction = atom_b.position - atom_a.position
    norm = float(np.linalg.norm(direction))
    direction = direction / norm if norm >= 1e-9 else np.zeros(3)
    slot_a = SlotRef(a, _best_aligned_slot(ws, atom_a, direction))
    slot_b = SlotRef(b, _best_aligned_slot(ws, atom_b, -direction))

    rest = atom_a.element.covalent_radius + atom_b.element.covalent_radius
    if b not in connected_component(ws, a):
        transform = docking_transform(ws, slot_b, slot_a, rest)
        _apply_rigid(
            ws,
            connected_component(ws, b),
            transform.rotation,
            np.zeros(3),
            transform.translation,
        )
    return _create_bond(ws, slot_b, slot_a, rest)


def angle_readout(ws: Workspace, atom_id: int) -> list[AngleReading]:
    """Degrees for every pair of bonds meeting at the atom, neighbor ids ascending."""
    ws.atom(atom_id)
    neighbors = sorted(adjacency(ws)[atom_id])
    readout = []
    for i in range(len(neighbors)):
        for j in range(i + 1, len(neighbors)):
            angle = bond_angle(ws, neighbors[i], atom_id, neighbors[j])
            readout.append(AngleReading(neighbors[i], neighbors[j], math.degrees(angle)))
    return readout


def set_anchor(ws: Workspace, atom_id: int | None) -> list[AngleReading]:
    """Enter or leave edit mode; returns the bond-angle readout at the anchor."""
    if atom_id is None:
        ws.anchor = None
        _sync_grab_mode(ws)
        return []
    ws.atom(atom_id)
    if ws.grab is not None and ws.grab.held_atom == atom_id:
        raise AtomGrabbed(f"atom {atom_id} is currently held")
    ws.anchor = atom_id
    _sync_grab_mode(ws)
    return angle_readout(ws, atom_id)


def rotate_about_bond(ws: Workspace, bond_id: int, moving_side: int, angle: float) -> int:
    """Rotate one side of a non-cycle bond about the bond axis; returns atoms moved.

    A positive angle increases dihedrals measured fixed-side to
    moving-side by exactly that amount (mod 2 pi).
    """
    bond = ws.bonds.get(bond_id)
    if bond is None:
        raise NoSuchBond(f"no bond with id {bond_id}")
    if moving_side not in bond.atom_ids:
        raise NotAnEndpoint(f"atom {moving_side} is not an endpoint of bond {bond_id}")
    fixed_side = bond.other(moving_side)

    side = _side_of(ws, moving_side, bond_id)
    if fixed_side in side:
        raise BondInCycle(f"bond {bond_id} lies on a cycle")
    if angle == 0.0:
        return 0

    pivot = ws.atoms[fixed_side].position
    axis = ws.atoms[moving_side].position - pivot
    norm = float(np.linalg.norm(axis))
    if norm < 1e-9:
        raise DegeneratePositions("bond endpoints coincide; rotation axis undefined")
    rotation = quat.from_axis_angle(axis / norm, angle)
    _apply_rigid(ws, side, rotation, pivot, np.zeros(3))
    return len(side)


def move_molecule(ws: Workspace, atom_id: int, translation, rotation, pivot) -> int:
    """Rigidly move the atom's whole molecule: rotate about pivot, then translate."""
    ws.atom(atom_id)
    component = connected_component(ws, atom_id)
    _apply_rigid(
        ws,
        component,
        np.asarray(rotation, dtype=float).reshape(4),
        np.asarray(pivot, dtype=float).reshape(3),
        np.asarray(translation, dtype=float).reshape(3),
    )
    return len(component)


# -- internals ---------------------------------------------------------------

def _sync_grab_mode(ws: Workspace) -> None:
    if ws.grab is None:
        return
    ws.grab.mode = "single_atom" if ws.anchor is not None else "molecule"
    _recompute_candidate(ws)


def _best_aligned_slot(ws: Workspace, atom: Atom, direction: np.ndarray) -> int:
    best_index = None
    best_score = -math.inf
    for slot in atom.free_slots():
        score = float(np.dot(world_direction(ws, SlotRef(atom.id, slot.index)), direction))
        if score > best_score:
            best_score = score
            best_index = slot.index
    if best_index is None:
        raise NoFreeSlot(f"atom {atom.id} has no free slot")
    return best_index


def _recompute_candidate(ws: Workspace) -> SnapCandidate | None:
    state = ws.grab
    held = ws.atoms[state.held_atom]
    held_free = held.free_slots()
    if not held_free:
        state.candidate = None
        return None

    component = connected_component(ws, held.id)
    neighbors = set(adjacency(ws)[held.id])
    best = None
    for target_id in sorted(ws.atoms):
        if target_id == held.id:
            continue
        if target_id in component:
            if state.mode != "single_atom" or target_id in neighbors:
                continue
        target = ws.atoms[target_id]
        target_free = target.free_slots()
        if not target_free:
            continue
        distance = float(np.linalg.norm(target.position - held.position))
        if distance < 1e-9:
            continue  # coincident centers cannot form a finite bond
        if distance > snap_threshold(held.element, target.element):
            continue
        key = (distance, target_id, target_free[0].index)
        if best is None or key < best:
            best = key

    if best is None:
        state.candidate = None
        return None
    distance, target_id, target_slot = best
    state.candidate = SnapCandidate(
        held_slot=SlotRef(held.id, held_free[0].index),
        target_slot=SlotRef(target_id, target_slot),
        distance=distance,
    )
    return state.candidate


def _create_bond(ws: Workspace, end_a: SlotRef, end_b: SlotRef, rest_length: float) -> int:
    bond_id = ws.next_bond_id
    ws.next_bond_id += 1
    bond = make_bond(bond_id, end_a.key(), end_b.key(), rest_length)
    ws.bonds[bond_id] = bond
    ws.atoms[end_a.atom_id].slots[end_a.slot_index].occupied_by = bond_id
    ws.atoms[end_b.atom_id].slots[end_b.slot_index].occupied_by = bond_id
    return bond_id


def _side_of(ws: Workspace, start: int, excluded_bond: int) -> set[int]:
    """Atoms reachable from start without crossing the excluded bond."""
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for bond in ws.bonds.values():
            if bond.id == excluded_bond or current not in bond.atom_ids:
                continue
            other = bond.other(current)
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return seen


def _apply_rigid(ws: Workspace, atom_ids, rotation, pivot, translation) -> None:
    rotation = quat.normalize(rotation)
    for aid in atom_ids:
        atom = ws.atoms[aid]
        atom.position = quat.rotate(rotation, atom.position - pivot) + pivot + translation
        atom.orientation = quat.normalize(quat.multiply(rotation, atom.orientation))
