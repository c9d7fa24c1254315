"""Valency-constrained atom/bond graph and its structural invariants.

A workspace holds atoms keyed by id, bonds keyed by id, the optional
edit-mode anchor, and the optional grab state. Every public operation in
the package is required to leave ``validate`` empty; validate itself
reports violations as data rather than raising.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .elements import ElementSpec
from .errors import NoSuchAtom

# Snap rule: two atoms are bondable by drag once their center distance
# drops below this multiple of the sum of their covalent radii.
SNAP_RADIUS_FACTOR = 1.5

_UNIT_TOL = 1e-9


@dataclass
class VacancySlot:
    index: int
    local_direction: np.ndarray  # unit vector in the atom frame
    occupied_by: int | None = None


@dataclass
class Atom:
    id: int
    element: ElementSpec
    position: np.ndarray  # (3,) Angstrom
    orientation: np.ndarray  # unit quaternion, scalar-first
    slots: list[VacancySlot]

    def free_slots(self) -> list[VacancySlot]:
        return [s for s in self.slots if s.occupied_by is None]


@dataclass
class Bond:
    id: int
    endpoints: tuple[tuple[int, int], tuple[int, int]]  # ((atom, slot), (atom, slot)), lower atom id first
    rest_length: float

    @property
    def atom_ids(self) -> tuple[int, int]:
        return self.endpoints[0][0], self.endpoints[1][0]

    def other(self, atom_id: int) -> int:
        a, b = self.atom_ids
        return b if atom_id == a else a

    def slot_of(self, atom_id: int) -> int:
        for aid, slot in self.endpoints:
            if aid == atom_id:
                return slot
        raise KeyError(atom_id)


def make_bond(bond_id: int, a: tuple[int, int], b: tuple[int, int], rest_length: float) -> Bond:
    """Build a bond with endpoints normalized to lower-atom-id-first."""
    ends = (a, b) if a[0] < b[0] else (b, a)
    return Bond(bond_id, ends, rest_length)


@dataclass
class SlotRef:
    atom_id: int
    slot_index: int

    def key(self) -> tuple[int, int]:
        return self.atom_id, self.slot_index


@dataclass
class SnapCandidate:
    held_slot: SlotRef
    target_slot: SlotRef
    distance: float


@dataclass
class GrabState:
    held_atom: int
    mode: str  # "molecule" or "single_atom"
    candidate: SnapCandidate | None = None


@dataclass
class Workspace:
    atoms: dict[int, Atom] = field(default_factory=dict)
    bonds: dict[int, Bond] = field(default_factory=dict)
    anchor: int | None = None
    grab: GrabState | None = None
    next_atom_id: int = 1
    next_bond_id: int = 1

    def atom(self, atom_id: int) -> Atom:
        try:
            return self.atoms[atom_id]
        except KeyError:
            raise NoSuchAtom(f"no atom with id {atom_id}") from None

    def clone(self) -> Workspace:
        atoms = {
            aid: Atom(
                a.id,
                a.element,
                a.position.copy(),
                a.orientation.copy(),
                [VacancySlot(s.index, s.local_direction.copy(), s.occupied_by) for s in a.slots],
            )
            for aid, a in self.atoms.items()
        }
        bonds = {bid: Bond(b.id, b.endpoints, b.rest_length) for bid, b in self.bonds.items()}
        grab = None
        if self.grab is not None:
            cand = self.grab.candidate
            if cand is not None:
                cand = SnapCandidate(
                    SlotRef(*cand.held_slot.key()),
                    SlotRef(*cand.target_slot.key()),
                    cand.distance,
                )
            grab = GrabState(self.grab.held_atom, self.grab.mode, cand)
        return Workspace(atoms, bonds, self.anchor, grab, self.next_atom_id, self.next_bond_id)


def new_workspace() -> Workspace:
    return Workspace()


# -- graph queries ----------------------------------------------------------

def adjacency(ws: Workspace) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {aid: [] for aid in ws.atoms}
    for bond in ws.bonds.values():
        a, b = bond.atom_ids
        adj[a].append(b)
        adj[b].append(a)
    return adj


def bonds_at(ws: Workspace, atom_id: int) -> list[Bond]:
    return [b for b in ws.bonds.values() if atom_id in b.atom_ids]


def degree(ws: Workspace, atom_id: int) -> int:
    return sum(1 for b in ws.bonds.values() if atom_id in b.atom_ids)


def find_bond(ws: Workspace, a: int, b: int) -> Bond | None:
    for bond in ws.bonds.values():
        if {a, b} == set(bond.atom_ids):
            return bond
    return None


def are_bonded(ws: Workspace, a: int, b: int) -> bool:
    return find_bond(ws, a, b) is not None


def connected_component(ws: Workspace, atom_id: int) -> set[int]:
    """All atom ids reachable from atom_id via bonds, including itself."""
    ws.atom(atom_id)
    adj = adjacency(ws)
    seen = {atom_id}
    queue = deque([atom_id])
    while queue:
        current = queue.popleft()
        for neighbor in adj[current]:
            if neighbor not in seen:
                seen.add(neighbor)
                queue.append(neighbor)
    return seen


def free_slot_count(ws: Workspace, atom_id: int) -> int:
    return len(ws.atom(atom_id).free_slots())


# -- validation ---------------------------------------------------------------

@dataclass
class Violation:
    entity: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule}: {self.message}"


def validate(ws: Workspace) -> list[Violation]:
    """Check every structural invariant; empty list means the workspace is sound."""
    out: list[Violation] = []

    def bad(entity: str, rule: str, message: str) -> None:
        out.append(Violation(entity, rule, message))

    for aid, atom in ws.atoms.items():
        ent = f"atom {aid}"
        if atom.id != aid:
            bad(ent, "id-key", f"keyed {aid} but carries id {atom.id}")
        if atom.element.valency < 1 or atom.element.covalent_radius <= 0:
            bad(ent, "element-spec", f"bad element entry {atom.element.symbol!r}")
        if abs(np.linalg.norm(atom.orientation) - 1.0) > _UNIT_TOL:
            bad(ent, "orientation-unit", f"orientation norm {np.linalg.norm(atom.orientation)!r}")
        if len(atom.slots) != atom.element.valency:
            bad(ent, "slot-count", f"{len(atom.slots)} slots for valency {atom.element.valency}")
        for i, slot in enumerate(atom.slots):
            if slot.index != i:
                bad(ent, "slot-index", f"slot at position {i} carries index {slot.index}")
            if abs(np.linalg.norm(slot.local_direction) - 1.0) > _UNIT_TOL:
                bad(ent, "slot-direction-unit", f"slot {i} direction not unit")
        for i in range(len(atom.slots)):
            for j in range(i + 1, len(atom.slots)):
                d = atom.slots[i].local_direction - atom.slots[j].local_direction
                if np.linalg.norm(d) <= _UNIT_TOL:
                    bad(ent, "slot-directions-distinct", f"slots {i} and {j} coincide")

    pair_seen: dict[tuple[int, int], int] = {}
    for bid, bond in ws.bonds.items():
        ent = f"bond {bid}"
        if bond.id != bid:
            bad(ent, "id-key", f"keyed {bid} but carries id {bond.id}")
        if bond.rest_length <= 0:
            bad(ent, "rest-length-positive", f"rest length {bond.rest_length}")
        ids = bond.atom_ids
        if ids[0] == ids[1]:
            bad(ent, "no-self-loop", f"both endpoints are atom {ids[0]}")
            continue
        missing = [aid for aid in ids if aid not in ws.atoms]
        if missing:
            bad(ent, "endpoint-exists", f"dangling atom id(s) {missing}")
            continue
        pair = (min(ids), max(ids))
        if pair in pair_seen:
            bad(ent, "one-bond-per-pair", f"duplicate of bond {pair_seen[pair]} between {pair}")
        else:
            pair_seen[pair] = bid
        for aid, slot_index in bond.endpoints:
            atom = ws.atoms[aid]
            if not 0 <= slot_index < len(atom.slots):
                bad(ent, "slot-in-range", f"slot {slot_index} out of range on atom {aid}")
            elif atom.slots[slot_index].occupied_by != bid:
                bad(ent, "slot-occupancy", f"atom {aid} slot {slot_index} does not point back")

    for aid, atom in ws.atoms.items():
        ent = f"atom {aid}"
        occupied = [s for s in atom.slots if s.occupied_by is not None]
        deg = degree(ws, aid)
        if len(occupied) != deg:
            bad(ent, "occupancy-degree", f"{len(occupied)} occupied slots but degree {deg}")
        for slot in occupied:
            bond = ws.bonds.get(slot.occupied_by)
            if bond is None:
                bad(ent, "occupancy-live", f"slot {slot.index} names dead bond {slot.occupied_by}")
            elif (aid, slot.index) not in bond.endpoints:
                bad(ent, "occupancy-mutual", f"slot {slot.index} names bond {bond.id} which disagrees")

    if ws.atoms and ws.next_atom_id <= max(ws.atoms):
        bad("workspace", "atom-counter", f"next_atom_id {ws.next_atom_id} not past {max(ws.atoms)}")
    if ws.bonds and ws.next_bond_id <= max(ws.bonds):
        bad("workspace", "bond-counter", f"next_bond_id {ws.next_bond_id} not past {max(ws.bonds)}")
    if ws.anchor is not None and ws.anchor not in ws.atoms:
        bad("workspace", "anchor-live", f"anchor {ws.anchor} is not a live atom")

    if ws.grab is not None:
        grab = ws.grab
        if grab.held_atom not in ws.atoms:
            bad("grab", "held-live", f"held atom {grab.held_atom} is not live")
        if (grab.mode == "single_atom") != (ws.anchor is not None):
            bad("grab", "mode-anchor", f"mode {grab.mode!r} with anchor {ws.anchor!r}")
        if grab.mode not in ("molecule", "single_atom"):
            bad("grab", "mode-known", f"unknown mode {grab.mode!r}")
        cand = grab.candidate
        if cand is not None:
            for label, ref in (("held", cand.held_slot), ("target", cand.target_slot)):
                atom = ws.atoms.get(ref.atom_id)
                if atom is None:
                    bad("grab", "candidate-live", f"{label} slot atom {ref.atom_id} is not live")
                elif not 0 <= ref.slot_index < len(atom.slots):
                    bad("grab", "candidate-slot", f"{label} slot {ref.slot_index} out of range")
                elif atom.slots[ref.slot_index].occupied_by is not None:
                    bad("grab", "candidate-free", f"{label} slot {ref.slot_index} is occupied")
            held = ws.atoms.get(cand.held_slot.atom_id)
            target = ws.atoms.get(cand.target_slot.atom_id)
            if held is not None and target is not None:
                limit = SNAP_RADIUS_FACTOR * (
                    held.element.covalent_radius + target.element.covalent_radius
                )
                if cand.distance > limit:
                    bad("grab", "candidate-threshold", f"distance {cand.distance} beyond {limit}")

    return out
