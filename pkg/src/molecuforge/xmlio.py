"""Workspace persistence: version-1 XML documents and XYZ export.

The writer is hand-rolled so output is canonical: atoms then bonds in
ascending id order, fixed attribute order, every number at 9
significant digits. Loading is strict; structurally broken documents
raise instead of being repaired.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from decimal import Decimal

import numpy as np

from .elements import ELEMENTS
from .errors import ConsistencyError, InvalidWorkspace, ParseError, SchemaError
from .geometry import preset_slots
from .model import Atom, Workspace, make_bond, validate

FORMAT_NAME = "molecusense"
FORMAT_VERSION = 1

_ATOM_ATTRS = ("id", "element", "x", "y", "z", "qw", "qx", "qy", "qz")
_BOND_ATTRS = ("id", "a", "slotA", "b", "slotB", "rest")

# Quaternion components are rounded to 9 significant digits on output;
# keep the reloaded norm safely inside the 1e-9 unit-norm invariant.
_NORM_BUDGET = 9e-10


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def _norm_error(values) -> float:
    return abs(math.sqrt(sum(v * v for v in values)) - 1.0)


def _quat_strings(q) -> list[str]:
    """Printable quaternion whose parsed value is unit within tolerance.

    Rounding to 9 digits can push the norm off by about 1e-9; if so,
    adjust the last printed digit of the largest component.
    """
    strings = [_fmt(c) for c in q]
    values = [float(s) for s in strings]
    if _norm_error(values) <= _NORM_BUDGET:
        return strings
    m = max(range(4), key=lambda i: abs(values[i]))
    exponent = math.floor(math.log10(abs(values[m])))
    ulp = Decimal(1).scaleb(exponent - 8)
    base = Decimal(strings[m])
    best = None
    for k in (0, 1, -1, 2, -2, 3, -3):
        candidate = float(base + k * ulp)
        trial = list(values)
        trial[m] = candidate
        err = _norm_error(trial)
        if best is None or err < best[0]:
            best = (err, candidate)
        if err <= _NORM_BUDGET:
            break
    strings[m] = _fmt(best[1])
    return strings


def save_xml(ws: Workspace) -> bytes:
    """Serialize to canonical version-1 XML; byte-identical for equal workspaces."""
    violations = validate(ws)
    if violations:
        raise InvalidWorkspace("; ".join(str(v) for v in violations))

    lines = [f'<{FORMAT_NAME} version="{FORMAT_VERSION}">', "  <atoms>"]
    for aid in sorted(ws.atoms):
        atom = ws.atoms[aid]
        x, y, z = (_fmt(c) for c in atom.position)
        qw, qx, qy, qz = _quat_strings(atom.orientation)
        lines.append(
            f'    <atom id="{aid}" element="{atom.element.symbol}" '
            f'x="{x}" y="{y}" z="{z}" qw="{qw}" qx="{qx}" qy="{qy}" qz="{qz}"/>'
        )
    lines.append("  </atoms>")
    lines.append("  <bonds>")
    for bid in sorted(ws.bonds):
        bond = ws.bonds[bid]
        (a, slot_a), (b, slot_b) = bond.endpoints
        lines.append(
            f'    <bond id="{bid}" a="{a}" slotA="{slot_a}" '
            f'b="{b}" slotB="{slot_b}" rest="{_fmt(bond.rest_length)}"/>'
        )
    lines.append("  </bonds>")
    lines.append(f"</{FORMAT_NAME}>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _require_attrs(node: ET.Element, names: tuple[str, ...]) -> dict[str, str]:
    missing = [n for n in names if n not in node.attrib]
    extra = [n for n in node.attrib if n not in names]
    if missing or extra:
        raise SchemaError(
            f"<{node.tag}> attributes: missing {missing or 'none'}, extra {extra or 'none'}"
        )
    return dict(node.attrib)


def _as_int(node_tag: str, name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"<{node_tag}> attribute {name}={raw!r} is not an integer") from None


def _as_float(node_tag: str, name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise SchemaError(f"<{node_tag}> attribute {name}={raw!r} is not a number") from None


def load_xml(data: bytes | str) -> Workspace:
    """Reconstruct a workspace from version-1 XML; never repairs faults."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from None

    if root.tag != FORMAT_NAME:
        raise SchemaError(f"root element is <{root.tag}>, expected <{FORMAT_NAME}>")
    attrs = _require_attrs(root, ("version",))
    if _as_int(root.tag, "version", attrs["version"]) != FORMAT_VERSION:
        raise SchemaError(f"unknown version {attrs['version']!r}")
    children = list(root)
    if [c.tag for c in children] != ["atoms", "bonds"]:
        raise SchemaError(
            f"expected exactly <atoms> then <bonds>, found {[c.tag for c in children]}"
        )
    atoms_node, bonds_node = children

    ws = Workspace()
    for node in atoms_node:
        if node.tag != "atom":
            raise SchemaError(f"unexpected <{node.tag}> inside <atoms>")
        a = _require_attrs(node, _ATOM_ATTRS)
        aid = _as_int("atom", "id", a["id"])
        if aid < 1:
            raise ConsistencyError(f"atom id {aid} is not positive")
        if aid in ws.atoms:
            raise ConsistencyError(f"duplicate atom id {aid}")
        element = ELEMENTS.get(a["element"])
        if element is None:
            raise ConsistencyError(f"atom {aid} has unknown element {a['element']!r}")
        position = np.array([_as_float("atom", k, a[k]) for k in ("x", "y", "z")])
        orientation = np.array([_as_float("atom", k, a[k]) for k in ("qw", "qx", "qy", "qz")])
        ws.atoms[aid] = Atom(aid, element, position, orientation, preset_slots(element))

    for node in bonds_node:
        if node.tag != "bond":
            raise SchemaError(f"unexpected <{node.tag}> inside <bonds>")
        b = _require_attrs(node, _BOND_ATTRS)
        bid = _as_int("bond", "id", b["id"])
        if bid < 1:
            raise ConsistencyError(f"bond id {bid} is not positive")
        if bid in ws.bonds:
            raise ConsistencyError(f"duplicate bond id {bid}")
        end_a = (_as_int("bond", "a", b["a"]), _as_int("bond", "slotA", b["slotA"]))
        end_b = (_as_int("bond", "b", b["b"]), _as_int("bond", "slotB", b["slotB"]))
        rest = _as_float("bond", "rest", b["rest"])
        if end_a[0] == end_b[0]:
            raise ConsistencyError(f"bond {bid} is a self-loop on atom {end_a[0]}")
        for aid, slot_index in (end_a, end_b):
            atom = ws.atoms.get(aid)
            if atom is None:
                raise ConsistencyError(f"bond {bid} names missing atom {aid}")
            if not 0 <= slot_index < len(atom.slots):
                raise ConsistencyError(f"bond {bid} names slot {slot_index} on atom {aid}")
            if atom.slots[slot_index].occupied_by is not None:
                raise ConsistencyError(
                    f"bond {bid} claims atom {aid} slot {slot_index}, already taken by "
                    f"bond {atom.slots[slot_index].occupied_by}"
                )
        ws.bonds[bid] = make_bond(bid, end_a, end_b, rest)
        ws.atoms[end_a[0]].slots[end_a[1]].occupied_by = bid
        ws.atoms[end_b[0]].slots[end_b[1]].occupied_by = bid

    ws.next_atom_id = max(ws.atoms, default=0) + 1
    ws.next_bond_id = max(ws.bonds, default=0) + 1

    violations = validate(ws)
    if violations:
        raise ConsistencyError("; ".join(str(v) for v in violations))
    return ws


def export_xyz(ws: Workspace) -> bytes:
    """Standard XYZ text: count, comment, then one 'symbol x y z' line per atom."""
    lines = [str(len(ws.atoms)), f"{FORMAT_NAME} export"]
    for aid in sorted(ws.atoms):
        atom = ws.atoms[aid]
        x, y, z = atom.position
        lines.append(f"{atom.element.symbol} {x:.6f} {y:.6f} {z:.6f}")
    return ("\n".join(lines) + "\n").encode("utf-8")
