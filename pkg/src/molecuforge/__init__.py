"""molecuforge: a valency-constrained ball-and-stick molecule engine.

Atoms carry preset vacancy slots per their element's valency; bonds
consume slots and dock fragments rigidly at rest length; a harmonic
spring force field relaxes geometry around an optional frozen anchor.
Workspaces persist as version-1 XML and are driven interactively
through a newline-delimited command protocol.
"""

from .construction import (
    angle_readout,
    create_atom,
    delete_atom,
    drag,
    form_bond,
    grab,
    move_molecule,
    release,
    rotate_about_bond,
    set_anchor,
    snap_threshold,
)
from .elements import ELEMENTS, ElementSpec, element_spec
from .forcefield import ForceFieldParams, RelaxReport, energy, gradient, relax
from .geometry import (
    RigidTransform,
    SlotRef,
    bond_angle,
    dihedral_angle,
    docking_transform,
    vacancy_directions,
    world_direction,
)
from .model import (
    Atom,
    Bond,
    GrabState,
    SnapCandidate,
    Workspace,
    connected_component,
    free_slot_count,
    new_workspace,
    validate,
)
from .service import Session, run_script
from .xmlio import export_xyz, load_xml, save_xml

__version__ = "0.1.0"

__all__ = [
    "ELEMENTS",
    "Atom",
    "Bond",
    "ElementSpec",
    "ForceFieldParams",
    "GrabState",
    "RelaxReport",
    "RigidTransform",
    "Session",
    "SlotRef",
    "SnapCandidate",
    "Workspace",
    "angle_readout",
    "bond_angle",
    "connected_component",
    "create_atom",
    "delete_atom",
    "dihedral_angle",
    "docking_transform",
    "drag",
    "element_spec",
    "energy",
    "export_xyz",
    "form_bond",
    "free_slot_count",
    "grab",
    "gradient",
    "load_xml",
    "move_molecule",
    "new_workspace",
    "relax",
    "release",
    "rotate_about_bond",
    "run_script",
    "save_xml",
    "set_anchor",
    "snap_threshold",
    "vacancy_directions",
    "validate",
    "world_direction",
]
