"""Engine error hierarchy.

Every error carries a stable ``code`` (the class name) that is passed
through the command protocol verbatim, so frontends can match on it.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- lookups ---------------------------------------------------------------

class UnknownElement(EngineError):
    """Element symbol is not in the shipped table."""


class NoSuchAtom(EngineError):
    """Atom id does not resolve to a live atom."""


class NoSuchBond(EngineError):
    """Bond id does not resolve to a live bond."""


class NoSuchSlot(EngineError):
    """Slot index is out of range for the atom."""


class UnsupportedValency(EngineError):
    """No vacancy preset exists for this valency."""


# -- geometry --------------------------------------------------------------

class NotBonded(EngineError):
    """The two atoms are not joined by a bond."""


class DegeneratePositions(EngineError):
    """Positions too close or collinear for the requested measurement."""


class SlotOccupied(EngineError):
    """The vacancy slot already holds a bond."""


class SameComponent(EngineError):
    """Both atoms belong to the same connected component."""


# -- construction ----------------------------------------------------------

class AtomGrabbed(EngineError):
    """The atom is currently held and cannot be modified."""


class AlreadyGrabbing(EngineError):
    """A grab is already active on this workspace."""


class AnchorGrabbed(EngineError):
    """The frozen anchor atom cannot be grabbed."""


class NoActiveGrab(EngineError):
    """No grab is active on this workspace."""


class NoFreeSlot(EngineError):
    """The atom has no unoccupied vacancy slot."""


class AlreadyBonded(EngineError):
    """The two atoms are already joined by a bond."""


class SelfBond(EngineError):
    """An atom cannot bond to itself."""


class BondInCycle(EngineError):
    """The bond lies on a cycle, so the two sides do not separate."""


class NotAnEndpoint(EngineError):
    """The atom is not an endpoint of the bond."""


# -- persistence -----------------------------------------------------------

class InvalidWorkspace(EngineError):
    """The workspace violates a structural invariant."""


class ParseError(EngineError):
    """The document is not well-formed XML (or JSON, on the wire)."""


class SchemaError(EngineError):
    """Well-formed XML that does not match the version-1 schema."""


class ConsistencyError(EngineError):
    """Schema-valid document describing an invariant-violating workspace."""


# -- protocol --------------------------------------------------------------

class UnknownCommand(EngineError):
    """Command name is not in the dispatch table."""


class BadArguments(EngineError):
    """Command arguments are missing, extra, or of the wrong type."""


class FileNotFound(EngineError):
    """Named file does not exist or cannot be read."""


class BindError(EngineError):
    """The serve endpoint cannot be bound."""
