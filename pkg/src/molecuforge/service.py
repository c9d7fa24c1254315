"""Command protocol: the engine's frontend boundary.

One JSON object per line. Requests carry a client id, a command name,
and an args map; each command's event lines (if any) are written first
and the response line last, so synchronous clients simply read until
they see their id. Every mutating command is atomic: on error the
workspace is left untouched.
"""

from __future__ import annotations

import json
import math
import os
import socketserver
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import construction, forcefield, xmlio
from .errors import BadArguments, BindError, EngineError, FileNotFound, ParseError, UnknownCommand
from .forcefield import ForceFieldParams
from .model import Workspace, validate

DEFAULT_ADDR = "127.0.0.1:8607"
ADDR_ENV_VAR = "MOLECUFORGE_ADDR"

_MUTATING = {
    "create_atom",
    "delete_atom",
    "grab",
    "drag",
    "release",
    "form_bond",
    "set_anchor",
    "rotate_about_bond",
    "move_molecule",
    "relax",
    "load",
    "load_snapshot",
}


def _require(args: dict, allowed: dict) -> dict:
    """Check arg names and coerce values; ``allowed`` maps name -> (kind, default).

    Kinds: 'int', 'float', 'str', 'vec3', 'quat', 'int_list', 'int_or_none'.
    A default of ... marks the argument required.
    """
    unknown = [k for k in args if k not in allowed]
    if unknown:
        raise BadArguments(f"unknown argument(s) {unknown}")
    out = {}
    for name, (kind, default) in allowed.items():
        if name not in args:
            if default is ...:
                raise BadArguments(f"missing argument {name!r}")
            out[name] = default
            continue
        value = args[name]
        try:
            if kind == "int":
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
                out[name] = value
            elif kind == "float":
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise TypeError
                out[name] = float(value)
            elif kind == "str":
                if not isinstance(value, str):
                    raise TypeError
                out[name] = value
            elif kind == "vec3":
                vec = [float(c) for c in value]
                if len(vec) != 3:
                    raise TypeError
                out[name] = np.array(vec)
            elif kind == "quat":
                q = [float(c) for c in value]
                if len(q) != 4:
                    raise TypeError
                if abs(math.sqrt(sum(c * c for c in q)) - 1.0) > 1e-6:
                    raise BadArguments(f"argument {name!r} is not a unit quaternion")
                out[name] = np.array(q)
            elif kind == "int_list":
                if not isinstance(value, list) or any(
                    isinstance(v, bool) or not isinstance(v, int) for v in value
                ):
                    raise TypeError
                out[name] = list(value)
            elif kind == "int_or_none":
                if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
                    raise TypeError
                out[name] = value
            else:  # pragma: no cover - table typo guard
                raise AssertionError(kind)
        except BadArguments:
            raise
        except (TypeError, ValueError):
            raise BadArguments(f"argument {name!r} has the wrong type") from None
    return out


def _candidate_json(candidate) -> dict | None:
    if candidate is None:
        return None
    return {
        "held": {"atom": candidate.held_slot.atom_id, "slot": candidate.held_slot.slot_index},
        "target": {
            "atom": candidate.target_slot.atom_id,
            "slot": candidate.target_slot.slot_index,
        },
        "distance": candidate.distance,
    }


def _report_json(report) -> dict:
    return {
        "iterations": report.iterations,
        "initial_energy": report.initial_energy,
        "final_energy": report.final_energy,
        "final_gradient_norm": report.final_gradient_norm,
        "converged": report.converged,
    }


def _angles_json(readout) -> list[dict]:
    return [{"a": r.a, "b": r.b, "degrees": r.degrees} for r in readout]


class Session:
    """A private workspace driven by protocol commands."""

    def __init__(self, base_dir: str | Path | None = None):
        self.ws = Workspace()
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        self.closed = False
        self._pending_relax = None

    # -- dispatch -----------------------------------------------------------

    def execute(self, request: dict) -> tuple[dict, list[dict]]:
        """Run one request; returns (response, events)."""
        request_id = request.get("id") if isinstance(request, dict) else None
        events: list[dict] = []
        backup = None
        self._pending_relax = None
        pre_anchor = self.ws.anchor
        pre_candidate = self._candidate_key()
        try:
            if not isinstance(request, dict):
                raise BadArguments("request must be an object")
            extra = [k for k in request if k not in ("id", "cmd", "args")]
            if extra:
                raise BadArguments(f"unknown request field(s) {extra}")
            cmd = request.get("cmd")
            if not isinstance(cmd, str):
                raise BadArguments("request needs a string 'cmd'")
            handler = getattr(self, f"_cmd_{cmd}", None)
            if handler is None or cmd.startswith("_"):
                raise UnknownCommand(f"unknown command {cmd!r}")
            args = request.get("args", {})
            if not isinstance(args, dict):
                raise BadArguments("'args' must be an object")
            if cmd in _MUTATING:
                backup = self.ws.clone()
            result = handler(args)
        except EngineError as exc:
            if backup is not None:
                self.ws = backup
            self._pending_relax = None
            return (
                {"id": request_id, "ok": False, "error": {"code": exc.code, "message": str(exc)}},
                events,
            )

        post_candidate = self._candidate_key()
        if post_candidate != pre_candidate:
            if post_candidate is None:
                events.append({"event": "snap_cleared", "payload": {}})
            else:
                events.append(
                    {
                        "event": "snap_candidate",
                        "payload": _candidate_json(self.ws.grab.candidate),
                    }
                )
        if self.ws.anchor != pre_anchor:
            events.append({"event": "anchor_changed", "payload": {"atom": self.ws.anchor}})
        if self._pending_relax is not None:
            events.append({"event": "relax_done", "payload": _report_json(self._pending_relax)})
            self._pending_relax = None
        return {"id": request_id, "ok": True, "result": result}, events

    def _candidate_key(self):
        grab = self.ws.grab
        if grab is None or grab.candidate is None:
            return None
        return (
            grab.candidate.held_slot.atom_id,
            grab.candidate.held_slot.slot_index,
            grab.candidate.target_slot.atom_id,
            grab.candidate.target_slot.slot_index,
        )

    def _resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def _params(self, spec: dict) -> ForceFieldParams:
        params = ForceFieldParams()
        for name in ("k_bond", "k_angle", "gradient_tolerance", "initial_step"):
            if spec.get(name) is not None:
                setattr(params, name, spec[name])
        if spec.get("max_iterations") is not None:
            params.max_iterations = spec["max_iterations"]
        return params

    # -- commands -------------------------------------------------------------

    def _cmd_create_atom(self, args):
        a = _require(
            args, {"element": ("str", ...), "x": ("float", ...), "y": ("float", ...), "z": ("float", ...)}
        )
        atom_id = construction.create_atom(self.ws, a["element"], (a["x"], a["y"], a["z"]))
        return {"atom": atom_id}

    def _cmd_delete_atom(self, args):
        a = _require(args, {"atom": ("int", ...)})
        removed = construction.delete_atom(self.ws, a["atom"])
        return {"removed_bonds": removed}

    def _cmd_grab(self, args):
        a = _require(args, {"atom": ("int", ...)})
        state = construction.grab(self.ws, a["atom"])
        return {"mode": state.mode, "candidate": _candidate_json(state.candidate)}

    def _cmd_drag(self, args):
        a = _require(args, {"x": ("float", ...), "y": ("float", ...), "z": ("float", ...)})
        candidate = construction.drag(self.ws, (a["x"], a["y"], a["z"]))
        return {"candidate": _candidate_json(candidate)}

    def _cmd_release(self, args):
        _require(args, {})
        outcome = construction.release(self.ws)
        self._pending_relax = outcome.relax_report
        return {"bond": outcome.bond_id}

    def _cmd_form_bond(self, args):
        a = _require(args, {"a": ("int", ...), "b": ("int", ...)})
        bond_id = construction.form_bond(self.ws, a["a"], a["b"])
        return {"bond": bond_id}

    def _cmd_set_anchor(self, args):
        a = _require(args, {"atom": ("int_or_none", None)})
        readout = construction.set_anchor(self.ws, a["atom"])
        return {"anchor": self.ws.anchor, "angles": _angles_json(readout)}

    def _cmd_rotate_about_bond(self, args):
        a = _require(
            args,
            {"bond": ("int", ...), "moving_side": ("int", ...), "degrees": ("float", ...)},
        )
        moved = construction.rotate_about_bond(
            self.ws, a["bond"], a["moving_side"], math.radians(a["degrees"])
        )
        return {"moved": moved}

    def _cmd_move_molecule(self, args):
        a = _require(
            args,
            {
                "atom": ("int", ...),
                "translation": ("vec3", np.zeros(3)),
                "rotation": ("quat", np.array([1.0, 0.0, 0.0, 0.0])),
                "pivot": ("vec3", np.zeros(3)),
            },
        )
        moved = construction.move_molecule(
            self.ws, a["atom"], a["translation"], a["rotation"], a["pivot"]
        )
        return {"moved": moved}

    def _cmd_relax(self, args):
        a = _require(
            args,
            {
                "fixed": ("int_list", None),
                "k_bond": ("float", None),
                "k_angle": ("float", None),
                "max_iterations": ("int", None),
                "gradient_tolerance": ("float", None),
                "initial_step": ("float", None),
            },
        )
        fixed = a["fixed"]
        if fixed is None:
            fixed = [self.ws.anchor] if self.ws.anchor is not None else []
        report = forcefield.relax(self.ws, self._params(a), fixed)
        return _report_json(report)

    def _cmd_energy(self, args):
        a = _require(args, {"k_bond": ("float", None), "k_angle": ("float", None)})
        return {"energy": forcefield.energy(self.ws, self._params(a))}

    def _cmd_validate(self, args):
        _require(args, {})
        return {"violations": [str(v) for v in validate(self.ws)]}

    def _cmd_save(self, args):
        a = _require(args, {"path": ("str", ...)})
        data = xmlio.save_xml(self.ws)
        target = self._resolve(a["path"])
        try:
            target.write_bytes(data)
        except OSError as exc:
            raise FileNotFound(f"cannot write {a['path']!r}: {exc}") from None
        return {"path": a["path"], "bytes": len(data)}

    def _cmd_load(self, args):
        a = _require(args, {"path": ("str", ...)})
        target = self._resolve(a["path"])
        try:
            data = target.read_bytes()
        except OSError as exc:
            raise FileNotFound(f"cannot read {a['path']!r}: {exc}") from None
        self.ws = xmlio.load_xml(data)
        return {"atoms": len(self.ws.atoms), "bonds": len(self.ws.bonds)}

    def _cmd_load_snapshot(self, args):
        a = _require(args, {"xml": ("str", ...)})
        self.ws = xmlio.load_xml(a["xml"].encode("utf-8"))
        return {"atoms": len(self.ws.atoms), "bonds": len(self.ws.bonds)}

    def _cmd_export_xyz(self, args):
        a = _require(args, {"path": ("str", None)})
        data = xmlio.export_xyz(self.ws)
        if a["path"] is not None:
            target = self._resolve(a["path"])
            try:
                target.write_bytes(data)
            except OSError as exc:
                raise FileNotFound(f"cannot write {a['path']!r}: {exc}") from None
        return {"xyz": data.decode("utf-8")}

    def _cmd_snapshot(self, args):
        _require(args, {})
        return {"xml": xmlio.save_xml(self.ws).decode("utf-8")}

    def _cmd_list(self, args):
        _require(args, {})
        atoms = []
        for aid in sorted(self.ws.atoms):
            atom = self.ws.atoms[aid]
            atoms.append(
                {
                    "id": aid,
                    "element": atom.element.symbol,
                    "x": atom.position[0],
                    "y": atom.position[1],
                    "z": atom.position[2],
                    "color": list(atom.element.display_color),
                    "radius": atom.element.display_radius,
                    "free_slots": len(atom.free_slots()),
                }
            )
        bonds = []
        for bid in sorted(self.ws.bonds):
            bond = self.ws.bonds[bid]
            a, b = bond.atom_ids
            bonds.append({"id": bid, "a": a, "b": b, "rest": bond.rest_length})
        angles = []
        if self.ws.anchor is not None:
            angles = _angles_json(construction.angle_readout(self.ws, self.ws.anchor))
        grab = None
        if self.ws.grab is not None:
            grab = {"held": self.ws.grab.held_atom, "mode": self.ws.grab.mode}
        return {
            "atoms": atoms,
            "bonds": bonds,
            "anchor": self.ws.anchor,
            "anchor_angles": angles,
            "grab": grab,
        }

    def _cmd_shutdown(self, args):
        _require(args, {})
        self.closed = True
        return {"stopping": True}


# -- scripts -------------------------------------------------------------------

@dataclass
class ScriptLine:
    line_no: int
    request: dict
    response: dict
    expected_error: str | None
    status: str  # "ok" | "expected_error" | "error"


@dataclass
class ScriptReport:
    lines: list[ScriptLine] = field(default_factory=list)
    ok: bool = True
    final_violations: list[str] = field(default_factory=list)
    session: Session | None = None


def run_script(path: str | Path) -> ScriptReport:
    """Execute a one-request-per-line script file against a fresh session.

    Ids are assigned from line numbers. A line may carry an
    ``expect_error`` code; any other error stops the run. Relative
    save/load paths resolve against the script's own directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileNotFound(f"cannot read script {str(path)!r}: {exc}") from None

    session = Session(base_dir=path.parent)
    report = ScriptReport(session=session)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            envelope = json.loads(raw)
        except json.JSONDecodeError as exc:
            report.lines.append(
                ScriptLine(
                    line_no,
                    {"raw": raw},
                    {
                        "id": line_no,
                        "ok": False,
                        "error": {"code": "ParseError", "message": f"line {line_no}: {exc}"},
                    },
                    None,
                    "error",
                )
            )
            report.ok = False
            break
        if not isinstance(envelope, dict):
            envelope = {}
        expected = envelope.pop("expect_error", None)
        envelope["id"] = line_no
        response, _events = session.execute(envelope)
        if response["ok"]:
            status = "ok"
            if expected is not None:
                response = {
                    "id": line_no,
                    "ok": False,
                    "error": {
                        "code": "BadArguments",
                        "message": f"line {line_no}: expected error {expected!r} but succeeded",
                    },
                }
                status = "error"
        else:
            status = "expected_error" if response["error"]["code"] == expected else "error"
        report.lines.append(ScriptLine(line_no, envelope, response, expected, status))
        if status == "error":
            report.ok = False
            break

    report.final_violations = [str(v) for v in validate(session.ws)]
    if report.final_violations:
        report.ok = False
    return report


# -- serving -------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _session_loop(session: Session, read_lines, write_line) -> None:
    """Shared request loop: events first, then the response, one JSON per line."""
    for raw in read_lines:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        if not raw.strip():
            continue
        try:
            request = json.loads(raw)
        except json.JSONDecodeError as exc:
            write_line(
                _dumps(
                    {
                        "id": None,
                        "ok": False,
                        "error": {"code": "ParseError", "message": f"bad JSON line: {exc}"},
                    }
                )
            )
            continue
        response, events = session.execute(request)
        for event in events:
            write_line(_dumps(event))
        write_line(_dumps(response))
        if session.closed:
            break


def parse_address(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise BindError(f"address {addr!r} is not host:port")
    return host, int(port)


class _ProtocolServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class _ProtocolHandler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session()
        try:
            _session_loop(
                session,
                self.rfile,
                lambda line: (self.wfile.write(line.encode("utf-8") + b"\n"), self.wfile.flush()),
            )
        except (BrokenPipeError, ConnectionResetError):
            pass


def make_server(addr: str = DEFAULT_ADDR) -> socketserver.ThreadingTCPServer:
    """Bind a threading protocol server; caller runs serve_forever/shutdown."""
    host, port = parse_address(addr)
    try:
        return _ProtocolServer((host, port), _ProtocolHandler)
    except OSError as exc:
        raise BindError(f"cannot bind {addr!r}: {exc}") from None


def serve_stdio(stdin=None, stdout=None) -> None:
    """Single session over standard input/output."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = Session()

    def write_line(line: str) -> None:
        stdout.write(line + "\n")
        stdout.flush()

    _session_loop(session, stdin, write_line)


def default_address() -> str:
    return os.environ.get(ADDR_ENV_VAR, DEFAULT_ADDR)
