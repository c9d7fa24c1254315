"""Browser bridge: static UI assets over HTTP plus a WebSocket endpoint
at /ws carrying the same newline-delimited command protocol.

The WebSocket side is a minimal RFC 6455 server (text frames, client
masking, ping/pong, close); each connection owns one protocol session.
"""

from __future__ import annotations

import base64
import hashlib
import json
import struct
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import BindError
from .service import Session, parse_address

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_OP_CONT = 0x0
_OP_TEXT = 0x1
_OP_BINARY = 0x2
_OP_CLOSE = 0x8
_OP_PING = 0x9
_OP_PONG = 0xA


def _accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _read_exact(rfile, count: int) -> bytes:
    data = b""
    while len(data) < count:
        chunk = rfile.read(count - len(data))
        if not chunk:
            raise ConnectionError("websocket stream ended mid-frame")
        data += chunk
    return data


def read_frame(rfile) -> tuple[int, bool, bytes]:
    """One frame: (opcode, fin, unmasked payload)."""
    head = _read_exact(rfile, 2)
    fin = bool(head[0] & 0x80)
    opcode = head[0] & 0x0F
    masked = bool(head[1] & 0x80)
    length = head[1] & 0x7F
    if length == 126:
        length = struct.unpack(">H", _read_exact(rfile, 2))[0]
    elif length == 127:
        length = struct.unpack(">Q", _read_exact(rfile, 8))[0]
    mask = _read_exact(rfile, 4) if masked else b"\x00" * 4
    payload = bytearray(_read_exact(rfile, length))
    if masked:
        for i in range(length):
            payload[i] ^= mask[i % 4]
    return opcode, fin, bytes(payload)


def make_frame(opcode: int, payload: bytes) -> bytes:
    head = bytes([0x80 | opcode])
    length = len(payload)
    if length < 126:
        head += bytes([length])
    elif length < 1 << 16:
        head += bytes([126]) + struct.pack(">H", length)
    else:
        head += bytes([127]) + struct.pack(">Q", length)
    return head + payload


class UIRequestHandler(SimpleHTTPRequestHandler):
    """Static files from the UI directory; /ws upgrades to the protocol."""

    server_version = "molecuforge"

    def __init__(self, *args, directory=None, **kwargs):
        super().__init__(*args, directory=directory, **kwargs)

    def log_message(self, format, *args):  # quiet by default
        pass

    def do_GET(self):
        if self.path == "/ws":
            self._serve_websocket()
        else:
            super().do_GET()

    def _serve_websocket(self):
        key = self.headers.get("Sec-WebSocket-Key")
        if self.headers.get("Upgrade", "").lower() != "websocket" or not key:
            self.send_error(400, "expected a websocket upgrade")
            return
        self.send_response_only(101, "Switching Protocols")
        self.send_header("Upgrade", "websocket")
        self.send_header("Connection", "Upgrade")
        self.send_header("Sec-WebSocket-Accept", _accept_key(key))
        self.end_headers()
        self.close_connection = True
        self._pump_session()

    def _pump_session(self):
        session = Session()
        buffer = b""
        message = b""

        def send_line(line: str) -> None:
            self.wfile.write(make_frame(_OP_TEXT, (line + "\n").encode("utf-8")))
            self.wfile.flush()

        try:
            while not session.closed:
                opcode, fin, payload = read_frame(self.rfile)
                if opcode == _OP_CLOSE:
                    self.wfile.write(make_frame(_OP_CLOSE, payload[:2]))
                    self.wfile.flush()
                    return
                if opcode == _OP_PING:
                    self.wfile.write(make_frame(_OP_PONG, payload))
                    self.wfile.flush()
                    continue
                if opcode not in (_OP_TEXT, _OP_BINARY, _OP_CONT):
                    continue
                message += payload
                if not fin:
                    continue
                buffer += message
                message = b""
                while b"\n" in buffer:
                    raw, buffer = buffer.split(b"\n", 1)
                    if not raw.strip():
                        continue
                    try:
                        request = json.loads(raw.decode("utf-8"))
                    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                        send_line(json.dumps({
                            "id": None,
                            "ok": False,
                            "error": {"code": "ParseError", "message": f"bad JSON line: {exc}"},
                        }, separators=(",", ":")))
                        continue
                    response, events = session.execute(request)
                    for event in events:
                        send_line(json.dumps(event, separators=(",", ":")))
                    send_line(json.dumps(response, separators=(",", ":")))
        except (ConnectionError, BrokenPipeError, OSError):
            pass


def make_ui_server(addr: str, ui_dir: str | None = None) -> ThreadingHTTPServer:
    """HTTP server with the UI at / and the protocol websocket at /ws."""
    host, port = parse_address(addr)
    directory = str(Path(ui_dir) if ui_dir else Path.cwd() / "frontend" / "dist")

    class Handler(UIRequestHandler):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, directory=directory, **kwargs)

    try:
        server = ThreadingHTTPServer((host, port), Handler)
    except OSError as exc:
        raise BindError(f"cannot bind {addr!r}: {exc}") from None
    server.daemon_threads = True
    return server
