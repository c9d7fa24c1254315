"""Command line frontend: scripting, serving, and file utilities."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import service, xmlio
from .errors import EngineError
from .forcefield import ForceFieldParams, relax
from .model import Workspace


def _write_output(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(out).write_bytes(data)


def _cmd_new(args) -> int:
    _write_output(xmlio.save_xml(Workspace()), args.out)
    return 0


def _cmd_run(args) -> int:
    report = service.run_script(args.script)
    for line in report.lines:
        request = line.request
        label = request.get("cmd", "?")
        if line.status == "ok":
            print(f"line {line.line_no}: ok {label}")
        elif line.status == "expected_error":
            print(f"line {line.line_no}: expected error {line.expected_error} from {label}")
        else:
            err = line.response["error"]
            print(f"line {line.line_no}: ERROR {err['code']}: {err['message']}")
    if report.final_violations:
        print("final validate: " + "; ".join(report.final_violations))
    else:
        print("final validate: clean")
    return 0 if report.ok else 1


def _cmd_serve(args) -> int:
    if args.stdio:
        service.serve_stdio()
        return 0
    addr = args.addr or service.default_address()
    if args.ui:
        from . import webserve

        server = webserve.make_ui_server(addr, args.ui_dir)
        host, port = server.server_address[:2]
        print(f"serving UI and protocol on http://{host}:{port}/", file=sys.stderr)
    else:
        server = service.make_server(addr)
        host, port = server.server_address[:2]
        print(f"serving protocol on {host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return 0


def _cmd_validate(args) -> int:
    data = Path(args.file).read_bytes()
    xmlio.load_xml(data)
    print(f"{args.file}: valid")
    return 0


def _cmd_relax(args) -> int:
    ws = xmlio.load_xml(Path(args.file).read_bytes())
    params = ForceFieldParams()
    if args.max_iterations is not None:
        params.max_iterations = args.max_iterations
    report = relax(ws, params, fixed=set(args.fixed))
    print(
        f"relax: iterations={report.iterations} energy={report.initial_energy:.6g}"
        f" -> {report.final_energy:.6g} |grad|={report.final_gradient_norm:.3g}"
        f" converged={report.converged}",
        file=sys.stderr,
    )
    _write_output(xmlio.save_xml(ws), args.out)
    return 0 if report.converged else 3


def _cmd_convert(args) -> int:
    ws = xmlio.load_xml(Path(args.file).read_bytes())
    if args.to != "xyz":
        print(f"unsupported target format {args.to!r}", file=sys.stderr)
        return 2
    _write_output(xmlio.export_xyz(ws), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molecuforge",
        description="Ball-and-stick molecule construction engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("new", help="write an empty workspace document")
    p.add_argument("out", nargs="?", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_new)

    p = sub.add_parser("run", help="run a one-request-per-line script")
    p.add_argument("script")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("serve", help="serve the command protocol")
    p.add_argument("addr", nargs="?", default=None, help=f"host:port (default ${service.ADDR_ENV_VAR} or {service.DEFAULT_ADDR})")
    p.add_argument("--stdio", action="store_true", help="single session on stdin/stdout")
    p.add_argument("--ui", action="store_true", help="also serve the browser UI over HTTP")
    p.add_argument("--ui-dir", default=None, help="directory of built UI assets")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("validate", help="check a workspace document")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("relax", help="minimize a document's spring energy")
    p.add_argument("file")
    p.add_argument("--fixed", type=int, action="append", default=[], help="atom id to hold still (repeatable)")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_relax)

    p = sub.add_parser("convert", help="convert a document to another format")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=["xyz"])
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
