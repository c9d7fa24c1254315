"""Drive the engine exactly like a frontend would: JSON requests in,
responses and unprompted events out.

The same envelope works over a socket (molecuforge serve), stdio
(molecuforge serve --stdio), or script files (molecuforge run).
"""

import json

import molecuforge as mf

session = mf.Session()

requests = [
    {"id": 1, "cmd": "create_atom", "args": {"element": "C", "x": 0, "y": 0, "z": 0}},
    {"id": 2, "cmd": "create_atom", "args": {"element": "C", "x": 6, "y": 0, "z": 0}},
    {"id": 3, "cmd": "grab", "args": {"atom": 2}},
    {"id": 4, "cmd": "drag", "args": {"x": 2.0, "y": 0, "z": 0}},
    {"id": 5, "cmd": "release", "args": {}},
    {"id": 6, "cmd": "set_anchor", "args": {"atom": 1}},
    {"id": 7, "cmd": "list", "args": {}},
    {"id": 8, "cmd": "snapshot", "args": {}},
]

for request in requests:
    response, events = session.execute(request)
    print(f"> {json.dumps(request)}")
    for event in events:
        print(f"! {json.dumps(event)}")
    body = json.dumps(response)
    print(f"< {body if len(body) < 120 else body[:117] + '...'}")
    print()
