"""Persistence round trip: save a molecule as version-1 XML, reload it,
check the bytes are stable, and export XYZ for external viewers.
"""

import tempfile
from pathlib import Path

import molecuforge as mf

ws = mf.new_workspace()
c = mf.create_atom(ws, "C", (0, 0, 0))
o = mf.create_atom(ws, "O", (3, 0, 0))
mf.form_bond(ws, c, o)
for i in range(3):
    h = mf.create_atom(ws, "H", (2.0 + i, 2.0, 0.0))
    mf.form_bond(ws, c, h)

document = mf.save_xml(ws)
print(document.decode())

reloaded = mf.load_xml(document)
print(f"reload is byte-stable: {mf.save_xml(reloaded) == document}")
print(f"violations after load: {mf.validate(reloaded) or 'none'}")

with tempfile.TemporaryDirectory() as scratch:
    target = Path(scratch) / "methanol_skeleton.xml"
    target.write_bytes(document)
    print(f"wrote {target.name}, {target.stat().st_size} bytes")

print("\nXYZ export:")
print(mf.export_xyz(ws).decode())
