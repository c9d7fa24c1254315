"""Build methane atom by atom and inspect the geometry the engine gives you.

Bonding docks the incoming atom onto a free vacancy slot, so a freshly
built molecule already sits at rest lengths and preset angles.
"""

import numpy as np

import molecuforge as mf

ws = mf.new_workspace()
carbon = mf.create_atom(ws, "C", (0.0, 0.0, 0.0))
print(f"created C as atom {carbon}, free slots: {mf.free_slot_count(ws, carbon)}")

for i in range(4):
    hydrogen = mf.create_atom(ws, "H", (2.0 + i, float(i), 0.0))
    bond = mf.form_bond(ws, carbon, hydrogen)
    distance = np.linalg.norm(ws.atoms[hydrogen].position - ws.atoms[carbon].position)
    print(f"bond {bond}: C-H docked at {distance:.6f} A (rest {ws.bonds[bond].rest_length})")

print("\nangles at the carbon:")
for reading in mf.angle_readout(ws, carbon):
    print(f"  H{reading.a} - C - H{reading.b}: {reading.degrees:.4f} deg")

print(f"\nspring energy: {mf.energy(ws):.2e}")
print(f"structural violations: {mf.validate(ws) or 'none'}")
