"""The interactive construction flow: grab an atom, drag it around, watch
the snap candidate appear once the distance threshold is crossed, and
release to form the bond.
"""

import numpy as np

import molecuforge as mf

ws = mf.new_workspace()
a = mf.create_atom(ws, "C", (0.0, 0.0, 0.0))
b = mf.create_atom(ws, "C", (8.0, 0.0, 0.0))

threshold = mf.snap_threshold(ws.atoms[a].element, ws.atoms[b].element)
print(f"snap threshold for C-C: {threshold:.2f} A")

state = mf.grab(ws, b)
print(f"grabbed atom {b} in {state.mode} mode")

for x in (5.0, 3.0, 2.2, 1.8):
    candidate = mf.drag(ws, (x, 0.0, 0.0))
    if candidate is None:
        print(f"  drag to x={x}: no candidate")
    else:
        print(
            f"  drag to x={x}: target atom {candidate.target_slot.atom_id} "
            f"flashes at {candidate.distance:.2f} A"
        )

outcome = mf.release(ws)
print(f"released: bond {outcome.bond_id} formed")
print(f"final separation: {np.linalg.norm(ws.atoms[b].position - ws.atoms[a].position):.6f} A")
print(f"free slots now: {mf.free_slot_count(ws, a)} and {mf.free_slot_count(ws, b)}")
