"""Bend a propane-like carbon chain to 90 degrees and let the spring
force field pull it back to the tetrahedral rest angle.

The minimizer is plain gradient descent with a backtracking line
search; the energy trace it returns is non-increasing by construction.
"""

import math

import numpy as np

import molecuforge as mf

ws = mf.new_workspace()
a = mf.create_atom(ws, "C", (3.0, 0.0, 0.0))
center = mf.create_atom(ws, "C", (0.0, 0.0, 0.0))
b = mf.create_atom(ws, "C", (-3.0, 0.0, 0.0))
mf.form_bond(ws, a, center)
mf.form_bond(ws, center, b)

# force the 90 degree bend
ws.atoms[a].position = np.array([1.54, 0.0, 0.0])
ws.atoms[center].position = np.zeros(3)
ws.atoms[b].position = np.array([0.0, 1.54, 0.0])

print(f"energy before: {mf.energy(ws):.4f}")
print(f"angle before:  {math.degrees(mf.bond_angle(ws, a, center, b)):.2f} deg")

report = mf.relax(ws)
print(f"\nrelaxed in {report.iterations} iterations, converged={report.converged}")
print(f"energy after:  {report.final_energy:.2e}")
print(f"angle after:   {math.degrees(mf.bond_angle(ws, a, center, b)):.4f} deg")
print(f"gradient norm: {report.final_gradient_norm:.2e}")
print(f"first few trace entries: {[round(e, 4) for e in report.energy_trace[:6]]}")
