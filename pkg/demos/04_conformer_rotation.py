"""Sweep a methyl group of 2-methylbutane around its bond and watch the
dihedral track the applied rotation exactly while every bond length and
angle stays put.
"""

import math

import numpy as np

import molecuforge as mf

ws = mf.new_workspace()
for position in [(0, 0, 0), (2, 0, 0), (4, 0.5, 0), (6, 0, 0.5), (2, 2, 0)]:
    mf.create_atom(ws, "C", position)
for a, b in [(1, 2), (2, 3), (3, 4), (2, 5)]:
    mf.form_bond(ws, a, b)


def dihedral_deg():
    points = [ws.atoms[i].position for i in (1, 2, 3, 4)]
    return math.degrees(mf.dihedral_angle(*points))


def longest_bond_error():
    worst = 0.0
    for bond in ws.bonds.values():
        a, b = bond.atom_ids
        length = np.linalg.norm(ws.atoms[a].position - ws.atoms[b].position)
        worst = max(worst, abs(length - bond.rest_length))
    return worst


print(f"starting dihedral C1-C2-C3-C4: {dihedral_deg():.2f} deg")
for step_deg in (30, 30, 60, 120):
    mf.rotate_about_bond(ws, 2, 3, math.radians(step_deg))
    print(
        f"  rotated +{step_deg:>3} deg -> dihedral {dihedral_deg():>8.2f} deg, "
        f"max bond length drift {longest_bond_error():.1e} A"
    )
print(f"energy is still {mf.energy(ws):.2e} (conformers are isoenergetic here)")
