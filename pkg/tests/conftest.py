"""Shared molecule builders for the test suite.

Everything is built through public operations so the structural
invariants hold by construction.
"""

from __future__ import annotations

import math

import numpy as np

import molecuforge as mf


def build_methane() -> mf.Workspace:
    ws = mf.new_workspace()
    carbon = mf.create_atom(ws, "C", (0.0, 0.0, 0.0))
    for i in range(4):
        hydrogen = mf.create_atom(ws, "H", (2.0 + i, float(i), 0.0))
        mf.form_bond(ws, carbon, hydrogen)
    return ws


def build_2_methylbutane() -> mf.Workspace:
    """Branched C5 skeleton: 1-2, 2-3, 3-4, 2-5 (atom 2 is the branch point)."""
    ws = mf.new_workspace()
    for position in [(0, 0, 0), (2, 0, 0), (4, 0.5, 0), (6, 0, 0.5), (2, 2, 0)]:
        mf.create_atom(ws, "C", position)
    for a, b in [(1, 2), (2, 3), (3, 4), (2, 5)]:
        mf.form_bond(ws, a, b)
    return ws


def build_cyclopentane() -> mf.Workspace:
    ws = mf.new_workspace()
    radius = 1.54 / (2.0 * math.sin(math.pi / 5.0))
    for i in range(5):
        angle = math.radians(90.0 + 72.0 * i)
        mf.create_atom(ws, "C", (radius * math.cos(angle), radius * math.sin(angle), 0.0))
    for a, b in [(1, 2), (2, 3), (3, 4), (4, 5)]:
        mf.form_bond(ws, a, b)
    mf.form_bond(ws, 5, 1)
    return ws


def random_workspace(rng: np.random.Generator, max_atoms: int = 20, jitter: float = 0.0) -> mf.Workspace:
    """Random valid workspace built through public operations only."""
    ws = mf.new_workspace()
    symbols = ["C", "H", "O", "N"]
    n_atoms = int(rng.integers(1, max_atoms + 1))
    for _ in range(n_atoms):
        symbol = symbols[int(rng.integers(0, len(symbols)))]
        mf.create_atom(ws, symbol, rng.uniform(-5.0, 5.0, size=3))

    ids = sorted(ws.atoms)
    for _ in range(int(rng.integers(0, 2 * n_atoms))):
        a, b = (int(i) for i in rng.choice(ids, size=2, replace=False)) if n_atoms > 1 else (0, 0)
        if n_atoms < 2 or a == b:
            continue
        if mf.model.find_bond(ws, a, b) is not None:
            continue
        if not (ws.atoms[a].free_slots() and ws.atoms[b].free_slots()):
            continue
        mf.form_bond(ws, a, b)

    # scatter the molecules with random rigid moves
    seen: set[int] = set()
    for aid in ids:
        if aid in seen:
            continue
        component = mf.connected_component(ws, aid)
        seen |= component
        q = rng.standard_normal(4)
        q = q / np.linalg.norm(q)
        mf.move_molecule(ws, aid, rng.uniform(-3, 3, size=3), q, ws.atoms[aid].position)

    if jitter > 0.0:
        for atom in ws.atoms.values():
            atom.position = atom.position + rng.normal(0.0, jitter, size=3)
    return ws
