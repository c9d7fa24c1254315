"""Harmonic spring force field and its constrained minimizer.

Energy is a sum of bond-length springs toward each bond's rest length
plus angle springs at every bonded triple toward the center atom's
preset angle. Minimization is plain gradient descent with a backtracking
(Armijo) line search; anchored atoms never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quat
from .errors import DegeneratePositions
from .geometry import preset_angle
from .model import Workspace, adjacency

_ARMIJO = 1e-4
_MIN_STEP = 1e-20
_SIN_EPS = 1e-9


@dataclass
class ForceFieldParams:
    k_bond: float = 100.0  # energy per square Angstrom
    k_angle: float = 10.0  # energy per square radian
    max_iterations: int = 10000
    gradient_tolerance: float = 1e-6  # energy per Angstrom, over free atoms
    initial_step: float = 1e-3  # square Angstrom per energy


@dataclass
class RelaxReport:
    iterations: int
    initial_energy: float
    final_energy: float
    final_gradient_norm: float
    converged: bool
    energy_trace: list[float] = field(default_factory=list)  # initial + each accepted step


class _Terms:
    """Index arrays over a fixed topology so the descent loop is pure numpy."""

    def __init__(self, ws: Workspace):
        self.ids = sorted(ws.atoms)
        index = {aid: i for i, aid in enumerate(self.ids)}
        self.positions = np.array(
            [ws.atoms[aid].position for aid in self.ids], dtype=float
        ).reshape(-1, 3)

        pairs, rests = [], []
        for bid in sorted(ws.bonds):
            bond = ws.bonds[bid]
            a, b = bond.atom_ids
            pairs.append((index[a], index[b]))
            rests.append(bond.rest_length)
        self.bond_pairs = np.array(pairs, dtype=int).reshape(-1, 2)
        self.bond_rest = np.array(rests, dtype=float)

        adj = adjacency(ws)
        triples, thetas = [], []
        for center in self.ids:
            neighbors = sorted(adj[center])
            if len(neighbors) < 2:
                continue
            theta0 = preset_angle(ws.atoms[center].element.valency)
            for i in range(len(neighbors)):
                for j in range(i + 1, len(neighbors)):
                    triples.append((index[neighbors[i]], index[center], index[neighbors[j]]))
                    thetas.append(theta0)
        self.angle_triples = np.array(triples, dtype=int).reshape(-1, 3)
        self.angle_theta0 = np.array(thetas, dtype=float)


def _evaluate(terms: _Terms, positions: np.ndarray, params: ForceFieldParams):
    """Energy and analytic gradient at the given positions."""
    grad = np.zeros_like(positions)
    energy = 0.0

    if len(terms.bond_pairs):
        i, j = terms.bond_pairs[:, 0], terms.bond_pairs[:, 1]
        d = positions[i] - positions[j]
        length = np.linalg.norm(d, axis=1)
        if np.any(length < 1e-9):
            raise DegeneratePositions("bonded atoms closer than 1e-9 A")
        stretch = length - terms.bond_rest
        energy += params.k_bond * float(np.dot(stretch, stretch))
        coef = (2.0 * params.k_bond * stretch / length)[:, None] * d
        np.add.at(grad, i, coef)
        np.add.at(grad, j, -coef)

    if len(terms.angle_triples):
        a = terms.angle_triples[:, 0]
        c = terms.angle_triples[:, 1]
        b = terms.angle_triples[:, 2]
        u = positions[a] - positions[c]
        v = positions[b] - positions[c]
        nu = np.linalg.norm(u, axis=1)
        nv = np.linalg.norm(v, axis=1)
        uh = u / nu[:, None]
        vh = v / nv[:, None]
        cos = np.sum(uh * vh, axis=1)
        sin = np.linalg.norm(np.cross(uh, vh), axis=1)
        theta = np.arctan2(sin, cos)
        off = theta - terms.angle_theta0
        energy += params.k_angle * float(np.dot(off, off))

        regular = sin >= _SIN_EPS
        safe_sin = np.where(regular, sin, 1.0)
        d_a = (cos[:, None] * uh - vh) / (nu * safe_sin)[:, None]
        d_b = (cos[:, None] * vh - uh) / (nv * safe_sin)[:, None]
        # At exactly straight or folded angles the true gradient direction is
        # undefined; pick a deterministic perpendicular so descent can still
        # break the symmetry.
        for k in np.nonzero(~regular)[0]:
            w = quat.perpendicular_unit(uh[k])
            d_a[k] = -w / nu[k]
            d_b[k] = (-w if cos[k] < 0.0 else w) / nv[k]
        pref = (2.0 * params.k_angle * off)[:, None]
        np.add.at(grad, a, pref * d_a)
        np.add.at(grad, b, pref * d_b)
        np.add.at(grad, c, -pref * (d_a + d_b))

    return energy, grad


def energy(ws: Workspace, params: ForceFieldParams | None = None) -> float:
    """Total spring energy of the workspace; always >= 0."""
    params = params or ForceFieldParams()
    terms = _Terms(ws)
    return _evaluate(terms, terms.positions, params)[0]


def gradient(ws: Workspace, params: ForceFieldParams | None = None) -> dict[int, np.ndarray]:
    """Analytic dE/dposition per atom id; vectors sum to zero."""
    params = params or ForceFieldParams()
    terms = _Terms(ws)
    grad = _evaluate(terms, terms.positions, params)[1]
    return {aid: grad[i].copy() for i, aid in enumerate(terms.ids)}


def relax(ws: Workspace, params: ForceFieldParams | None = None, fixed=()) -> RelaxReport:
    """Minimize the spring energy in place, holding ``fixed`` atoms still.

    Gradient descent; each iteration retries the last accepted step
    doubled and halves until the Armijo condition holds. Stops once the
    free-atom gradient norm is at or below the tolerance.
    """
    params = params or ForceFieldParams()
    fixed_ids = set(fixed)
    for aid in fixed_ids:
        ws.atom(aid)

    terms = _Terms(ws)
    free = np.array([aid not in fixed_ids for aid in terms.ids], dtype=bool)
    positions = terms.positions.copy()

    current_energy, grad = _evaluate(terms, positions, params)
    initial_energy = current_energy
    trace = [current_energy]
    step = params.initial_step
    iterations = 0
    converged = False

    while True:
        grad_free = np.where(free[:, None], grad, 0.0)
        grad_norm = float(np.linalg.norm(grad_free))
        if grad_norm <= params.gradient_tolerance:
            converged = True
            break
        if iterations >= params.max_iterations:
            break

        step *= 2.0
        decrement = grad_norm * grad_norm
        while True:
            trial = positions - step * grad_free
            try:
                trial_energy, trial_grad = _evaluate(terms, trial, params)
            except DegeneratePositions:
                trial_energy = math.inf
                trial_grad = None
            if trial_energy <= current_energy - _ARMIJO * step * decrement:
                break
            step *= 0.5
            if step < _MIN_STEP:
                break
        if step < _MIN_STEP:
            break  # no downhill step representable; report as-is

        positions = trial
        current_energy, grad = trial_energy, trial_grad
        trace.append(current_energy)
        iterations += 1

    for i, aid in enumerate(terms.ids):
        if free[i]:
            ws.atoms[aid].position = positions[i].copy()

    grad_free = np.where(free[:, None], grad, 0.0)
    return RelaxReport(
        iterations=iterations,
        initial_energy=initial_energy,
        final_energy=current_energy,
        final_gradient_norm=float(np.linalg.norm(grad_free)),
        converged=converged or float(np.linalg.norm(grad_free)) <= params.gradient_tolerance,
        energy_trace=trace,
    )
