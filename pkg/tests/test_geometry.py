from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

import molecuforge as mf
from molecuforge import quat
from molecuforge.errors import (
    DegeneratePositions,
    NotBonded,
    SameComponent,
    SlotOccupied,
    UnsupportedValency,
)
from molecuforge.geometry import TETRAHEDRAL_ANGLE, preset_angle

from conftest import build_methane

TET = math.degrees(TETRAHEDRAL_ANGLE)  # 109.4712...


def quat_to_matrix(q):
    """Independent quaternion-to-matrix conversion used as the rotation oracle."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


# -- vacancy presets ---------------------------------------------------------

def test_vacancy_preset_counts_and_norms():
    for valency in (1, 2, 3, 4):
        dirs = mf.vacancy_directions(valency)
        assert len(dirs) == valency
        for d in dirs:
            assert abs(np.linalg.norm(d) - 1.0) < 1e-12


@pytest.mark.parametrize("valency,expected", [(2, 180.0), (3, 120.0), (4, TET)])
def test_vacancy_preset_pairwise_angles_equal(valency, expected):
    dirs = mf.vacancy_directions(valency)
    angles = [
        math.degrees(math.acos(np.clip(np.dot(a, b), -1, 1)))
        for a, b in itertools.combinations(dirs, 2)
    ]
    for angle in angles:
        assert abs(angle - expected) < 1e-10
    spread = max(angles) - min(angles) if angles else 0.0
    assert spread < 1e-12


def test_tetrahedral_preset_angle_value():
    assert abs(math.degrees(math.acos(-1 / 3)) - 109.4712) < 1e-4
    assert preset_angle(4) == TETRAHEDRAL_ANGLE


def test_valency_one_preset():
    dirs = mf.vacancy_directions(1)
    assert np.array_equal(dirs[0], [0.0, 0.0, 1.0])


def test_unsupported_valency():
    for valency in (0, 5, -1):
        with pytest.raises(UnsupportedValency):
            mf.vacancy_directions(valency)


# -- world directions ----------------------------------------------------------

def test_world_direction_identity():
    ws = mf.new_workspace()
    h = mf.create_atom(ws, "H", (0, 0, 0))
    assert np.allclose(mf.world_direction(ws, mf.SlotRef(h, 0)), [0, 0, 1], atol=1e-15)


def test_world_direction_half_turn_about_x():
    ws = mf.new_workspace()
    h = mf.create_atom(ws, "H", (0, 0, 0))
    ws.atoms[h].orientation = quat.from_axis_angle([1, 0, 0], math.pi)
    assert np.allclose(mf.world_direction(ws, mf.SlotRef(h, 0)), [0, 0, -1], atol=1e-12)


def test_world_direction_random_matches_matrix_oracle():
    rng = np.random.default_rng(11)
    ws = mf.new_workspace()
    c = mf.create_atom(ws, "C", (0, 0, 0))
    for _ in range(50):
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        ws.atoms[c].orientation = q
        matrix = quat_to_matrix(q)
        for slot in range(4):
            direction = mf.world_direction(ws, mf.SlotRef(c, slot))
            assert abs(np.linalg.norm(direction) - 1.0) < 1e-9
            expected = matrix @ ws.atoms[c].slots[slot].local_direction
            assert np.allclose(direction, expected, atol=1e-12)


# -- bond angles -----------------------------------------------------------------

def test_bond_angle_methane_tetrahedral():
    ws = build_methane()
    hydrogens = [aid for aid in ws.atoms if aid != 1]
    for a, b in itertools.combinations(hydrogens, 2):
        assert abs(math.degrees(mf.bond_angle(ws, a, 1, b)) - TET) < 1e-6


def test_bond_angle_collinear_chain():
    ws = mf.new_workspace()
    a = mf.create_atom(ws, "O", (-1.32, 0, 0))
    c = mf.create_atom(ws, "O", (0, 0, 0))
    b = mf.create_atom(ws, "O", (1.32, 0, 0))
    mf.form_bond(ws, a, c)
    mf.form_bond(ws, c, b)
    # bonding docks atoms; pin the collinear arrangement explicitly
    ws.atoms[a].position = np.array([-1.32, 0.0, 0.0])
    ws.atoms[c].position = np.array([0.0, 0.0, 0.0])
    ws.atoms[b].position = np.array([1.32, 0.0, 0.0])
    assert abs(mf.bond_angle(ws, a, c, b) - math.pi) < 1e-12


def test_bond_angle_symmetric_in_outer_arguments():
    ws = build_methane()
    assert mf.bond_angle(ws, 2, 1, 3) == mf.bond_angle(ws, 3, 1, 2)


def test_bond_angle_requires_bonds():
    ws = build_methane()
    with pytest.raises(NotBonded):
        mf.bond_angle(ws, 2, 3, 4)  # hydrogens are not bonded to each other


def test_bond_angle_degenerate_arm():
    ws = mf.new_workspace()
    a = mf.create_atom(ws, "C", (0, 0, 0))
    b = mf.create_atom(ws, "C", (3, 0, 0))
    c = mf.create_atom(ws, "C", (6, 0, 0))
    mf.form_bond(ws, a, b)
    mf.form_bond(ws, b, c)
    ws.atoms[a].position = ws.atoms[b].position.copy()
    with pytest.raises(DegeneratePositions):
        mf.bond_angle(ws, a, b, c)


# -- dihedrals ---------------------------------------------------------------------

def test_dihedral_planar_cis_is_zero():
    angle = mf.dihedral_angle((1, 1, 0), (0, 1, 0), (0, -1, 0), (1, -1, 0))
    assert abs(angle) < 1e-12


def test_dihedral_planar_trans_is_pi():
    angle = mf.dihedral_angle((1, 1, 0), (0, 1, 0), (0, -1, 0), (-1, -1, 0))
    assert angle == pytest.approx(math.pi, abs=1e-12)
    assert angle > 0  # range is (-pi, pi], so trans maps to +pi


def _projected_dihedral(p1, p2, p3, p4):
    """Independent oracle: signed angle between arms projected off the axis."""
    p1, p2, p3, p4 = (np.asarray(p, float) for p in (p1, p2, p3, p4))
    axis = p3 - p2
    axis = axis / np.linalg.norm(axis)
    u = (p1 - p2) - np.dot(p1 - p2, axis) * axis
    v = (p4 - p3) - np.dot(p4 - p3, axis) * axis
    x = np.dot(u, v)
    y = np.dot(np.cross(axis, u), v)
    return math.atan2(y, x)


def test_dihedral_staggered_from_tetrahedral_presets():
    dirs = mf.vacancy_directions(4)
    c1 = np.zeros(3)
    c2 = 1.54 * dirs[0]
    h1 = c1 + 1.09 * dirs[1]
    for j in (1, 2, 3):
        h2 = c2 - 1.09 * dirs[j]  # inverted tetrahedron: staggered arrangement
        got = mf.dihedral_angle(h1, c1, c2, h2)
        oracle = _projected_dihedral(h1, c1, c2, h2)
        assert math.remainder(got - oracle, 2 * math.pi) == pytest.approx(0.0, abs=1e-9)
        if j == 1:
            assert abs(math.degrees(got)) == pytest.approx(180.0, abs=1e-6)
        else:
            assert abs(math.degrees(got)) == pytest.approx(60.0, abs=1e-6)


def test_dihedral_random_matches_projection_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        points = rng.uniform(-2, 2, size=(4, 3))
        try:
            got = mf.dihedral_angle(*points)
        except DegeneratePositions:
            continue
        diff = math.remainder(got - _projected_dihedral(*points), 2 * math.pi)
        assert diff == pytest.approx(0.0, abs=1e-9)
        assert -math.pi < got <= math.pi


def test_dihedral_degenerate_inputs():
    with pytest.raises(DegeneratePositions):
        mf.dihedral_angle((0, 0, 0), (0, 0, 0), (1, 0, 0), (1, 1, 0))
    with pytest.raises(DegeneratePositions):
        # hinge arms parallel: p1-p2-p3 collinear
        mf.dihedral_angle((2, 0, 0), (1, 0, 0), (0, 0, 0), (0, 1, 0))


# -- docking -------------------------------------------------------------------------

def test_docking_lone_hydrogen_lands_on_slot():
    ws = mf.new_workspace()
    c = mf.create_atom(ws, "C", (0, 0, 0))
    h = mf.create_atom(ws, "H", (5, 5, 5))
    transform = mf.docking_transform(ws, mf.SlotRef(h, 0), mf.SlotRef(c, 0), 1.09)
    landed = transform.apply_point(ws.atoms[h].position)
    expected = 1.09 / math.sqrt(3)  # 0.6293118 along each axis
    assert np.allclose(landed, [expected, expected, expected], atol=1e-9)


def test_docking_already_docked_is_identity():
    ws = mf.new_workspace()
    c = mf.create_atom(ws, "C", (0, 0, 0))
    h = mf.create_atom(ws, "H", (0, 0, 0))
    direction = mf.world_direction(ws, mf.SlotRef(c, 0))
    ws.atoms[h].position = 1.09 * direction
    # point the hydrogen slot back against the carbon slot
    ws.atoms[h].orientation = quat.rotation_between(np.array([0.0, 0.0, 1.0]), -direction)
    transform = mf.docking_transform(ws, mf.SlotRef(h, 0), mf.SlotRef(c, 0), 1.09)
    assert np.allclose(transform.translation, 0, atol=1e-9)
    assert abs(abs(transform.rotation[0]) - 1.0) < 1e-9  # identity up to sign


def test_docking_postconditions_random_poses():
    rng = np.random.default_rng(23)
    for _ in range(40):
        ws = mf.new_workspace()
        c = mf.create_atom(ws, "C", rng.uniform(-3, 3, 3))
        n = mf.create_atom(ws, "N", rng.uniform(-3, 3, 3))
        for aid in (c, n):
            q = rng.standard_normal(4)
            ws.atoms[aid].orientation = q / np.linalg.norm(q)
        held_slot = mf.SlotRef(n, int(rng.integers(0, 3)))
        target_slot = mf.SlotRef(c, int(rng.integers(0, 4)))
        rest = 1.47
        transform = mf.docking_transform(ws, held_slot, target_slot, rest)

        mf.move_molecule(ws, n, transform.translation, transform.rotation, (0, 0, 0))
        held_dir = mf.world_direction(ws, held_slot)
        target_dir = mf.world_direction(ws, target_slot)
        assert np.allclose(held_dir, -target_dir, atol=1e-9)
        expected = ws.atoms[c].position + rest * target_dir
        assert np.allclose(ws.atoms[n].position, expected, atol=1e-9)


def test_docking_preserves_held_component_shape():
    rng = np.random.default_rng(5)
    ws = mf.new_workspace()
    c = mf.create_atom(ws, "C", (0, 0, 0))
    # held fragment: a small molecule
    o = mf.create_atom(ws, "O", (4, 0, 0))
    h = mf.create_atom(ws, "H", (6, 0, 0))
    mf.form_bond(ws, o, h)
    before = np.linalg.norm(ws.atoms[o].position - ws.atoms[h].position)
    transform = mf.docking_transform(ws, mf.SlotRef(o, 1), mf.SlotRef(c, 2), 1.43)
    mf.move_molecule(ws, o, transform.translation, transform.rotation, (0, 0, 0))
    after = np.linalg.norm(ws.atoms[o].position - ws.atoms[h].position)
    assert after == pytest.approx(before, abs=1e-9)


def test_docking_minimal_rotation_angle():
    rng = np.random.default_rng(17)
    for _ in range(20):
        ws = mf.new_workspace()
        c = mf.create_atom(ws, "C", (0, 0, 0))
        h = mf.create_atom(ws, "H", rng.uniform(-2, 2, 3))
        q = rng.standard_normal(4)
        ws.atoms[h].orientation = q / np.linalg.norm(q)
        transform = mf.docking_transform(ws, mf.SlotRef(h, 0), mf.SlotRef(c, 0), 1.09)
        held_dir = mf.world_direction(ws, mf.SlotRef(h, 0))
        target_dir = mf.world_direction(ws, mf.SlotRef(c, 0))
        # minimal possible rotation angle maps held_dir onto -target_dir
        minimal = math.acos(np.clip(np.dot(held_dir, -target_dir), -1, 1))
        actual = 2.0 * math.acos(np.clip(abs(transform.rotation[0]), -1, 1))
        assert actual <= minimal + 1e-9


def test_docking_rejects_occupied_and_same_component():
    ws = mf.new_workspace()
    c1 = mf.create_atom(ws, "C", (0, 0, 0))
    c2 = mf.create_atom(ws, "C", (3, 0, 0))
    bond = mf.form_bond(ws, c1, c2)
    used_slot = ws.bonds[bond].slot_of(c1)
    lone = mf.create_atom(ws, "H", (9, 9, 9))
    with pytest.raises(SlotOccupied):
        mf.docking_transform(ws, mf.SlotRef(lone, 0), mf.SlotRef(c1, used_slot), 1.09)
    free_c1 = ws.atoms[c1].free_slots()[0].index
    free_c2 = ws.atoms[c2].free_slots()[0].index
    with pytest.raises(SameComponent):
        mf.docking_transform(ws, mf.SlotRef(c2, free_c2), mf.SlotRef(c1, free_c1), 1.54)
