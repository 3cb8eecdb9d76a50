import math

import numpy as np
import pytest

from twinpol import ConvergenceError, MorseParams, RadialGrid, build_morse_rovib
from twinpol.model import _sine_dvr_kinetic, z_direction_cosine
from twinpol.units import au_to_cm1


def test_dvr_kinetic_against_box_levels():
    # free particle in a box: E_n = (n pi / L)^2 / (2 m)
    mass, length, n = 1.5, 3.0, 200
    t = _sine_dvr_kinetic(n, length, mass)
    levels = np.linalg.eigvalsh(t)[:5]
    exact = np.array([(k * math.pi / length) ** 2 / (2 * mass) for k in range(1, 6)])
    assert np.allclose(levels, exact, rtol=1e-10)


def test_rotational_constant_value():
    # direct arithmetic from the default constants
    assert au_to_cm1(MorseParams().rotational_constant) == pytest.approx(10.59, abs=0.01)


def test_j0_levels_match_closed_form(hcl_model):
    params = MorseParams()
    zero = params.analytic_level(0)
    for v in (0, 1):
        k = hcl_model.state_index(v=v, J=0, M=0)
        analytic = params.analytic_level(v) - zero
        assert abs(au_to_cm1(hcl_model.energies[k] - analytic)) < 0.1


def test_cavity_resonant_transition(hcl_model):
    # oracle: analytic Morse fundamental plus the rigid-rotor correction,
    # cross-checked against the grid eigensolver
    params = MorseParams()
    oracle = (params.analytic_level(1) - params.analytic_level(0)
              + 2.0 * params.rotational_constant)
    i00 = hcl_model.state_index(v=0, J=0, M=0)
    i11 = hcl_model.state_index(v=1, J=1, M=0)
    grid_value = hcl_model.energies[i11] - hcl_model.energies[i00]
    assert abs(au_to_cm1(grid_value - oracle)) < 2.0
    assert abs(au_to_cm1(grid_value) - 2906.46) < 5.0


def test_selection_rules(hcl_model):
    i000 = hcl_model.state_index(v=0, J=0, M=0)
    i120 = hcl_model.state_index(v=1, J=2, M=0)
    assert hcl_model.dipole[i000, i120] == 0.0       # dJ = 2 forbidden
    i111 = hcl_model.state_index(v=1, J=1, M=1)
    assert hcl_model.dipole[i000, i111] == 0.0       # dM = 1 forbidden
    i110 = hcl_model.state_index(v=1, J=1, M=0)
    assert hcl_model.dipole[i000, i110] != 0.0


def test_direction_cosine_values():
    assert z_direction_cosine(0, 1, 0) == pytest.approx(1 / math.sqrt(3))
    assert z_direction_cosine(1, 0, 0) == pytest.approx(1 / math.sqrt(3))
    assert z_direction_cosine(1, 2, 1) == pytest.approx(math.sqrt(3 / 15))
    assert z_direction_cosine(1, 3, 0) == 0.0
    # |M| = J' kills the J -> J - 1 branch
    assert z_direction_cosine(2, 1, 2) == 0.0


def test_energy_reference_and_ordering(hcl_model):
    i000 = hcl_model.state_index(v=0, J=0, M=0)
    assert hcl_model.energies[i000] == 0.0
    assert np.all(hcl_model.energies >= 0.0)


def test_grid_doubling_convergence():
    params = MorseParams(v_max=1, j_max=1)
    grid = RadialGrid()
    coarse = build_morse_rovib(params, grid, check_convergence=False)
    fine = build_morse_rovib(params, RadialGrid(n_points=2 * grid.n_points),
                             check_convergence=False)
    for v in (0, 1):
        for j in (0, 1):
            a = coarse.energies[coarse.state_index(v=v, J=j, M=0)]
            b = fine.energies[fine.state_index(v=v, J=j, M=0)]
            assert abs(au_to_cm1(a - b)) < 1e-4


def test_coarse_grid_raises():
    params = MorseParams(v_max=1, j_max=1)
    with pytest.raises(ConvergenceError):
        build_morse_rovib(params, RadialGrid(n_points=24))


def test_m_degeneracy(hcl_model):
    e = [hcl_model.energies[hcl_model.state_index(v=0, J=2, M=m)] for m in (-2, 0, 2)]
    assert np.allclose(e, e[0], atol=1e-14)
