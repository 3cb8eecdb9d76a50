import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinpol import (BasisSizeError, CavityParams, ManifoldBasis, ManyMolConfig,
                     ModelError, ProductBasis, analytic_nonsymmetric_spectrum,
                     analytic_symmetric_spectrum, assemble_hamiltonian,
                     brute_force_spectrum, build_many_molecule_hamiltonian,
                     thermodynamic_limit_spectrum)
from twinpol.manymol import helmert_rows

W02, W12, MU = 10e-3, 8e-3, 1.0


def cfg_thermal(n_mol, n0, g=2e-4):
    return ManyMolConfig(n_mol=n_mol, g=g, mu=MU, omega02=W02, omega12=W12, n0=n0)


def cfg_symmetric(n_mol, g=2e-4):
    return ManyMolConfig(n_mol=n_mol, g=g, mu=MU, omega02=W02, omega12=W12,
                         symmetric=True)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40))
def test_dark_rows_orthonormal_zero_sum(n):
    rows = helmert_rows(n)
    assert rows.shape == (n - 1, n)
    assert np.allclose(rows.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(rows @ rows.T, np.eye(n - 1), atol=1e-12)


def test_manifold_basis_structure():
    mb = ManifoldBasis(n_mol=6, n0=4)
    s = mb.symmetric_row
    assert np.allclose(s, 1 / math.sqrt(4))
    d = mb.dark_rows
    assert np.allclose(d @ s, 0.0, atol=1e-12)
    assert mb.n_ground_states == math.comb(6, 4)


def test_config_validation():
    with pytest.raises(ModelError):
        ManyMolConfig(n_mol=0, g=1e-4, mu=1, omega02=W02, omega12=W12, n0=0)
    with pytest.raises(ModelError):
        ManyMolConfig(n_mol=2, g=1e-4, mu=1, omega02=W02, omega12=W12)
    with pytest.raises(ModelError):
        cfg_thermal(2, 3)


def test_nonsymmetric_single_molecule_reduction():
    spec = analytic_nonsymmetric_spectrum(cfg_thermal(1, 1))
    # R doublet only: the twin/dark terms carry the vanishing C(1, 2) factor
    assert np.allclose(spec.omega, [W02 - 2e-4, W02 + 2e-4])
    assert np.allclose(spec.intensity, [0.5, 0.5])


def test_nonsymmetric_single_molecule_excited():
    spec = analytic_nonsymmetric_spectrum(cfg_thermal(1, 0))
    assert np.allclose(spec.omega, [W12 - 2e-4, W12 + 2e-4])
    assert np.allclose(spec.intensity, [0.5, 0.5])


def test_twin_to_dark_ratio_exact():
    # per-side twin intensity over dark intensity is 1/(2 n0), exactly
    for n_mol, n0 in ((3, 1), (5, 2), (8, 5)):
        spec = analytic_nonsymmetric_spectrum(cfg_thermal(n_mol, n0))
        mech = np.array(spec.meta["mechanism"])
        twin_side = spec.intensity[mech == "twin"][0]
        dark = spec.intensity[mech == "dark"].sum()
        assert twin_side / dark == pytest.approx(1.0 / (2 * n0), rel=1e-12)


def test_analytic_sum_rule_g_independent():
    for make in (lambda g: analytic_nonsymmetric_spectrum(cfg_thermal(4, 2, g)),
                 lambda g: analytic_symmetric_spectrum(cfg_symmetric(4, g))):
        totals = [make(g).intensity.sum() for g in (1e-5, 1e-4, 5e-4)]
        assert max(totals) - min(totals) < 1e-12


def test_symmetric_single_molecule():
    spec = analytic_symmetric_spectrum(cfg_symmetric(1))
    assert np.allclose(sorted(spec.omega),
                       [W12 - 2e-4, W12 + 2e-4, W02 - 2e-4, W02 + 2e-4])
    assert np.allclose(spec.intensity, spec.intensity[0])


def test_symmetric_concentration_large_count():
    # the finite-count formula concentrates each branch's offsets near
    # g mu sqrt(1/2): binomial concentration of sqrt(n0 / n_mol), whose
    # relative width at n_mol = 50 still needs a ~15% window for 95% weight
    g = 2e-4
    spec = analytic_symmetric_spectrum(cfg_symmetric(50, g))
    target = g * MU / math.sqrt(2.0)
    for center, branch in ((W02, "R"), (W12, "P")):
        mask = np.array(spec.meta["branch"]) == branch
        offsets = np.abs(spec.omega[mask] - center)
        weights = spec.intensity[mask]
        close = np.abs(offsets - target) < 0.15 * target
        assert weights[close].sum() / weights.sum() > 0.95
        mean_offset = float(np.average(offsets, weights=weights))
        assert mean_offset == pytest.approx(target, rel=0.03)


def test_thermo_limit_thermal():
    spec = thermodynamic_limit_spectrum(0.5, "thermal", 2e-4, MU, W02, W12)
    off = 2e-4 * math.sqrt(0.5)
    assert np.allclose(spec.omega, [W12, W02 - off, W02 + off])
    assert np.allclose(spec.intensity, [1.0, 0.5, 0.5])
    full = thermodynamic_limit_spectrum(1.0, "thermal", 2e-4, MU, W02, W12)
    assert np.allclose(full.omega, [W12, W02 - 2e-4, W02 + 2e-4])


def test_thermo_limit_symmetric():
    spec = thermodynamic_limit_spectrum(0.5, "symmetric", 2e-4, MU, W02, W12)
    off = math.sqrt(2.0) * 2e-4
    assert np.allclose(sorted(spec.omega),
                       sorted([W02 - off, W02 + off, W12 - off, W12 + off]))
    assert np.allclose(spec.intensity, 0.5)
    with pytest.raises(ModelError):
        thermodynamic_limit_spectrum(0.5, "bogus", 2e-4, MU, W02, W12)
    with pytest.raises(ModelError):
        thermodynamic_limit_spectrum(1.5, "thermal", 2e-4, MU, W02, W12)


def test_single_molecule_hamiltonian_reduction(model3, cav):
    h_many, labels = build_many_molecule_hamiltonian(model3, cav, 1)
    basis = ProductBasis.full(model3, cav.n_fock_max)
    h_one = assemble_hamiltonian(model3, cav, basis)
    assert np.allclose(h_many, h_one, atol=1e-15)
    assert labels[0] == ((0,), 0)


def test_two_molecule_decoupled_eigenvalues(model3):
    cav = CavityParams(omega_c=1e-2, g=0.0, include_dse=False, n_fock_max=1)
    h, labels = build_many_molecule_hamiltonian(model3, cav, 2)
    expected = sorted(
        model3.energies[i] + model3.energies[j] + n * cav.omega_c
        for i in range(3) for j in range(3) for n in (0, 1))
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), expected, atol=1e-12)


def test_size_guard(model3, cav):
    with pytest.raises(BasisSizeError):
        build_many_molecule_hamiltonian(model3, cav, 9)


def _cluster(spec, center, window=4e-5, floor_rel=0.002):
    floor = floor_rel * spec.intensity.max()
    m = (np.abs(spec.omega - center) < window) & (spec.intensity > floor)
    if not m.any():
        return None, 0.0
    w = spec.intensity[m]
    return float(np.average(spec.omega[m], weights=w)), float(w.sum())


def test_thermal_brute_force_matches_analytic(model3, cav):
    # N = 3 spot check of the oracle equivalence (full sweep in acceptance)
    n_mol, n0, g = 3, 1, cav.g
    ana = analytic_nonsymmetric_spectrum(cfg_thermal(n_mol, n0, g))
    bf = brute_force_spectrum(model3, cav, n_mol, n0=n0)
    total_a, total_b = ana.intensity.sum(), bf.intensity.sum()
    assert total_b == pytest.approx(total_a, rel=0.01)
    for center, off in ((W02, g * math.sqrt(n0 / n_mol)),
                        (W12, g * math.sqrt((n0 + 1) / n_mol))):
        lo_c, lo_s = _cluster(bf, center - off)
        hi_c, hi_s = _cluster(bf, center + off)
        assert abs((hi_c - lo_c) - 2 * off) < 0.02 * 2 * off
        a_pair = ana.intensity[np.abs(np.abs(ana.omega - center) - off) < 1e-12].sum()
        assert abs((lo_s + hi_s) - a_pair) / total_a < 0.02


def test_symmetric_brute_force_matches_analytic(model3, cav):
    n_mol, g = 2, cav.g
    ana = analytic_symmetric_spectrum(cfg_symmetric(n_mol, g))
    bf = brute_force_spectrum(model3, cav, n_mol, symmetric=True)
    floor = 0.02 * bf.intensity.max()
    b_total = bf.intensity[bf.intensity > floor].sum()
    for w_a, i_a in zip(ana.omega, ana.intensity):
        c, s = _cluster(bf, w_a)
        assert c is not None, f"no brute-force stick near {w_a}"
        assert abs(c - w_a) < 1e-5
        assert abs(s / b_total - i_a / ana.intensity.sum()) < 0.02


def test_dark_states_absent_in_symmetric_case():
    spec = analytic_symmetric_spectrum(cfg_symmetric(4))
    assert "dark" not in spec.meta["mechanism"]
