#!/usr/bin/env python3
"""Fate of the twin polariton as the molecule count grows.

Thermal (nonsymmetric) ensembles: dark-state transitions pile intensity onto
the bare off-resonant line and suppress the twin doublet as n0 grows — the
per-side twin/dark intensity ratio is exactly 1/(2 n0).  A permutationally
symmetric initial state cannot reach the dark states, so the twin survives.
Brute-force product-basis diagonalization cross-checks the closed forms for
small counts.
"""

import numpy as np

from twinpol import (CavityParams, ManyMolConfig, analytic_nonsymmetric_spectrum,
                     analytic_symmetric_spectrum, broaden_sticks,
                     brute_force_spectrum, build_three_level,
                     thermodynamic_limit_spectrum)

W02, W12, G = 10e-3, 8e-3, 2e-4
model = build_three_level(0.0, 2e-3, W02, 1.0, 1.0)
cav = CavityParams(omega_c=W02, g=G, include_dse=False, n_fock_max=2)

print("thermal ensembles, half the molecules in each lower state:")
for n_mol in (2, 4, 6):
    cfg = ManyMolConfig(n_mol=n_mol, g=G, mu=1.0, omega02=W02, omega12=W12,
                        n0=n_mol // 2)
    spec = analytic_nonsymmetric_spectrum(cfg)
    mech = np.array(spec.meta["mechanism"])
    twin = spec.intensity[mech == "twin"].sum()
    dark = spec.intensity[mech == "dark"].sum()
    print(f"  n_mol={n_mol}, n0={n_mol // 2}: twin/dark intensity "
          f"{twin / dark:.3f} (1/n0 = {1 / (n_mol // 2):.3f})")

print("\nbrute force vs closed form at n_mol=4, n0=2:")
bf = brute_force_spectrum(model, cav, 4, n0=2)
strong = bf.intensity > 0.02 * bf.intensity.max()
for w, i in zip(bf.omega[strong], bf.intensity[strong]):
    print(f"  {w:.6f}  {i:8.3f}")

limit_thermal = thermodynamic_limit_spectrum(0.5, "thermal", G, 1.0, W02, W12)
limit_sym = thermodynamic_limit_spectrum(0.5, "symmetric", G, 1.0, W02, W12)
print("\nlarge-count closed forms:")
print("  thermal sticks  :", np.round(limit_thermal.omega, 6))
print("  symmetric sticks:", np.round(limit_sym.omega, 6))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
    counts = (2, 4, 6)
    shades = plt.cm.RdPu(np.linspace(0.4, 0.9, len(counts)))

    def plot_window(ax, spec, color, label):
        m = (spec.omega > 7.5e-3) & (spec.omega < 8.5e-3)
        if m.any():
            ax.plot(spec.omega[m], spec.intensity[m] / spec.intensity[m].max(),
                    color=color, label=label)

    for n_mol, color in zip(counts, shades):
        cfg = ManyMolConfig(n_mol=n_mol, g=G, mu=1.0, omega02=W02, omega12=W12,
                            n0=n_mol // 2)
        spec = broaden_sticks(analytic_nonsymmetric_spectrum(cfg).normalized(),
                              "lorentzian", width=6e-6)
        plot_window(axes[0], spec, color, f"n={n_mol}")
        cfg_s = ManyMolConfig(n_mol=n_mol, g=G, mu=1.0, omega02=W02,
                              omega12=W12, symmetric=True)
        spec_s = broaden_sticks(analytic_symmetric_spectrum(cfg_s).normalized(),
                                "lorentzian", width=6e-6)
        plot_window(axes[1], spec_s, color, f"n={n_mol}")
    axes[0].set_title("thermal: twin suppressed")
    axes[1].set_title("symmetric: twin persists")
    for ax in axes:
        ax.set_xlabel("frequency (hartree)")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("normalized intensity")
    fig.tight_layout()
    fig.savefig("many_molecule_fate.png", dpi=150)
    print("wrote many_molecule_fate.png")
except ImportError:
    print("matplotlib not available; skipped the figure")
