"""Quantum molecule coupled to a classical cavity mode (mean-field dynamics).

The molecular state is expanded over cavity-free eigenstates with
interaction-picture coefficients, |Psi(t)> = sum_k C_k(t) e^{-i E_k t} |k>,
propagated jointly with the scalar field variables (q, p):

    dC_n/dt = -i sum_k e^{-i(E_k - E_n) t}
              [ (g sqrt(2 w_c) q + f(t)) mu_nk + (g^2/w_c) (mu^2)_nk ] C_k
    dp/dt   = -w_c^2 q - g sqrt(2 w_c) <mu(t)>
    dq/dt   = p

from C_k(0) = delta_{k,init} and the field vacuum p(0) = q(0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, KickPulse, Trajectory
from .errors import IntegrationError, ModelError
from .integrators import integrate
from .model import MolecularModel, mu_squared_matrix

NORM_TOL = 1e-6


@dataclass
class ClassicalState:
    """Interaction-picture coefficients plus the scalar field pair."""

    coeffs: np.ndarray
    q: float
    p: float
    t: float

    @property
    def norm(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def schroedinger_coeffs(self, energies: np.ndarray) -> np.ndarray:
        return np.exp(-1j * energies * self.t) * self.coeffs


def _expectation(psi: np.ndarray, op: np.ndarray) -> float:
    return float(np.vdot(psi, op @ psi).real)


def classical_total_energy(state: ClassicalState, model: MolecularModel,
                           cav: CavityParams) -> float:
    """<H_mol + g sqrt(2 w_c) q mu + (g^2/w_c) mu^2> + (p^2 + w_c^2 q^2)/2."""
    psi = state.schroedinger_coeffs(model.energies)
    e = float(np.sum(model.energies * np.abs(psi) ** 2))
    e += cav.g * math.sqrt(2.0 * cav.omega_c) * state.q * _expectation(psi, model.dipole)
    if cav.include_dse:
        e += cav.dse_prefactor * _expectation(psi, mu_squared_matrix(model))
    e += 0.5 * (state.p**2 + cav.omega_c**2 * state.q**2)
    return e


def propagate_classical(model: MolecularModel, cav: CavityParams, pulse: KickPulse,
                        init_state: int, t_end: float, dt: float,
                        record_stride: int = 1) -> Trajectory:
    """Kick the molecule out of equilibrium and record the joint dynamics.

    Raises IntegrationError when the coefficient norm drifts beyond 1e-6
    (reduce dt) or when the kick exceeds the pulse's linear-response bound.
    """
    n = model.n_states
    if not 0 <= init_state < n:
        raise ModelError(f"init_state {init_state} outside 0..{n - 1}")
    de_max = float(model.energies.max() - model.energies.min())
    if dt * (de_max + cav.omega_c) >= 0.1:
        raise ModelError(
            f"dt={dt} too coarse for the fastest phase; need "
            f"dt < {0.1 / (de_max + cav.omega_c):.3g}"
        )

    energies = model.energies
    mu = model.dipole
    mu2 = mu_squared_matrix(model)
    g_fac = cav.g * math.sqrt(2.0 * cav.omega_c)
    dse = cav.dse_prefactor
    wc2 = cav.omega_c**2

    def rhs(t, y):
        c = y[:n]
        q = y[n].real
        phase = np.exp(1j * energies * t)
        psi = np.conj(phase) * c
        mu_psi = mu @ psi
        drive = g_fac * q + pulse(t)
        w_psi = drive * mu_psi
        if dse:
            w_psi = w_psi + dse * (mu2 @ psi)
        dy = np.empty_like(y)
        dy[:n] = -1j * phase * w_psi
        dy[n] = y[n + 1].real
        dy[n + 1] = -wc2 * q - g_fac * float(np.vdot(psi, mu_psi).real)
        return dy

    n_steps = int(round(t_end / dt))
    n_rec = n_steps // record_stride + 1
    times = np.empty(n_rec)
    dipole = np.empty(n_rec)
    pops = np.empty((n_rec, n))
    q_ser = np.empty(n_rec)
    p_ser = np.empty(n_rec)
    energy = np.empty(n_rec)
    rec = {"i": 0, "norm_drift": 0.0}

    def observer(t, y):
        i = rec["i"]
        c = y[:n]
        q = y[n].real
        p = y[n + 1].real
        psi = np.exp(-1j * energies * t) * c
        times[i] = t
        dipole[i] = np.vdot(psi, mu @ psi).real
        pops[i] = np.abs(c) ** 2
        q_ser[i] = q
        p_ser[i] = p
        energy[i] = classical_total_energy(ClassicalState(c, q, p, t), model, cav)
        rec["norm_drift"] = max(rec["norm_drift"], abs(float(np.sum(pops[i])) - 1.0))
        rec["i"] += 1

    y0 = np.zeros(n + 2, complex)
    y0[init_state] = 1.0
    integrate(rhs, y0, 0.0, dt, n_steps, observer, record_stride)

    if rec["norm_drift"] > NORM_TOL:
        raise IntegrationError(
            f"norm drift {rec['norm_drift']:.2e} exceeds {NORM_TOL}; reduce dt"
        )
    _check_linear_response(times, pops, init_state, pulse)

    traj = Trajectory(
        kind="classical", times=times, dipole=dipole, populations=pops,
        energy=energy, pop_labels=[model.label_str(k) for k in range(n)],
        q_series=q_ser, p_series=p_ser,
        meta={
            "dt": dt, "t_end": n_steps * dt, "record_stride": record_stride,
            "init_state": init_state, "pulse_support_end": pulse.support_end,
            "pulse_t0": pulse.t0, "pulse_sigma": pulse.sigma,
            "norm_drift": rec["norm_drift"],
            "omega_c": cav.omega_c, "g": cav.g, "include_dse": cav.include_dse,
        },
    )
    traj.meta["energy_drift_post_pulse"] = post_pulse_energy_drift(traj)
    return traj


def post_pulse_energy_drift(traj: Trajectory) -> float:
    """Relative spread of total energy after the pulse support.

    Normalized by max(|mean energy|, photon quantum): ground-state runs have
    total energy near zero, so the photon quantum sets the physical scale.
    """
    mask = traj.post_pulse_mask()
    e = traj.energy[mask]
    if e.size < 2:
        return 0.0
    scale = max(abs(float(np.mean(e))), float(traj.meta.get("omega_c", 0.0)), 1e-30)
    return float(e.max() - e.min()) / scale


def _check_linear_response(times, pops, init_entry, pulse: KickPulse):
    if pulse.amplitude == 0.0 or not math.isfinite(pulse.max_excitation):
        return
    after = np.searchsorted(times, pulse.support_end)
    if after >= times.size:
        return
    excited = 1.0 - pops[after, init_entry]
    if excited > pulse.max_excitation:
        raise IntegrationError(
            f"post-kick excited population {excited:.3e} exceeds the pulse "
            f"linear-response bound {pulse.max_excitation}; lower the amplitude "
            "or raise KickPulse.max_excitation"
        )
