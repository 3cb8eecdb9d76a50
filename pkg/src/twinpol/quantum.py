"""Quantized cavity mode: product-basis Hamiltonian, static polariton spectra,
and time-dependent kick propagation with photonic observables.

States live in the |molecular eigenstate k> x |Fock N> product basis.  The
static route diagonalizes H and reads stick intensities |<i|mu|f>|^2 off the
eigenvectors; the time-dependent route integrates the interaction-picture
coefficients C_{k,N}(t) (phases e^{-i(E_k + N w_c) t}) with the shared RK4
engine and Fourier-transforms <mu(t)>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, KickPulse, Trajectory
from .classical import post_pulse_energy_drift
from .errors import ConvergenceError, IntegrationError, ModelError
from .integrators import integrate
from .model import MolecularModel, ThermalWeights, mu_squared_matrix
from .spectra import Spectrum, make_stick_spectrum

NORM_TOL = 1e-6


@dataclass(frozen=True)
class ProductBasis:
    """Ordered list of (molecular index k, photon number N) entries.

    The full basis is N-major ((k=0..n-1, N=0), (k=0..n-1, N=1), ...);
    restricted bases (any unique subset) are allowed, which is how block
    Hamiltonians over a chosen manifold are assembled.
    """

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ModelError("basis entries must be unique")

    @classmethod
    def full(cls, model: MolecularModel, n_fock_max: int) -> "ProductBasis":
        return cls(tuple((k, n) for n in range(n_fock_max + 1)
                         for k in range(model.n_states)))

    @property
    def size(self) -> int:
        return len(self.entries)

    def index(self, k: int, n: int) -> int:
        return self.entries.index((k, n))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.array([k for k, _ in self.entries])
        ns = np.array([n for _, n in self.entries])
        return ks, ns

    def label(self, i: int, model: MolecularModel) -> str:
        k, n = self.entries[i]
        return f"{model.label_str(k)};N{n}"


def assemble_hamiltonian(model: MolecularModel, cav: CavityParams,
                         basis: ProductBasis) -> np.ndarray:
    """H = diag(E_k + N w_c) + g (sqrt(N+1) or sqrt(N)) mu + (g^2/w_c) mu^2.

    The dipole ladder factors connect N' = N +- 1; the self-energy term is
    diagonal in photon number and included only when cav.include_dse.
    """
    ks, ns = basis.arrays()
    if ks.max() >= model.n_states:
        raise ModelError("basis references molecular states outside the model")
    h = np.diag(model.energies[ks] + ns * cav.omega_c)
    up = ns[:, None] == ns[None, :] + 1       # N' = N + 1: creation, sqrt(N+1)
    down = ns[:, None] == ns[None, :] - 1     # N' = N - 1: annihilation, sqrt(N)
    lad = np.zeros((basis.size, basis.size))
    lad[up] = np.sqrt(ns[None, :] + 1.0 + 0.0 * ns[:, None])[up]
    lad[down] = np.sqrt(0.0 * ns[:, None] + ns[None, :])[down]
    h += cav.g * lad * model.dipole[np.ix_(ks, ks)]
    if cav.include_dse:
        same = ns[:, None] == ns[None, :]
        h += cav.dse_prefactor * same * mu_squared_matrix(model)[np.ix_(ks, ks)]
    return h


def mu_operator(model: MolecularModel, basis: ProductBasis) -> np.ndarray:
    """mu x identity on the photon space."""
    ks, ns = basis.arrays()
    same = ns[:, None] == ns[None, :]
    return same * model.dipole[np.ix_(ks, ks)]


def q_operator(cav: CavityParams, basis: ProductBasis) -> np.ndarray:
    """q = (a^dag + a) / sqrt(2 w_c) on the product basis."""
    ks, ns = basis.arrays()
    same_k = ks[:, None] == ks[None, :]
    op = np.zeros((basis.size, basis.size))
    up = same_k & (ns[:, None] == ns[None, :] + 1)
    down = same_k & (ns[:, None] == ns[None, :] - 1)
    op[up] = np.sqrt(ns[None, :] + 1.0 + 0.0 * ns[:, None])[up]
    op[down] = np.sqrt(0.0 * ns[:, None] + ns[None, :])[down]
    return op / math.sqrt(2.0 * cav.omega_c)


def q2_operator(cav: CavityParams, basis: ProductBasis) -> np.ndarray:
    """q^2 = (a^dag a^dag + a a + 2 a^dag a + 1) / (2 w_c), exact ladder
    matrix elements (not the square of the truncated q matrix)."""
    ks, ns = basis.arrays()
    same_k = ks[:, None] == ks[None, :]
    op = np.zeros((basis.size, basis.size))
    diag = same_k & (ns[:, None] == ns[None, :])
    op[diag] = (2.0 * ns[None, :] + 1.0 + 0.0 * ns[:, None])[diag]
    up2 = same_k & (ns[:, None] == ns[None, :] + 2)
    dn2 = same_k & (ns[:, None] == ns[None, :] - 2)
    op[up2] = np.sqrt((ns[None, :] + 1.0) * (ns[None, :] + 2.0) + 0.0 * ns[:, None])[up2]
    op[dn2] = np.sqrt((ns[None, :] - 1.0) * (ns[None, :] + 0.0) + 0.0 * ns[:, None])[dn2]
    return op / (2.0 * cav.omega_c)


@dataclass(frozen=True)
class PolaritonSolution:
    """Eigenvalues (ascending) and eigenvector columns of the polariton H."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.size


def diagonalize_polaritons(h: np.ndarray) -> PolaritonSolution:
    if not np.allclose(h, h.T, atol=1e-12):
        raise ModelError("Hamiltonian must be symmetric")
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as err:
        raise ConvergenceError(
            f"eigensolver failed: {err}; matrix condition ~ "
            f"{np.linalg.cond(h):.3e}"
        ) from err
    return PolaritonSolution(eigenvalues=evals, eigenvectors=evecs)


def dominant_eigenstate(sol: PolaritonSolution, basis: ProductBasis,
                        entry: tuple[int, int], min_overlap: float = 0.5) -> int:
    """Eigenstate with dominant squared overlap on one basis entry."""
    row = basis.index(*entry)
    overlaps = np.abs(sol.eigenvectors[row, :]) ** 2
    best = int(np.argmax(overlaps))
    if overlaps[best] <= min_overlap:
        raise ModelError(
            f"no eigenstate has > {min_overlap} overlap with basis entry {entry} "
            f"(best {overlaps[best]:.3f}); states too strongly mixed"
        )
    return best


def thermal_initial_states(sol: PolaritonSolution, basis: ProductBasis,
                           weights: ThermalWeights,
                           weight_cutoff: float = 0.0) -> list[tuple[int, float]]:
    """(eigenstate, weight) pairs for a thermal ensemble in the vacuum.

    Each thermally populated molecular state |k> maps to the eigenstate with
    dominant overlap on |k, N=0>; weights are renormalized after the cutoff.
    """
    pairs = []
    for k in weights.subset:
        w = float(weights.weights[k])
        if w <= weight_cutoff:
            continue
        pairs.append((dominant_eigenstate(sol, basis, (k, 0)), w))
    total = sum(w for _, w in pairs)
    return [(i, w / total) for i, w in pairs]


def static_stick_spectrum(sol: PolaritonSolution, model: MolecularModel,
                          basis: ProductBasis,
                          initial: list[tuple[int, float]],
                          merge_tol: float = 1e-10,
                          min_intensity: float = 0.0) -> Spectrum:
    """Sticks at w = E_f - E_i > 0 with intensity sum_i w_i |<i|mu x 1|f>|^2.

    initial lists (eigenstate index, weight) with weights summing to one;
    degenerate sticks are merged within merge_tol.
    """
    wsum = sum(w for _, w in initial)
    if abs(wsum - 1.0) > 1e-8:
        raise ModelError(f"initial-state weights must sum to 1, got {wsum}")
    mu = mu_operator(model, basis)
    positions, intensities, labels_i, labels_f = [], [], [], []
    for i, w in initial:
        amps = sol.eigenvectors.T @ (mu @ sol.eigenvectors[:, i])
        omegas = sol.eigenvalues - sol.eigenvalues[i]
        lab_i = basis.label(int(np.argmax(np.abs(sol.eigenvectors[:, i]))), model)
        for f in range(sol.size):
            if omegas[f] <= merge_tol:
                continue
            inten = w * amps[f] ** 2
            if inten == 0.0:
                continue
            positions.append(omegas[f])
            intensities.append(inten)
            labels_i.append(lab_i)
            labels_f.append(basis.label(int(np.argmax(np.abs(sol.eigenvectors[:, f]))), model))
    return make_stick_spectrum(
        positions, intensities, merge_tol=merge_tol, min_intensity=min_intensity,
        labels_i=labels_i, labels_f=labels_f,
        meta={"framework": "quantum_static"},
    )


@dataclass
class QuantumState:
    """Interaction-picture coefficients over a product basis at one time."""

    coeffs: np.ndarray
    t: float
    basis: ProductBasis

    def schroedinger_coeffs(self, model: MolecularModel, cav: CavityParams) -> np.ndarray:
        ks, ns = self.basis.arrays()
        eps = model.energies[ks] + ns * cav.omega_c
        return np.exp(-1j * eps * self.t) * self.coeffs


def photon_observables(state: QuantumState, cav: CavityParams,
                       model: MolecularModel | None = None) -> tuple[float, float]:
    """(<q>, <q^2>) via ladder-operator matrix elements.

    The interaction-picture phases matter whenever t != 0, in which case the
    model is needed to restore the Schroedinger-picture coefficients.
    """
    if state.t != 0.0:
        if model is None:
            raise ModelError("photon_observables needs the model when t != 0")
        psi = state.schroedinger_coeffs(model, cav)
    else:
        psi = state.coeffs
    q = q_operator(cav, state.basis)
    q2 = q2_operator(cav, state.basis)
    return (float(np.vdot(psi, q @ psi).real), float(np.vdot(psi, q2 @ psi).real))


def propagate_quantum(model: MolecularModel, cav: CavityParams, pulse: KickPulse,
                      init: tuple[int, int], t_end: float, dt: float,
                      record_stride: int = 1,
                      basis: ProductBasis | None = None) -> Trajectory:
    """Integrate d|Psi>/dt = -i (H + f(t) mu) |Psi> from |psi_init, N_init>.

    Returns the trajectory of <mu(t)>, per-product-state populations, total
    energy <H>, and the photon observables <q>, <q^2>.
    """
    basis = basis or ProductBasis.full(model, cav.n_fock_max)
    if init not in basis.entries:
        raise ModelError(f"initial entry {init} not in the basis")
    ks, ns = basis.arrays()
    eps = model.energies[ks] + ns * cav.omega_c
    de_max = float(eps.max() - eps.min())
    if dt * (de_max + cav.omega_c) >= 0.1:
        raise ModelError(
            f"dt={dt} too coarse for the fastest phase; need "
            f"dt < {0.1 / (de_max + cav.omega_c):.3g}"
        )

    h = assemble_hamiltonian(model, cav, basis)
    v_int = h - np.diag(eps)          # interaction part (dipole + optional dse)
    mu = mu_operator(model, basis)
    q_op = q_operator(cav, basis)
    q2_op = q2_operator(cav, basis)

    def rhs(t, c):
        phase = np.exp(1j * eps * t)
        psi = np.conj(phase) * c
        w_psi = v_int @ psi
        f = pulse(t)
        if f != 0.0:
            w_psi = w_psi + f * (mu @ psi)
        return -1j * phase * w_psi

    n_steps = int(round(t_end / dt))
    n_rec = n_steps // record_stride + 1
    size = basis.size
    times = np.empty(n_rec)
    dipole = np.empty(n_rec)
    pops = np.empty((n_rec, size))
    q_ser = np.empty(n_rec)
    q2_ser = np.empty(n_rec)
    energy = np.empty(n_rec)
    rec = {"i": 0, "norm_drift": 0.0}

    def observer(t, c):
        i = rec["i"]
        psi = np.exp(-1j * eps * t) * c
        times[i] = t
        dipole[i] = np.vdot(psi, mu @ psi).real
        pops[i] = np.abs(c) ** 2
        q_ser[i] = np.vdot(psi, q_op @ psi).real
        q2_ser[i] = np.vdot(psi, q2_op @ psi).real
        energy[i] = np.vdot(psi, h @ psi).real
        rec["norm_drift"] = max(rec["norm_drift"], abs(float(np.sum(pops[i])) - 1.0))
        rec["i"] += 1

    c0 = np.zeros(size, complex)
    c0[basis.index(*init)] = 1.0
    integrate(rhs, c0, 0.0, dt, n_steps, observer, record_stride)

    if rec["norm_drift"] > NORM_TOL:
        raise IntegrationError(
            f"norm drift {rec['norm_drift']:.2e} exceeds {NORM_TOL}; reduce dt"
        )
    _check_linear_response(times, pops, basis.index(*init), pulse)

    traj = Trajectory(
        kind="quantum", times=times, dipole=dipole, populations=pops,
        energy=energy,
        pop_labels=[basis.label(i, model) for i in range(size)],
        q_expect=q_ser, q2_expect=q2_ser,
        meta={
            "dt": dt, "t_end": n_steps * dt, "record_stride": record_stride,
            "init": init, "pulse_support_end": pulse.support_end,
            "pulse_t0": pulse.t0, "pulse_sigma": pulse.sigma,
            "norm_drift": rec["norm_drift"],
            "omega_c": cav.omega_c, "g": cav.g, "include_dse": cav.include_dse,
            "n_fock_max": cav.n_fock_max,
        },
    )
    traj.meta["energy_drift_post_pulse"] = post_pulse_energy_drift(traj)
    return traj


def _check_linear_response(times, pops, init_col, pulse: KickPulse):
    if pulse.amplitude == 0.0 or not math.isfinite(pulse.max_excitation):
        return
    after = np.searchsorted(times, pulse.support_end)
    if after >= times.size:
        return
    excited = 1.0 - pops[after, init_col]
    if excited > pulse.max_excitation:
        raise IntegrationError(
            f"post-kick excited population {excited:.3e} exceeds the pulse "
            f"linear-response bound {pulse.max_excitation}; lower the amplitude "
            "or raise KickPulse.max_excitation"
        )
