"""Cavity-free molecular models.

Two model families are supported: a 3-level Lambda system defined directly by
its energies and transition dipoles, and a rovibrational diatomic built from a
Morse potential curve solved on a radial grid.  Both produce the same
MolecularModel container (eigenenergies, dipole matrix, state labels) that
every solver in the package consumes.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ConvergenceError, ModelError
from .units import CM1_PER_HARTREE, KB_HARTREE_PER_K, cm1_to_au


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class MolecularModel:
    """Cavity-free eigenstates of one emitter.

    energies are in hartree, referenced to the ground state; dipole is the
    real symmetric matrix of <k|mu_Z|l> in atomic units; labels carries one
    quantum-number dict per state ({"index": k} for level models,
    {"v": v, "J": J, "M": M} for rovibrational ones).
    """

    energies: np.ndarray
    dipole: np.ndarray
    labels: tuple[dict, ...]

    def __post_init__(self):
        object.__setattr__(self, "energies", _freeze(np.asarray(self.energies, float)))
        object.__setattr__(self, "dipole", _freeze(np.asarray(self.dipole, float)))
        object.__setattr__(self, "labels", tuple(dict(l) for l in self.labels))
        self.validate()

    @property
    def n_states(self) -> int:
        return self.energies.size

    def validate(self):
        n = self.n_states
        if self.dipole.shape != (n, n):
            raise ModelError(f"dipole matrix shape {self.dipole.shape} does not match {n} states")
        if len(self.labels) != n:
            raise ModelError("one label per state required")
        if not np.all(np.isfinite(self.energies)) or not np.all(np.isfinite(self.dipole)):
            raise ModelError("energies and dipoles must be finite")
        if not np.allclose(self.dipole, self.dipole.T, atol=1e-12):
            raise ModelError("dipole matrix must be symmetric")
        if self.is_rovib():
            for i in range(n):
                for j in range(n):
                    if self.dipole[i, j] == 0.0:
                        continue
                    li, lj = self.labels[i], self.labels[j]
                    if abs(li["J"] - lj["J"]) != 1 or li["M"] != lj["M"]:
                        raise ModelError(
                            f"dipole entry between {li} and {lj} violates the "
                            "dJ = +-1, dM = 0 selection rule"
                        )

    def is_rovib(self) -> bool:
        return bool(self.labels) and "v" in self.labels[0]

    def label_str(self, k: int) -> str:
        lab = self.labels[k]
        if "v" in lab:
            return f"v{lab['v']}J{lab['J']}M{lab['M']}"
        return f"psi{lab['index']}"

    def state_index(self, **quantum_numbers) -> int:
        """Index of the unique state whose label matches the given numbers."""
        hits = [
            k for k, lab in enumerate(self.labels)
            if all(lab.get(key) == val for key, val in quantum_numbers.items())
        ]
        if len(hits) != 1:
            raise ModelError(f"{quantum_numbers} matches {len(hits)} states")
        return hits[0]

    def transition_frequency(self, i: int, f: int) -> float:
        return float(self.energies[f] - self.energies[i])

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "energies": self.energies.tolist(),
            "dipole": self.dipole.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "MolecularModel":
        return cls(
            energies=np.array(doc["energies"], float),
            dipole=np.array(doc["dipole"], float),
            labels=tuple(doc["labels"]),
        )

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def load_json(cls, path) -> "MolecularModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def content_hash(self) -> str:
        """Deterministic sha1 of the canonical JSON form, for run manifests."""
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()


@dataclass(frozen=True)
class MorseParams:
    """Morse curve V(R) = D_e (exp(-2a(R-R_e)) - 2 exp(-a(R-R_e)) + 1).

    d_e_cm1 is the dissociation energy in cm^-1; alpha in bohr^-1; r_e and the
    atomic masses in atomic units.  dipole_curve holds polynomial coefficients
    of mu(R) about R_e, lowest order first; the defaults are placeholders with
    realistic magnitudes (they rescale intensities, not positions).
    """

    d_e_cm1: float = 37209.369
    alpha: float = 0.993099
    r_e: float = 2.40855
    m1: float = 1837.1522
    m2: float = 63744.3019
    v_max: int = 1
    j_max: int = 10
    dipole_curve: tuple[float, ...] = (0.43, 0.30)

    def __post_init__(self):
        if min(self.d_e_cm1, self.alpha, self.r_e, self.m1, self.m2) <= 0:
            raise ModelError("Morse parameters must be positive")
        if self.v_max < 0 or self.j_max < 0:
            raise ModelError("v_max and j_max must be nonnegative")

    @property
    def d_e(self) -> float:
        return cm1_to_au(self.d_e_cm1)

    @property
    def reduced_mass(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    def potential(self, r: np.ndarray) -> np.ndarray:
        x = np.exp(-self.alpha * (np.asarray(r, float) - self.r_e))
        return self.d_e * (x * x - 2.0 * x + 1.0)

    def dipole_function(self, r: np.ndarray) -> np.ndarray:
        dr = np.asarray(r, float) - self.r_e
        out = np.zeros_like(dr)
        for n, c in enumerate(self.dipole_curve):
            out += c * dr**n
        return out

    # Closed-form anharmonic constants used as an independent cross-check of
    # the grid eigensolver (valid for the pure J = 0 Morse problem).
    @property
    def omega_e(self) -> float:
        return self.alpha * math.sqrt(2.0 * self.d_e / self.reduced_mass)

    @property
    def omega_e_xe(self) -> float:
        return self.omega_e**2 / (4.0 * self.d_e)

    def analytic_level(self, v: int) -> float:
        """Morse eigenvalue above the well minimum for J = 0."""
        return self.omega_e * (v + 0.5) - self.omega_e_xe * (v + 0.5) ** 2

    @property
    def rotational_constant(self) -> float:
        return 1.0 / (2.0 * self.reduced_mass * self.r_e**2)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform sine-basis DVR grid on [r_min, r_max] (endpoints excluded)."""

    r_min: float = 1.2
    r_max: float = 6.0
    n_points: int = 400
    convergence_tol_cm1: float = 1e-3

    def __post_init__(self):
        if self.r_max <= self.r_min:
            raise ModelError("r_max must exceed r_min")
        if self.n_points < 8:
            raise ModelError("grid needs at least 8 points")

    def points(self, n_points: int | None = None) -> np.ndarray:
        p = self.n_points if n_points is None else n_points
        edges = np.linspace(self.r_min, self.r_max, p + 2)
        return edges[1:-1]


@dataclass(frozen=True)
class ThermalWeights:
    """Boltzmann populations over the states of one model."""

    temperature: float
    weights: np.ndarray
    subset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", _freeze(np.asarray(self.weights, float)))
        if np.any(self.weights < 0):
            raise ModelError("weights must be nonnegative")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ModelError("weights must sum to one")


def build_three_level(e0: float, e1: float, e2: float,
                      mu02: float, mu12: float) -> MolecularModel:
    """Lambda-type 3-level model: two lower states coupled to one upper state.

    The 0->1 transition is dipole-dark; couplings are mu02 on 0<->2 and mu12
    on 1<->2.  Energies are referenced so the ground state sits at zero.
    """
    if not (e0 < e1 < e2):
        raise ModelError(f"energies must be strictly ordered, got {(e0, e1, e2)}")
    energies = np.array([e0, e1, e2], float) - e0
    dipole = np.zeros((3, 3))
    dipole[0, 2] = dipole[2, 0] = mu02
    dipole[1, 2] = dipole[2, 1] = mu12
    labels = tuple({"index": k} for k in range(3))
    return MolecularModel(energies=energies, dipole=dipole, labels=labels)


def _sine_dvr_kinetic(n_points: int, length: float, mass: float) -> np.ndarray:
    """Particle-in-a-box (sine basis) DVR kinetic-energy matrix.

    Grid points are x_i = a + i*(b-a)/N for i = 1..N-1 with N = n_points + 1
    intervals; spectrally convergent for bound states vanishing at the walls.
    """
    n_box = n_points + 1
    i = np.arange(1, n_points + 1)
    pref = math.pi**2 / (4.0 * mass * length**2)
    diff = i[:, None] - i[None, :]
    summ = i[:, None] + i[None, :]
    with np.errstate(divide="ignore"):
        t = (-1.0) ** diff * (
            1.0 / np.sin(math.pi * diff / (2 * n_box)) ** 2
            - 1.0 / np.sin(math.pi * summ / (2 * n_box)) ** 2
        )
    np.fill_diagonal(
        t, (2.0 * n_box**2 + 1.0) / 3.0 - 1.0 / np.sin(math.pi * i / n_box) ** 2
    )
    return pref * t


def _solve_radial(params: MorseParams, grid: RadialGrid, j: int,
                  n_points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenpairs of the effective radial Hamiltonian for one J."""
    r = grid.points(n_points)
    mass = params.reduced_mass
    v_eff = params.potential(r) + j * (j + 1) / (2.0 * mass * r**2)
    h = _sine_dvr_kinetic(n_points, grid.r_max - grid.r_min, mass)
    h[np.diag_indices_from(h)] += v_eff
    evals, evecs = np.linalg.eigh(h)
    n_keep = params.v_max + 1
    evals = evals[:n_keep]
    evecs = evecs[:, :n_keep]
    # classically forbidden walls: retained states must live below the edges
    edge = min(v_eff[0], v_eff[-1])
    if np.any(evals >= edge):
        raise ConvergenceError(
            f"grid [{grid.r_min}, {grid.r_max}] does not bound the requested "
            f"levels for J={j}; raise r_max or lower v_max"
        )
    # deterministic sign: positive lobe at the outermost maximum
    for k in range(n_keep):
        peak = np.argmax(np.abs(evecs[:, k]))
        if evecs[peak, k] < 0:
            evecs[:, k] = -evecs[:, k]
    return evals, evecs, r


def z_direction_cosine(j: int, jp: int, m: int) -> float:
    """<J', M| cos(theta) |J, M> for a linear rotor (Z polarization)."""
    if jp == j + 1:
        return math.sqrt(((j + 1) ** 2 - m**2) / ((2 * j + 1) * (2 * j + 3)))
    if jp == j - 1 and j > 0:
        return math.sqrt((j**2 - m**2) / ((2 * j - 1) * (2 * j + 1)))
    return 0.0


def build_morse_rovib(params: MorseParams,
                      grid: RadialGrid | None = None,
                      check_convergence: bool = True) -> MolecularModel:
    """Rovibrational model |v, J, M> from the Morse curve.

    Solves the radial equation with the J-dependent centrifugal term on the
    DVR grid, assembles Z-polarized dipole entries
    <v'J'M|mu|vJM> = <v'J'|mu(R)|vJ> * A(J, J', M), and shifts energies so
    E(v=0, J=0) = 0.  A grid-doubling re-solve guards convergence; drift
    above grid.convergence_tol_cm1 raises ConvergenceError.
    """
    grid = grid or RadialGrid()
    if params.j_max < 1:
        raise ModelError("j_max must be at least 1 for a dipole-active model")

    levels: dict[int, np.ndarray] = {}
    radial: dict[int, np.ndarray] = {}
    r_pts = grid.points()
    for j in range(params.j_max + 1):
        evals, evecs, _ = _solve_radial(params, grid, j, grid.n_points)
        if check_convergence:
            evals_fine, _, _ = _solve_radial(params, grid, j, 2 * grid.n_points)
            drift = np.max(np.abs(evals - evals_fine)) * CM1_PER_HARTREE
            if drift > grid.convergence_tol_cm1:
                raise ConvergenceError(
                    f"radial eigenvalues drift {drift:.2e} cm^-1 on grid "
                    f"doubling (tol {grid.convergence_tol_cm1}); refine the grid"
                )
        levels[j] = evals
        radial[j] = evecs

    mu_r = params.dipole_function(r_pts)

    # radial dipole integrals <v' J'| mu(R) |v J> via DVR quadrature
    def radial_dipole(vp, jp, v, j):
        return float(radial[jp][:, vp] @ (mu_r * radial[j][:, v]))

    states = [
        (v, j, m)
        for v in range(params.v_max + 1)
        for j in range(params.j_max + 1)
        for m in range(-j, j + 1)
    ]
    index = {s: k for k, s in enumerate(states)}
    n = len(states)
    energies = np.array([levels[j][v] for (v, j, m) in states])
    energies -= levels[0][0]

    dipole = np.zeros((n, n))
    for (v, j, m), k in index.items():
        for vp in range(params.v_max + 1):
            for jp in (j - 1, j + 1):
                if jp < 0 or jp > params.j_max or abs(m) > jp:
                    continue
                kp = index[(vp, jp, m)]
                dipole[kp, k] = radial_dipole(vp, jp, v, j) * z_direction_cosine(j, jp, m)
    dipole = 0.5 * (dipole + dipole.T)

    labels = tuple({"v": v, "J": j, "M": m} for (v, j, m) in states)
    return MolecularModel(energies=energies, dipole=dipole, labels=labels)


def mu_squared_matrix(model: MolecularModel) -> np.ndarray:
    """Matrix of mu^2 via resolution of identity over the model basis.

    Equivalent to the matrix square of the dipole matrix; exact only to the
    extent the retained basis saturates the sum over intermediate states.
    """
    m2 = model.dipole @ model.dipole
    return 0.5 * (m2 + m2.T)


def boltzmann_weights(model: MolecularModel, temperature: float,
                      subset: Sequence[int] | None = None) -> ThermalWeights:
    """Normalized Boltzmann weights over a state subset.

    Each |v, J, M> state counts individually; M degeneracy enters through the
    enumeration rather than an explicit 2J+1 factor.
    """
    if temperature <= 0:
        raise ModelError("temperature must be positive")
    idx = np.arange(model.n_states) if subset is None else np.asarray(list(subset), int)
    if idx.size == 0:
        raise ModelError("state subset is empty")
    e = model.energies[idx]
    w = np.exp(-(e - e.min()) / (KB_HARTREE_PER_K * temperature))
    w /= w.sum()
    weights = np.zeros(model.n_states)
    weights[idx] = w
    return ThermalWeights(temperature=temperature, weights=weights,
                          subset=tuple(int(i) for i in idx))


# -- model config files ---------------------------------------------------

_UNIT_FACTORS = {
    "au": 1.0,
    "hartree": 1.0,
    "bohr": 1.0,
    "1/bohr": 1.0,
    "cm-1": 1.0 / CM1_PER_HARTREE,
    "k": 1.0,  # kelvin values stay in kelvin
}


def parse_quantity(raw: str, key: str = "?") -> float:
    """Parse 'value [unit]' with unit suffixes au, hartree, cm-1, bohr, K."""
    parts = raw.split()
    try:
        value = float(parts[0])
    except (ValueError, IndexError):
        raise ConfigError(f"{key}: cannot parse number from {raw!r}") from None
    if len(parts) == 1:
        return value
    if len(parts) > 2:
        raise ConfigError(f"{key}: expected 'value unit', got {raw!r}")
    unit = parts[1].lower()
    if unit not in _UNIT_FACTORS:
        raise ConfigError(f"{key}: unknown unit {parts[1]!r} "
                          f"(known: {', '.join(sorted(_UNIT_FACTORS))})")
    return value * _UNIT_FACTORS[unit]


def model_from_config(parser: configparser.ConfigParser) -> MolecularModel:
    """Build a model from [three_level] or [morse] sections of a config."""
    has_3l = parser.has_section("three_level")
    has_morse = parser.has_section("morse")
    if has_3l == has_morse:
        raise ConfigError("config needs exactly one of [three_level] or [morse]")
    if has_3l:
        sec = parser["three_level"]
        known = {"e0", "e1", "e2", "mu02", "mu12"}
        _reject_unknown(sec, known, "three_level")
        return build_three_level(
            parse_quantity(sec.get("e0", "0 au"), "e0"),
            parse_quantity(sec.get("e1", "2e-3 au"), "e1"),
            parse_quantity(sec.get("e2", "10e-3 au"), "e2"),
            parse_quantity(sec.get("mu02", "1.0 au"), "mu02"),
            parse_quantity(sec.get("mu12", "1.0 au"), "mu12"),
        )
    sec = parser["morse"]
    known = {"d_e", "alpha", "r_e", "m1", "m2", "v_max", "j_max",
             "dipole_mu0", "dipole_mu1", "r_min", "r_max", "n_points"}
    _reject_unknown(sec, known, "morse")
    params = MorseParams(
        d_e_cm1=parse_quantity(sec.get("d_e", "37209.369 cm-1"), "d_e") * CM1_PER_HARTREE,
        alpha=parse_quantity(sec.get("alpha", "0.993099 1/bohr"), "alpha"),
        r_e=parse_quantity(sec.get("r_e", "2.40855 bohr"), "r_e"),
        m1=parse_quantity(sec.get("m1", "1837.1522 au"), "m1"),
        m2=parse_quantity(sec.get("m2", "63744.3019 au"), "m2"),
        v_max=sec.getint("v_max", 1),
        j_max=sec.getint("j_max", 10),
        dipole_curve=(
            parse_quantity(sec.get("dipole_mu0", "0.43 au"), "dipole_mu0"),
            parse_quantity(sec.get("dipole_mu1", "0.30 au"), "dipole_mu1"),
        ),
    )
    grid = RadialGrid(
        r_min=parse_quantity(sec.get("r_min", "1.2 bohr"), "r_min"),
        r_max=parse_quantity(sec.get("r_max", "6.0 bohr"), "r_max"),
        n_points=sec.getint("n_points", 400),
    )
    return build_morse_rovib(params, grid)


def thermal_from_config(parser: configparser.ConfigParser,
                        model: MolecularModel) -> ThermalWeights | None:
    """Read the optional [thermal] section (temperature plus state filter)."""
    if not parser.has_section("thermal"):
        return None
    sec = parser["thermal"]
    _reject_unknown(sec, {"temperature", "v"}, "thermal")
    temperature = parse_quantity(sec.get("temperature", "300 K"), "temperature")
    subset = None
    if "v" in sec:
        v_sel = sec.getint("v")
        subset = [k for k, lab in enumerate(model.labels) if lab.get("v") == v_sel]
    return boltzmann_weights(model, temperature, subset)


def _reject_unknown(section, known: set, name: str):
    for key in section:
        if key not in known:
            raise ConfigError(f"[{name}] has unknown key {key!r} "
                              f"(known: {', '.join(sorted(known))})")


def load_model_config(path) -> MolecularModel:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    return model_from_config(parser)
