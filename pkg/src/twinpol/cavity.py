"""Cavity-mode parameters, the kick pulse, and the trajectory container."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class CavityParams:
    """Single cavity mode: frequency omega_c, coupling g, optional dipole
    self-energy term, and the Fock truncation used by the quantized model."""

    omega_c: float
    g: float
    include_dse: bool = True
    n_fock_max: int = 2

    def __post_init__(self):
        if self.omega_c <= 0:
            raise ModelError("omega_c must be positive")
        if self.g < 0:
            raise ModelError("coupling g must be nonnegative")
        if self.n_fock_max < 1:
            raise ModelError("n_fock_max must be at least 1")

    @property
    def dse_prefactor(self) -> float:
        return self.g**2 / self.omega_c if self.include_dse else 0.0


@dataclass(frozen=True)
class KickPulse:
    """Gaussian field impulse f(t) = amplitude * exp(-(t-t0)^2 / 2 sigma^2).

    Weak and temporally sharp, so it is spectrally flat across the transitions
    of interest; max_excitation bounds the post-kick excited population the
    propagators will accept (linear-response guard).  amplitude = 0 disables
    the kick entirely.
    """

    amplitude: float = 1e-4
    t0: float = 25.0
    sigma: float = 5.0
    max_excitation: float = 1e-2

    def __post_init__(self):
        if self.sigma <= 0:
            raise ModelError("pulse width sigma must be positive")

    def __call__(self, t: float) -> float:
        if self.amplitude == 0.0:
            return 0.0
        x = (t - self.t0) / self.sigma
        return self.amplitude * math.exp(-0.5 * x * x)

    @property
    def support_end(self) -> float:
        """Time after which |f(t)| < 1e-15."""
        if self.amplitude == 0.0 or abs(self.amplitude) <= 1e-15:
            return 0.0
        return self.t0 + self.sigma * math.sqrt(2.0 * math.log(abs(self.amplitude) / 1e-15))

    @classmethod
    def off(cls) -> "KickPulse":
        return cls(amplitude=0.0)


@dataclass
class Trajectory:
    """Time series produced by either propagator on a uniform grid.

    populations holds one column per basis state (molecular states for the
    classical model, product states for the quantum one); the field columns
    are (q, p) classically and (<q>, <q^2>) quantum mechanically.
    """

    kind: str                       # "classical" | "quantum"
    times: np.ndarray
    dipole: np.ndarray
    populations: np.ndarray
    energy: np.ndarray
    pop_labels: list[str]
    q_series: np.ndarray | None = None
    p_series: np.ndarray | None = None
    q_expect: np.ndarray | None = None
    q2_expect: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.times.size
        series = [self.dipole, self.energy, self.q_series, self.p_series,
                  self.q_expect, self.q2_expect]
        for s in series:
            if s is not None and s.shape[0] != n:
                raise ModelError("all trajectory series must share the time grid")
        if self.populations.shape != (n, len(self.pop_labels)):
            raise ModelError("populations shape must be (n_times, n_states)")
        if np.iscomplexobj(self.dipole):
            raise ModelError("dipole series must be real")

    @property
    def dt_sample(self) -> float:
        return float(self.times[1] - self.times[0])

    def post_pulse_mask(self) -> np.ndarray:
        return self.times >= self.meta.get("pulse_support_end", 0.0)

    def to_csv(self, path):
        cols = ["t", "mu"]
        data = [self.times, self.dipole]
        if self.kind == "classical":
            cols += ["q", "p"]
            data += [self.q_series, self.p_series]
        else:
            cols += ["q_expect", "q2_expect"]
            data += [self.q_expect, self.q2_expect]
        cols += [f"p_{lab}" for lab in self.pop_labels]
        data += [self.populations[:, k] for k in range(self.populations.shape[1])]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for row in zip(*data):
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
