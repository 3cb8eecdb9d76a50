import pytest

from twinpol import (CavityParams, KickPulse, MorseParams, build_morse_rovib,
                     build_three_level, propagate_classical, propagate_quantum)

THREE_LEVEL = dict(e0=0.0, e1=2e-3, e2=10e-3, mu02=1.0, mu12=1.0)
OMEGA_C = 1e-2
G = 2e-4


@pytest.fixture(scope="session")
def model3():
    return build_three_level(**THREE_LEVEL)


@pytest.fixture(scope="session")
def cav():
    # self-energy off throughout the 3-level protocol for comparability with
    # the degenerate-block values
    return CavityParams(omega_c=OMEGA_C, g=G, include_dse=False, n_fock_max=2)


@pytest.fixture(scope="session")
def pulse():
    return KickPulse()


@pytest.fixture(scope="session")
def hcl_model():
    return build_morse_rovib(MorseParams())


@pytest.fixture(scope="session")
def classical_r_traj(model3, cav, pulse):
    """Resonant-branch classical run, resolution adequate for module tests."""
    return propagate_classical(model3, cav, pulse, 0, t_end=1.6e5, dt=1.0,
                               record_stride=8)


@pytest.fixture(scope="session")
def classical_p_traj(model3, cav, pulse):
    return propagate_classical(model3, cav, pulse, 1, t_end=1.6e5, dt=1.0,
                               record_stride=8)


@pytest.fixture(scope="session")
def quantum_p_traj(model3, cav, pulse):
    return propagate_quantum(model3, cav, pulse, (1, 0), t_end=1.6e5, dt=1.0,
                             record_stride=8)
