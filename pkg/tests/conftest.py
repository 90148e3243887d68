import numpy as np
import pytest

from svmflow.params import PhysicalParams
from svmflow.state import CellState, det2, inv2


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture
def params():
    return PhysicalParams(g=10.0, G=1.0, lam=0.1, K=0.0)


def random_states(rng, n, h_range=(0.3, 3.0), u_scale=1.0, equilibrium=False,
                  involution=False):
    """Batch of random admissible states with moderate condition numbers.

    equilibrium=True sets A = F^-1 F^-T and A_cc = H^-2 (zero source);
    involution=True rescales F so that H * det F = 1 with det F > 0.
    """
    H = rng.uniform(*h_range, size=n)
    U = u_scale * rng.normal(size=(n, 2))

    def rot(theta):
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)

    # orientation-preserving F with controlled condition number
    sv = rng.uniform(0.4, 2.2, size=(n, 2))
    F = rot(rng.uniform(0, 2 * np.pi, n)) * sv[:, None, :] \
        @ rot(rng.uniform(0, 2 * np.pi, n))
    if involution or equilibrium:
        d = det2(F)
        F /= np.sqrt(d * H)[:, None, None]
    if equilibrium:
        Finv = inv2(F)
        A = Finv @ np.swapaxes(Finv, -1, -2)
        A_cc = 1.0 / H ** 2
    else:
        M = 0.7 * rng.normal(size=(n, 2, 2))
        A = np.swapaxes(M, -1, -2) @ M + 0.3 * np.eye(2)
        A_cc = rng.uniform(0.25, 4.0, size=n)
    return CellState(H=H, U=U, F=F, A=A, A_cc=A_cc)


def state_row(s, i):
    """Extract one scalar state from a batch."""
    return CellState(H=s.H[i], U=s.U[i], F=s.F[i], A=s.A[i], A_cc=s.A_cc[i])
