import numpy as np
import pytest

from swarm_eq.model import InteractionParams, PhasePoint, classify_region


def params_from_phase(A, B, M=2.0, eta=1.0):
    """Unit self-coefficients: a_c = A, b_c = B, M1 = M, M2 = 1."""
    return InteractionParams(a_s=1.0, a_c=A, b_s=1.0, b_c=B, M1=M, M2=1.0, eta=eta)


def draw_phase_in_regions(rng, regions, M=2.0, n=1, box=(0.05, 5.0)):
    """Rejection-sample n phase points whose region tag is in ``regions``."""
    names = {r if isinstance(r, str) else r.value for r in regions}
    out = []
    while len(out) < n:
        A = rng.uniform(*box)
        B = rng.uniform(*box)
        tag = classify_region(PhasePoint(A=A, B=B, M=M))
        if tag.value in names:
            out.append((A, B))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
