import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hessecubic import ThetaContext, hesse_psi


@pytest.fixture(scope="session")
def ctx_i():
    return ThetaContext(tau=1j)


@pytest.fixture(scope="session")
def ctx_c():
    return ThetaContext(tau=0.2 + 1.3j)


@pytest.fixture(scope="session")
def psi_i(ctx_i):
    return hesse_psi(ctx_i)


@pytest.fixture(scope="session")
def psi_c(ctx_c):
    return hesse_psi(ctx_c)
