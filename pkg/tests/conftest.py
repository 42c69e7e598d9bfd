import pytest

from lvsweep.model import EcologyParams


@pytest.fixture(scope="session")
def sweep_params() -> EcologyParams:
    """Reference parameter set satisfying the no-coexistence assumption.

    nbar_A = 1, nbar_a = 2, S_aA = 1.5, S_Aa = -0.8.
    """
    return EcologyParams(
        f_A=1.0, f_a=2.0, D_A=0.0, D_a=0.0,
        C_AA=1.0, C_Aa=0.9, C_aA=0.5, C_aa=1.0,
    )


@pytest.fixture(scope="session")
def halfsel_params() -> EcologyParams:
    """Parameter set with S_aA/f_a = 1/2 (nbar_A = 1, S_aA = 1, S_Aa = -0.8)."""
    return EcologyParams(
        f_A=1.0, f_a=2.0, D_A=0.0, D_a=0.0,
        C_AA=1.0, C_Aa=0.9, C_aA=1.0, C_aa=1.0,
    )
