import pytest

from decoscan import build_gas_parameters


@pytest.fixture(scope="session")
def working_gas():
    """The working gas: 1 uK, 1e11 cm^-3, 24.3 g/mol buffer atoms around
    15.0 g/mol particles."""
    return build_gas_parameters(1e-6, 1e11, 24.3, 15.0)
