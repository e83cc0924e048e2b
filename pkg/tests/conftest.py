import warnings

import pytest

from jacobi_cohomology.verify import delta_form


@pytest.fixture(scope="session")
def delta():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return delta_form()
