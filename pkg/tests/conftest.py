import pytest

import tangencylab as tl


@pytest.fixture(scope="session")
def ref():
    return tl.reference_system()


@pytest.fixture(scope="session")
def slow():
    return tl.slow_system()


@pytest.fixture(scope="session")
def tilted():
    return tl.tilted_system()


@pytest.fixture(scope="session")
def sn10(ref):
    return tl.build_sn(ref, 10)


@pytest.fixture(scope="session")
def cascade12(ref):
    return tl.run_cascade(ref, 12)


@pytest.fixture(scope="session")
def slope_search(ref):
    return tl.find_s_n0(ref)
