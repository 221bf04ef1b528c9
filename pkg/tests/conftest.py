import pytest

from okb.demo import demo_path, load_demo


@pytest.fixture(scope="session")
def geometry():
    return load_demo("geometry")


@pytest.fixture(scope="session")
def numbers():
    return load_demo("numbers")


@pytest.fixture(scope="session")
def ints():
    return load_demo("ints")


@pytest.fixture(scope="session")
def vehicles():
    return load_demo("vehicles")


@pytest.fixture(scope="session")
def mixed():
    return load_demo("mixed")


@pytest.fixture
def kb_file():
    def path(name):
        return str(demo_path(name))

    return path
