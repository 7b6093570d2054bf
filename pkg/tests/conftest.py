import pytest

from permlat import pgroup as pg


@pytest.fixture(scope="session")
def c2():
    return pg.build_group(2, generators=[[1, 0]], generator_names=["s"])


@pytest.fixture(scope="session")
def c4():
    return pg.build_group(2, generators=[[1, 2, 3, 0]], generator_names=["g"])


@pytest.fixture(scope="session")
def klein():
    return pg.build_group(2, generators=[[1, 0, 3, 2], [2, 3, 0, 1]],
                          generator_names=["a", "b"])


@pytest.fixture(scope="session")
def e8():
    perms = [[i ^ (1 << bit) for i in range(8)] for bit in range(3)]
    return pg.build_group(2, generators=perms, generator_names=["n", "c", "m"])


@pytest.fixture(scope="session")
def c3():
    return pg.build_group(3, generators=[[1, 2, 0]], generator_names=["t"])


@pytest.fixture(scope="session")
def q8():
    from permlat.corpus import quaternion_group

    return quaternion_group()


@pytest.fixture(scope="session")
def d4():
    from permlat.corpus import dihedral_group

    return dihedral_group(4)
