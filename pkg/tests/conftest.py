import pytest

from growthlab.models import ActionConstants, GroupModel
from growthlab.space_service import SpaceModel
from growthlab.word_service import make_generating_set, parse_words


@pytest.fixture(scope="session")
def f2():
    return GroupModel.free_group(2)


@pytest.fixture(scope="session")
def z():
    return GroupModel.free_group(1)


@pytest.fixture(scope="session")
def fp23():
    return GroupModel.free_product([2, 3])


@pytest.fixture(scope="session")
def bs231():
    return GroupModel.baumslag_solitar(2, 3, extra_rank=1)


@pytest.fixture(scope="session")
def constants():
    return ActionConstants(delta=0, D=1, M=2)


@pytest.fixture(scope="session")
def f2_space(f2):
    return SpaceModel(f2)


@pytest.fixture(scope="session")
def fp23_space(fp23):
    return SpaceModel(fp23)


@pytest.fixture(scope="session")
def f2_std(f2):
    return make_generating_set(f2, parse_words("a,b", f2))


@pytest.fixture(scope="session")
def fp23_std(fp23):
    return make_generating_set(fp23, parse_words("s,t", fp23))


@pytest.fixture(scope="session")
def f2_separators(f2_space, constants, f2_std):
    from growthlab.services.separator_service import SeparatorService

    service = SeparatorService(f2_space, constants)
    return service, service.build_separators(f2_std)


@pytest.fixture(scope="session")
def fp23_separators(fp23_space, constants, fp23_std):
    from growthlab.services.separator_service import SeparatorService

    service = SeparatorService(fp23_space, constants)
    return service, service.build_separators(fp23_std)
