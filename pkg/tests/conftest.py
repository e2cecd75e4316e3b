import pytest
from hypothesis import settings

from recurfrac.ifs import MIDDLE_THIRD, THREE_FIFTHS

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def mt():
    return MIDDLE_THIRD


@pytest.fixture(params=[MIDDLE_THIRD, THREE_FIFTHS], ids=["middle_third", "three_fifths"])
def config(request):
    return request.param
