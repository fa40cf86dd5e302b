import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def full_space_file(tmp_path):
    from kakeya_lab.kakeya import rspace, write_points

    sp = rspace(2, 2, 2)
    path = tmp_path / "full_space.pts"
    write_points(path, sp, sp.points())
    return path
