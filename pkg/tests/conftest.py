import pytest
from hypothesis import HealthCheck, settings

from ebst import kernels

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

try:
    from ebst import _kernels  # noqa: F401

    BACKENDS = ["python", "cython"]
except ImportError:
    BACKENDS = ["python"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run a test once per kernel backend."""
    prev = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(prev)
