import pytest

from bipotkit import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the active backend once so timed tests measure math, not jit
    kernels.warmup()
