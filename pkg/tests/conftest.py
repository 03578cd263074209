import pytest

from multicurve import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # trigger JIT compilation up front so timed tests measure runtime,
    # not compilation
    _kernels.warm_up()
