import numpy as np
import pytest

from brfd import _backend


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
