from __future__ import annotations

import random

import pytest

from gcluster.exact_core import sample_generic


def generic(n: int, seed: int = 0):
    X, _ = sample_generic(random.Random(f"test:{n}:{seed}"), n)
    return X


@pytest.fixture
def X4():
    return generic(4)


@pytest.fixture
def X5():
    return generic(5)
