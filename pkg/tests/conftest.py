from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

import pytest

from plumbcalc.calculus import random_resolution_graph

DATA = Path(str(resources.files("plumbcalc") / "data"))


def corpus(n: int = 200, seed: int = 20240601):
    """The seeded random corpus of negative definite resolution graphs."""
    rng = random.Random(seed)
    return [random_resolution_graph(rng) for _ in range(n)]


@pytest.fixture(scope="session")
def graphs():
    return corpus()


@pytest.fixture
def data_dir() -> Path:
    return DATA
