from __future__ import annotations

import pytest

import gens


@pytest.fixture
def fig():
    return gens.figure_one()


@pytest.fixture
def byz():
    return gens.byzantine()
