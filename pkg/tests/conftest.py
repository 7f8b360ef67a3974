from __future__ import annotations

from pathlib import Path

import pytest

from twonormal.triangulation import Triangulation, builtin, parse_triangulation

DATA = Path(__file__).parent / "data"


def load_data(name: str) -> Triangulation:
    return parse_triangulation((DATA / name).read_text())


def data_names() -> list[str]:
    return sorted(p.name for p in DATA.glob("*.tri"))


@pytest.fixture
def double2() -> Triangulation:
    return builtin("double2")
