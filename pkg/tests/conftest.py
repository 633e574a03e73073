from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fodm import build, load_config, load_dataset, validate_config  # noqa: E402
from fodm.fcm import read_memberships_csv  # noqa: E402
from fodm.scaling import FuzzyFormalContext, ScaleAttribute  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "data"
TABLE1 = DATA / "table1.csv"
TABLE2 = DATA / "table2_memberships.csv"
CONFIG = DATA / "employees.toml"

NA = np.nan

# Table 5 of the worked example (post alpha-cut), columns C1..C5.
TABLE5 = np.array(
    [
        [NA, 0.5, 0.4, 0.5, 0.5],
        [0.3, 0.6, NA, NA, 0.6],
        [0.7, NA, NA, 0.7, NA],
        [NA, 0.4, 0.5, NA, 0.8],
        [NA, 0.5, 0.5, 0.6, NA],
        [0.5, 0.5, NA, 0.5, 0.5],
    ]
)

BINDINGS = (
    ScaleAttribute("Salary", "Low", "C1"),
    ScaleAttribute("Salary", "Medium", "C2"),
    ScaleAttribute("Salary", "High", "C3"),
    ScaleAttribute("Age", "Young", "C4"),
    ScaleAttribute("Age", "Adult", "C5"),
)
OBJECTS = tuple(f"t{i}" for i in range(1, 7))


@pytest.fixture
def table5() -> FuzzyFormalContext:
    return FuzzyFormalContext(OBJECTS, BINDINGS, TABLE5)


@pytest.fixture
def dataset():
    return load_dataset(TABLE1)


@pytest.fixture
def config(dataset):
    return validate_config(dataset, load_config(CONFIG))


@pytest.fixture
def example_result(dataset, config):
    fixture = read_memberships_csv(TABLE2.read_text())
    return build(dataset, config, fixture)


def random_context(rng: np.random.Generator, n_obj: int, n_attr: int, density: float,
                   n_groups: int = 2) -> FuzzyFormalContext:
    """Random context; scale attributes are spread over ``n_groups`` attributes."""
    present = rng.random((n_obj, n_attr)) < density
    cells = np.where(present, rng.uniform(0.05, 1.0, (n_obj, n_attr)).round(2), np.nan)
    cells[present & (cells <= 0)] = 0.05
    scale = tuple(
        ScaleAttribute(f"A{j % n_groups}", f"L{j}", f"C{j + 1}") for j in range(n_attr)
    )
    return FuzzyFormalContext(tuple(f"o{i}" for i in range(n_obj)), scale, cells)


def random_contexts(count: int, seed: int = 1234, max_obj: int = 10, max_attr: int = 10):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n_obj = int(rng.integers(1, max_obj + 1))
        n_attr = int(rng.integers(1, max_attr + 1))
        density = float(rng.uniform(0.3, 0.8))
        groups = int(rng.integers(1, min(3, n_attr) + 1))
        yield random_context(rng, n_obj, n_attr, density, groups)
