import pytest

from sheetgen import bundled_repo_dir, load_template
from sheetgen.cells import CellAddr

# The worked filter example: 13 input cells, one blank, four matches.
FILTER_INPUT = [
    "Not X", "X", "Not X", "Not X", "X2", "Not X", "Not X", "Not X",
    None, "X4", "X5", "Not X", "Not X",
]
FILTER_BINDINGS = {
    "pattern": "X*",
    "input": "Sheet1!A3:A15",
    "working": "Sheet1!B3:B15",
    "output": "Sheet1!C3:C15",
}
EXPECTED_INDEX = [2.0, 5.0, 10.0, 11.0] + [-1.0] * 9
EXPECTED_MATCHING = ["X", "X2", "X4", "X5"] + [""] * 9


def filter_overrides(data=None, sheet="Sheet1", row0=3, col=1):
    data = FILTER_INPUT if data is None else data
    return [
        (CellAddr(sheet, row0 + i, col), v)
        for i, v in enumerate(data)
        if v is not None
    ]


@pytest.fixture(scope="session")
def repo_dir():
    return bundled_repo_dir()


@pytest.fixture(scope="session")
def filter_template(repo_dir):
    return load_template(repo_dir / "filter-remove-non-matches")


@pytest.fixture(scope="session")
def story_template(repo_dir):
    return load_template(repo_dir / "story-generator")


@pytest.fixture(scope="session")
def demo_template(repo_dir):
    return load_template(repo_dir / "language-demo")
