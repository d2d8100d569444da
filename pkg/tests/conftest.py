import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from quadchase.engine import QuadSystem
from quadchase.syntax import parse_nquads, parse_rules

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def load_system(nq_name: str, rules_name: str) -> QuadSystem:
    quads = parse_nquads((FIXTURES / nq_name).read_bytes())
    doc = parse_rules((FIXTURES / rules_name).read_bytes())
    return QuadSystem(quads, doc.rules)


@pytest.fixture
def example1_system() -> QuadSystem:
    return load_system("example1.nq", "example1.qrules")


@pytest.fixture
def fig3_system() -> QuadSystem:
    return load_system("fig3.nq", "fig3.qrules")


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES
