from __future__ import annotations

import sys
from pathlib import Path

import pytest

from kgqa import load_kb

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

sys.path.insert(0, str(Path(__file__).resolve().parent))  # for kbgen


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def kb_promo_tool():
    return load_kb(FIXTURES / "promo_tool")


@pytest.fixture(scope="session")
def kb_programs():
    return load_kb(FIXTURES / "promo_programs")


@pytest.fixture(scope="session")
def kb_discounts():
    return load_kb(FIXTURES / "discount_rules")


@pytest.fixture(scope="session")
def kb_guidance():
    return load_kb(FIXTURES / "guidance")
