from functools import lru_cache

import pytest

from fig8torsion.config import RunConfig
from fig8torsion.report import run_pipeline


@lru_cache(maxsize=None)
def _report(n: int):
    return run_pipeline(n, RunConfig())


@pytest.fixture(scope="session")
def report_for():
    """Pipeline results at default settings, computed once per n per session."""
    return _report
