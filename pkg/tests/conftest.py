from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kahan2d import QuarticParams, SexticParams, build_quartic, build_sextic

CANONICAL_QUARTIC = (1.0, 0.0, 1.0, 0.0, 1.0)
CANONICAL_SEXTIC = (1.0, 0.0, 0.0, 1.0, 1.0, 1.0)


@pytest.fixture
def quartic_sys():
    return build_quartic(QuarticParams(*CANONICAL_QUARTIC))


@pytest.fixture
def sextic_sys():
    return build_sextic(SexticParams(*CANONICAL_SEXTIC))


@pytest.fixture(params=["quartic", "sextic"])
def each_system(request):
    if request.param == "quartic":
        return build_quartic(QuarticParams(*CANONICAL_QUARTIC))
    return build_sextic(SexticParams(*CANONICAL_SEXTIC))
