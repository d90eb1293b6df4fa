import os

import pytest

from phistar.arith import set_default_cache
from phistar.cache import FactorCache


def pytest_configure(config):
    # keep test runs hermetic: never touch the user's cache file
    set_default_cache(FactorCache())


def long_run() -> bool:
    return os.environ.get("PHISTAR_LONG", "") not in ("", "0")


requires_long = pytest.mark.skipif(
    not long_run(), reason="opt-in long run; set PHISTAR_LONG=1")
