import os

import pytest


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long statistical runs (set GCHAINS_RUN_SLOW=1 to include)')


def pytest_collection_modifyitems(config, items):
    if os.getenv('GCHAINS_RUN_SLOW'):
        return
    skip = pytest.mark.skip(reason='set GCHAINS_RUN_SLOW=1 to run')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)
