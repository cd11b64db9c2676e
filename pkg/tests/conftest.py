import copy
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / 'src'))

from catalog.library import load_catalog  # noqa: E402
from chart.textio import build_chart, load_chart  # noqa: E402
from common.config import load_config  # noqa: E402
from verify.engine import Verifier  # noqa: E402
from verify.rulebase import load_rulebase  # noqa: E402

CHARTS = ROOT / 'charts'

WHITE_PAIR = """
chart n=3
white w1 darts=a1,a2,a3,a4,a5,a6
white w2 darts=b6,b5,b4,b3,b2,b1
edge e1 label=1 tail=b1 head=a1
edge e2 label=2 tail=b2 head=a2
edge e3 label=1 tail=b3 head=a3
edge e4 label=2 tail=a4 head=b4
edge e5 label=1 tail=a5 head=b5
edge e6 label=2 tail=a6 head=b6
"""


@pytest.fixture(scope='session')
def base_config():
    return load_config()


@pytest.fixture
def config(base_config, tmp_path):
    cfg = copy.deepcopy(base_config)
    cfg.setdefault('output', {})['directory'] = str(tmp_path / 'outputs')
    return cfg


@pytest.fixture(scope='session')
def catalog():
    return load_catalog()


@pytest.fixture(scope='session')
def rulebase():
    return load_rulebase()


@pytest.fixture(scope='session')
def verifier(base_config, rulebase, catalog):
    return Verifier(base_config, rulebase, catalog)


@pytest.fixture(scope='session')
def pipeline_report(verifier):
    return verifier.theorem_pipeline()


@pytest.fixture
def white_pair():
    return build_chart(WHITE_PAIR)


@pytest.fixture
def chart_file():
    def _load(name):
        return load_chart(str(CHARTS / name))
    return _load
