import pytest

from acosgen.configs import default_category_map
from acosgen.core import parse_dataset_text
from acosgen.synth import make_synthetic_corpus

MINI_DATASET = (
    "the pizza was great\t1,2 FOOD#QUALITY 2 3,4\n"
    "it took an hour to be seated\t-1,-1 SERVICE#GENERAL 0 -1,-1\n"
    "the pizza was great but the wine list was poor\t"
    "1,2 FOOD#QUALITY 2 3,4\t6,8 DRINKS#STYLE_OPTIONS 0 9,10\n"
)


def example_from_line(line: str, id_prefix: str = "t"):
    """Build a single Example from one dataset TSV line."""
    return parse_dataset_text(line, id_prefix=id_prefix)[0]


@pytest.fixture(scope="session")
def rest_map():
    return default_category_map("rest")


@pytest.fixture(scope="session")
def laptop_map():
    return default_category_map("laptop")


@pytest.fixture(scope="session")
def mini_examples():
    return parse_dataset_text(MINI_DATASET, id_prefix="mini")


@pytest.fixture(scope="session")
def synth_corpus():
    return make_synthetic_corpus(300, seed=11)


@pytest.fixture()
def mini_dataset_file(tmp_path):
    path = tmp_path / "mini.tsv"
    path.write_text(MINI_DATASET, encoding="utf-8")
    return path
