import os
from pathlib import Path

import pytest

from _oracles import make_graph

# Raw LH10-format contact data (SocioPatterns hospital-ward dataset) is not
# bundled; tests that need it look here and skip with a reason when absent.
# See scripts/download_data.sh for provenance.
LH10_PATH = Path(os.environ.get(
    "HOSGNS_LH10", Path(__file__).resolve().parent.parent / "data" / "lh10.txt"
))


@pytest.fixture
def lh10_path():
    if not LH10_PATH.exists():
        pytest.skip(
            f"LH10 contact data not found at {LH10_PATH} "
            "(set HOSGNS_LH10 or run scripts/download_data.sh)"
        )
    return LH10_PATH


@pytest.fixture
def tiny_graph():
    """Two nodes, one event: the smallest legal graph."""
    return make_graph([(0, 1, 0)])


@pytest.fixture
def chain_graph():
    """Hand-traceable fixture: repeated pair plus a third node."""
    return make_graph([(0, 1, 0, 2.0), (0, 1, 1, 1.0), (1, 2, 2, 1.0)])


@pytest.fixture
def big_graph():
    """8 nodes, 6 slices, 4 events per slice: dense enough that negative
    events are feasible and 70/30 splits keep usable instance sets."""
    tuples = [
        (3, 7, 0, 3.0), (0, 4, 0, 3.0), (0, 5, 0, 3.0), (0, 6, 0, 3.0),
        (3, 7, 1, 1.0), (1, 7, 1, 1.0), (1, 3, 1, 2.0), (3, 4, 1, 3.0),
        (0, 7, 2, 3.0), (1, 5, 2, 3.0), (5, 7, 2, 3.0), (0, 6, 2, 3.0),
        (1, 5, 3, 3.0), (1, 2, 3, 2.0), (5, 6, 3, 1.0), (0, 3, 3, 3.0),
        (0, 2, 4, 3.0), (1, 2, 4, 3.0), (0, 5, 4, 2.0), (1, 5, 4, 1.0),
        (0, 2, 5, 2.0), (1, 2, 5, 1.0), (3, 5, 5, 3.0), (5, 7, 5, 1.0),
    ]
    return make_graph(tuples, num_nodes=8, num_times=6)


@pytest.fixture
def medium_graph():
    """A dozen events over 5 nodes and 4 slices; every slice non-empty."""
    return make_graph([
        (0, 1, 0, 2.0), (1, 2, 0, 1.0), (2, 3, 0, 1.0),
        (0, 2, 1, 1.0), (1, 3, 1, 3.0), (3, 4, 1, 1.0),
        (0, 1, 2, 1.0), (2, 4, 2, 2.0), (1, 4, 2, 1.0),
        (0, 3, 3, 1.0), (1, 2, 3, 1.0), (3, 4, 3, 2.0),
    ])
