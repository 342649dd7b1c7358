import pytest

from tht import fixtures
from tht.store import Store


@pytest.fixture
def store(tmp_path):
    s = Store.init(tmp_path / "data")
    yield s
    s.close()


@pytest.fixture
def kv_store(tmp_path):
    """Store preloaded with the 1.1.1 and 2.1.22 passages."""
    s = Store.init(tmp_path / "data")
    fixtures.build_kv_corpus(s)
    yield s
    s.close()


@pytest.fixture
def kv_full_store(tmp_path):
    """KV passages plus the B/C collation witnesses for tree building."""
    s = Store.init(tmp_path / "data")
    fixtures.build_kv_corpus(s, with_collation_witnesses=True)
    yield s
    s.close()
