import pytest

from clipweave.synthetic import make_catalog, make_embedding_set


@pytest.fixture(scope="session")
def small_catalog():
    return make_catalog(120, seed=101)


@pytest.fixture(scope="session")
def small_embeddings(small_catalog):
    return make_embedding_set(small_catalog, seed=202, dim=12, rows_per_video=3)
