import pytest

from citenet.config.settings import settings
from citenet.services import corpus, network


@pytest.fixture(scope="session")
def reference_docs():
    return corpus.parse_corpus(settings.REFERENCE_CORPUS)


@pytest.fixture(scope="session")
def screened_docs(reference_docs):
    config = corpus.load_screening_config(settings.SCREENING_PATH)
    survivors, _ = corpus.screen_corpus(reference_docs, config)
    return survivors


@pytest.fixture(scope="session")
def reference_matrix(screened_docs):
    return network.build_affiliation(screened_docs)


@pytest.fixture(scope="session")
def reference_net(reference_matrix):
    return network.assign_labels(network.project(reference_matrix))


@pytest.fixture
def ledger_path(tmp_path):
    return tmp_path / "exclusions.db"
