from dataclasses import replace

import pytest

from commitscope import ingest, synth


@pytest.fixture(scope="session")
def planted():
    return synth.make_detection_corpus()


@pytest.fixture(scope="session")
def labeled_corpus(planted):
    return replace(planted.corpus, labels=synth.planted_labels(planted))


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, labeled_corpus):
    path = tmp_path_factory.mktemp("fixture-corpus")
    ingest.save_corpus(labeled_corpus, path)
    return path
