import pytest

from alvis.model import DocumentRecord
from alvis.pipeline import STAGES, PipelineConfig, Resources, annotate
from alvis.resources import sample_path

from helpers import ABSTRACT, TITLE

RECORD_ID = "A79ACA58DEB7E6114747710B9A85059F"


def sample_config(**overrides) -> PipelineConfig:
    paths = dict(
        ne_dict=sample_path("ne_dict.tsv"),
        term_dict=sample_path("term_dict.tsv"),
        pos_lexicon=sample_path("pos_lexicon.tsv"),
    )
    paths.update(overrides)
    return PipelineConfig(**paths)


@pytest.fixture(scope="session")
def sample_resources() -> Resources:
    return Resources.load(sample_config(), STAGES)


@pytest.fixture(scope="session")
def title_record(sample_resources) -> DocumentRecord:
    return annotate(DocumentRecord.from_text(TITLE, RECORD_ID), sample_resources)


@pytest.fixture(scope="session")
def abstract_record(sample_resources) -> DocumentRecord:
    return annotate(DocumentRecord.from_text(ABSTRACT, "ABSTRACT"), sample_resources)


@pytest.fixture(scope="session")
def sample_xml() -> bytes:
    return sample_path("abstract.xml").read_bytes()
