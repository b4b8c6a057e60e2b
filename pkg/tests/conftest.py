import pytest
from pathlib import Path

from domainsense import (
    ScorerConfig,
    load_gloss_dataset,
    load_inventory,
    load_lexicon,
    load_wsd_dataset,
)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(DATA / "lexicon.tsv")


@pytest.fixture(scope="session")
def trident():
    return load_inventory(DATA / "trident.tsv", "trident")


@pytest.fixture(scope="session")
def csi():
    return load_inventory(DATA / "csi.tsv", "csi")


@pytest.fixture(scope="session")
def babeldomains():
    return load_inventory(DATA / "babeldomains.tsv", "babeldomains")


@pytest.fixture(scope="session")
def wndomains():
    return load_inventory(
        DATA / "wndomains.tsv",
        "wndomains",
        hierarchy_path=DATA / "wndomains_hierarchy.tsv",
        fallback_label="factotum",
    )


@pytest.fixture(scope="session")
def wsd_corpus(lexicon):
    return load_wsd_dataset(DATA / "wsd_corpus.jsonl", lexicon)


@pytest.fixture(scope="session")
def gloss_corpus():
    return load_gloss_dataset(DATA / "gloss_corpus.jsonl")


@pytest.fixture()
def corpus_scorer_config():
    def build(**overrides) -> ScorerConfig:
        kwargs = {
            "kind": "fixture",
            "mode": "entailment",
            "fixture_path": str(DATA / "fixture_scores.jsonl"),
        }
        kwargs.update(overrides)
        return ScorerConfig(**kwargs)

    return build
