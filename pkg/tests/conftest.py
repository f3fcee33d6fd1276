import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "exlift",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exlift")


@pytest.fixture(scope="session")
def corpus_pairs():
    from exlift.corpus import corpus_pairs
    return corpus_pairs(include_slow=False)


@pytest.fixture(scope="session")
def corpus_pairs_full():
    from exlift.corpus import corpus_pairs
    return corpus_pairs(include_slow=True)


@pytest.fixture(scope="session")
def corpus_rings():
    from exlift.corpus import corpus_rings
    return corpus_rings()
