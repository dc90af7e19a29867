import pytest

from frontend import elaborate, load_system, parse
from utils import corpus


@pytest.fixture
def load_model():
    """Load a bundled model by corpus name."""
    return lambda name: load_system(corpus.model_path(name))


@pytest.fixture
def build():
    """Elaborate a model given as source text."""
    return lambda source, name='inline': elaborate(parse(source), name)


@pytest.fixture
def models_dir():
    return corpus.MODELS_DIR
