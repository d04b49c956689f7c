import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dialex.corpus import Sentence

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"
FIXTURES_DIR = Path(__file__).parent.parent / "fixtures"


def make_sentence(tokens, sentence_id="s0", page_id="p0", lang="bar", text=None):
    tokens = tuple(tokens)
    return Sentence(
        sentence_id=sentence_id,
        page_id=page_id,
        lang=lang,
        text=text if text is not None else " ".join(tokens),
        tokens=tokens,
    )


@pytest.fixture
def sentence_factory():
    return make_sentence
