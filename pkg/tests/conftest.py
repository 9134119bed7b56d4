from __future__ import annotations

import pytest

from svagen.corpus import StratumKey, generate_synthetic_corpus
from svagen.kb import curate


@pytest.fixture(scope="session")
def tiny_kb():
    """Twenty curated entries spanning path counts 1-4 and both clock styles."""
    spec = {
        StratumKey(1, "sync", "none"): 4,
        StratumKey(2, "sync", "if_else"): 6,
        StratumKey(3, "sync", "mixed"): 5,
        StratumKey(4, "async", "case"): 5,
    }
    entries, rejected = curate(generate_synthetic_corpus(spec, seed=11))
    assert not rejected
    return entries
