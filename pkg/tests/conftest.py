import itertools
import random

import pytest

from matext.matroid import Matroid


def random_sparse_paving(n: int, k: int, rng: random.Random, max_ch: int = 4) -> Matroid:
    """Random sparse paving matroid: k-subsets pairwise intersecting in at
    most k-2 points become circuit-hyperplanes."""
    cands = list(itertools.combinations(range(n), k))
    rng.shuffle(cands)
    chs = []
    target = rng.randint(1, max_ch)
    for c in cands:
        if all(len(set(c) & set(d)) <= k - 2 for d in chs):
            chs.append(c)
        if len(chs) >= target:
            break
    return Matroid.sparse_paving(n, k, chs)


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240817)
