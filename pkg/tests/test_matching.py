import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topodec.matching import (
    boundary_matching, exhaustive_boundary_matching, max_weight_matching, min_weight_perfect_matching,
)


@st.composite
def weighted_graphs(draw):
    n = draw(st.integers(2, 11))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    return [(i, j, draw(st.integers(0, 30))) for i, j in chosen]


def matching_weight(edges, pairs):
    w = {frozenset((i, j)): x for i, j, x in edges}
    return sum(w[frozenset(p)] for p in pairs)


@given(weighted_graphs(), st.booleans())
@settings(max_examples=300, deadline=None)
def test_agrees_with_networkx(edges, maxcard):
    mate = max_weight_matching(edges, maxcard)
    ours = [(v, m) for v, m in enumerate(mate) if m > v]
    assert all(mate[m] == v for v, m in ours)
    g = nx.Graph()
    g.add_weighted_edges_from(edges)
    ref = nx.max_weight_matching(g, maxcardinality=maxcard)
    assert matching_weight(edges, ours) == matching_weight(edges, ref)
    if maxcard:
        assert len(ours) == len(ref)


def test_small_cases():
    assert max_weight_matching([]) == []
    assert max_weight_matching([(0, 1, 5)]) == [1, 0]
    # path a-b-c-d: heavy middle edge loses against the two outer edges at max cardinality
    mate = max_weight_matching([(0, 1, 2), (1, 2, 3), (2, 3, 2)], maxcardinality=True)
    assert mate == [1, 0, 3, 2]
    assert max_weight_matching([(0, 1, 2), (1, 2, 5), (2, 3, 2)]) == [-1, 2, 1, -1]


def test_perfect_matching_required():
    with pytest.raises(ValueError):
        min_weight_perfect_matching(3, [(0, 1, 1), (1, 2, 1)])
    assert min_weight_perfect_matching(4, [(0, 1, 1), (2, 3, 1), (0, 2, 5), (1, 3, 0)]) == [(0, 1), (2, 3)]


@given(st.integers(0, 8), st.integers(0, 10_000))
@settings(max_examples=200, deadline=None)
def test_boundary_matching_is_optimal(k, seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 8, (k, 2))
    pair = np.abs(pts[:, None] - pts[None]).sum(-1)
    bd = rng.integers(1, 6, k)
    pairs = boundary_matching(pair, bd)
    cost = sum(pair[a][b] if b >= 0 else bd[a] for a, b in pairs)
    best, _ = exhaustive_boundary_matching(pair, bd)
    assert cost == best
    covered = sorted(x for p in pairs for x in p if x >= 0)
    assert covered == list(range(k))


def test_adjacent_pair_matches_each_other():
    pairs = boundary_matching(np.array([[0, 1], [1, 0]]), np.array([3, 3]))
    assert pairs == [(0, 1)]
    assert boundary_matching(np.zeros((1, 1)), np.array([2])) == [(0, -1)]


def test_exhaustive_limit():
    with pytest.raises(ValueError):
        exhaustive_boundary_matching(np.zeros((13, 13)), np.ones(13))
