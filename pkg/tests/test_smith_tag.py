import numpy
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supertree_maker.model import TreeCollection
from supertree_maker.newick import parse_newick
from supertree_maker.oracles import random_collection
from supertree_maker.smith_tag import ProcTag, build_smith_tag, post_process
from supertree_maker.tag import build_tag


def _named_edges(proc: ProcTag, tree_id: int) -> set[tuple[str, str]]:
	return {
		(proc.space.format(proc.bitstrings[edge.source]), proc.space.format(proc.bitstrings[edge.target]))
		for edge in proc.edges
		if edge.tree_id == tree_id
	}


def _v_mapping(proc: ProcTag, collection: TreeCollection) -> set[str]:
	"""Nodes the ab vertex of the third tree maps to"""
	tree = collection.tree(2)
	(vertex,) = (v for v in tree.internal_vertices if tree.cluster(v) == frozenset('ab'))
	return {proc.space.format(proc.bitstrings[node]) for node in proc.mapping[2, vertex]}


def test_initial_nodes(overlapping: TreeCollection):
	proc = build_smith_tag(overlapping)
	assert [proc.space.format(bits) for bits in proc.bitstrings[:6]] == ['a,b,c,d,e', 'a', 'b', 'c', 'd', 'e']


def test_in_given_order(overlapping: TreeCollection):
	proc = build_smith_tag(overlapping, (0, 1, 2))
	assert proc.insertion_order == (0, 1, 2)
	assert not proc.has_cluster('ab')
	assert proc.cluster_set() == {frozenset(c) for c in ('abcde', 'a', 'b', 'c', 'd', 'e', 'abc', 'abd')}
	assert _v_mapping(proc, overlapping) == {'a,b,c', 'a,b,d'}
	assert _named_edges(proc, 2) == {
		('a,b,c,d,e', 'a,b,c'),
		('a,b,c,d,e', 'a,b,d'),
		('a,b,c,d,e', 'e'),
		('a,b,c', 'a'),
		('a,b,c', 'b'),
		('a,b,d', 'a'),
		('a,b,d', 'b'),
	}


def test_third_tree_first(overlapping: TreeCollection):
	proc = build_smith_tag(overlapping, (2, 0, 1))
	assert proc.has_cluster('ab')
	assert _v_mapping(proc, overlapping) == {'a,b'}
	assert build_smith_tag(overlapping, (0, 1, 2)).cluster_set() != proc.cluster_set()


def test_post_process_leaves_first_order_alone(overlapping: TreeCollection):
	proc = build_smith_tag(overlapping, (0, 1, 2))
	processed = post_process(proc, overlapping)
	assert processed.signature() == proc.signature()
	assert processed.mapping == proc.mapping


def test_post_process_remaps(overlapping: TreeCollection):
	proc = build_smith_tag(overlapping, (2, 0, 1))
	before = _named_edges(proc, 2)
	processed = post_process(proc, overlapping)
	after = _named_edges(processed, 2)
	assert _v_mapping(processed, overlapping) == {'a,b,c', 'a,b,d'}
	assert after - before == {
		('a,b,c,d,e', 'a,b,c'),
		('a,b,c,d,e', 'a,b,d'),
		('a,b,c', 'a'),
		('a,b,c', 'b'),
		('a,b,d', 'a'),
		('a,b,d', 'b'),
	}
	assert before - after == {('a,b,c,d,e', 'a,b'), ('a,b', 'a'), ('a,b', 'b')}
	# Edges of the other trees are untouched
	assert _named_edges(processed, 0) == _named_edges(proc, 0)
	# The input is not modified
	assert _named_edges(proc, 2) == before


def test_post_processed_still_differs(overlapping: TreeCollection):
	first = post_process(build_smith_tag(overlapping, (0, 1, 2)), overlapping)
	second = post_process(build_smith_tag(overlapping, (2, 0, 1)), overlapping)
	assert second.has_cluster('ab')
	assert first.signature() != second.signature()


def test_bad_order(overlapping: TreeCollection):
	with pytest.raises(ValueError):
		build_smith_tag(overlapping, (0, 1))


def test_single_taxon():
	proc = build_smith_tag(TreeCollection((random_collection(0, 2, 1).trees[0].restrict('a'),)))
	assert len(proc) == 1


def test_chain_pruned_to_lowest():
	# After the first tree abc -> ab is an edge, and both fit the ab vertex of the second
	collection = parse_newick('(((a,b),c),d);\n((a,b),e);\n')
	proc = build_smith_tag(collection)
	tree = collection.tree(1)
	(vertex,) = (v for v in tree.internal_vertices if tree.cluster(v) == frozenset('ab'))
	assert {proc.space.format(proc.bitstrings[node]) for node in proc.mapping[1, vertex]} == {'a,b'}


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10), k=st.integers(1, 5))
def test_same_taxa_matches_tag_in_any_order(seed: int, n: int, k: int):
	collection = random_collection(seed, n, k)
	tag = build_tag(collection)
	expected = {tag.cluster(node) for node in tag.nodes}
	rng = numpy.random.default_rng(seed)
	for _ in range(3):
		order = rng.permutation(k).tolist()
		assert build_smith_tag(collection, order).cluster_set() == expected


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10), k=st.integers(1, 5))
def test_every_vertex_mapped(seed: int, n: int, k: int):
	collection = random_collection(seed, n, k, partial=True)
	proc = build_smith_tag(collection)
	for tree_id, tree in collection.items():
		for vertex in tree.internal_vertices:
			mapped = proc.mapping[tree_id, vertex]
			assert mapped
			for node in mapped:
				assert tree.cluster(vertex) <= proc.cluster(node)
