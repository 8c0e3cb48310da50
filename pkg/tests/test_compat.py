import numpy
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supertree_maker.compat import (
	NotCompatible,
	arc_components,
	build_extended_tag,
	check_compatibility,
	descendant,
	displays,
)
from supertree_maker.model import Nested, PhyloTree, TreeCollection, clusters_of
from supertree_maker.newick import parse_newick, parse_newick_tree, serialize_newick
from supertree_maker.oracles import brute_compat, random_collection
from supertree_maker.tag import build_tag


def _named_undirected(tag, graph) -> set[frozenset[str]]:
	return {frozenset(tag.space.format(tag.bitstrings[node]) for node in edge) for edge in graph.undirected_edges}


def test_sibling_edges(siblings: TreeCollection):
	tag = build_tag(siblings)
	graph = build_extended_tag(tag, siblings)
	named = _named_undirected(tag, graph)
	# a and b are siblings in both trees
	assert named == {frozenset(('a,b', 'c')), frozenset(('a,b', 'd')), frozenset(('a', 'b'))}
	assert len(graph.directed_edges) == len(tag.simple_edges)


def test_siblings_compatible(siblings: TreeCollection):
	result = check_compatibility(siblings)
	assert isinstance(result, PhyloTree)
	assert serialize_newick(result) == '((a,b),c,d);'
	for tree in siblings:
		assert displays(result, tree)


def test_conflict(conflict: TreeCollection):
	result = check_compatibility(conflict)
	assert isinstance(result, NotCompatible)
	tag = build_tag(conflict)
	assert result.clusters(tag) == ['{a,b}', '{a,c}', '{a}', '{b}', '{c}']


def test_single_tree():
	collection = parse_newick('((a,b),(c,(d,e)));')
	assert serialize_newick(check_compatibility(collection)) == '((a,b),(c,(d,e)));'


def test_single_leaf_trees():
	result = check_compatibility(parse_newick('a;\n(a,b);\nc;'))
	assert isinstance(result, PhyloTree)
	assert result.taxa == frozenset('abc')


def test_disjoint_trees_are_compatible():
	result = check_compatibility(parse_newick('((a,b),c);\n((d,e),f);'))
	assert isinstance(result, PhyloTree)
	assert serialize_newick(result) == '((a,b),c,(d,e),f);'


def test_arc_components(overlapping: TreeCollection):
	tag = build_tag(overlapping)
	graph = build_extended_tag(tag)
	assert arc_components(graph) == [frozenset(tag.nodes)]
	roots = {tag.node_for('abcd'), tag.node_for('abe')}
	rest = arc_components(graph.restrict(frozenset(tag.nodes) - roots))
	assert sorted(len(component) for component in rest) == [1, 7]


def test_arc_components_below_the_roots(siblings: TreeCollection):
	tag = build_tag(siblings)
	graph = build_extended_tag(tag, siblings)
	roots = {tag.node_for('abc'), tag.node_for('abd')}
	rest = arc_components(graph.restrict(frozenset(tag.nodes) - roots))
	named = {frozenset(tag.space.format(tag.bitstrings[node]) for node in component) for component in rest}
	assert len(rest) == 3
	assert named == {frozenset(('c',)), frozenset(('d',)), frozenset(('a,b', 'a', 'b'))}


def test_restrict_drops_edges(siblings: TreeCollection):
	tag = build_tag(siblings)
	graph = build_extended_tag(tag)
	ab, c = tag.node_for('ab'), tag.node_for('c')
	restricted = graph.restrict({ab, c})
	assert restricted.directed_edges == set()
	assert restricted.undirected_edges == {frozenset((ab, c))}


def test_descendant_on_overlapping(overlapping: TreeCollection):
	# abc and abd overlap, so these trees conflict
	result = descendant(build_extended_tag(build_tag(overlapping)))
	assert isinstance(result, NotCompatible)


def test_displays():
	supertree = parse_newick_tree('(((a,b),c),(d,e));')
	assert displays(supertree, parse_newick_tree('((a,b),d);'))
	assert displays(supertree, parse_newick_tree('(a,c,e);'))
	assert not displays(supertree, parse_newick_tree('((a,d),b);'))
	with pytest.raises(ValueError):
		displays(supertree, parse_newick_tree('(a,z);'))


def _compat_collection(seed: int) -> TreeCollection:
	rng = numpy.random.default_rng(seed)
	n = int(rng.integers(2, 6, endpoint=True))
	k = int(rng.integers(1, 4, endpoint=True))
	# Half of them built to be compatible, since random trees rarely are
	return random_collection(seed, n, k, partial=True, compatible=bool(rng.integers(2)))


@settings(max_examples=500, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_matches_trying_every_tree(seed: int):
	collection = _compat_collection(seed)
	result = check_compatibility(collection)
	expected = brute_compat(collection)
	assert isinstance(result, NotCompatible) == isinstance(expected, NotCompatible)
	if isinstance(result, PhyloTree):
		assert result.taxa == collection.taxa
		for tree in collection:
			assert displays(result, tree)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 30), k=st.integers(1, 10))
def test_restrictions_of_one_tree_are_compatible(seed: int, n: int, k: int):
	collection = random_collection(seed, n, k, partial=True, compatible=True)
	assert isinstance(check_compatibility(collection), PhyloTree)


def test_deep_caterpillar():
	names = [f't{i:04d}' for i in range(1200)]
	nested: Nested = names[0]
	for name in names[1:]:
		nested = [nested, name]
	tree = PhyloTree.from_nested(nested)
	result = check_compatibility(TreeCollection((tree,)))
	assert isinstance(result, PhyloTree)
	assert clusters_of(result) == clusters_of(tree)
