import pytest

from supertree_maker.model import PhyloTree, TreeCollection, TreeStructureError, clusters_of


def _clusters(*clusters: str) -> set[frozenset[str]]:
	return {frozenset(cluster) for cluster in clusters}


def test_from_nested():
	tree = PhyloTree.from_nested([['a', 'b'], 'c'])
	assert tree.taxa == frozenset('abc')
	assert len(tree.children) == 5
	assert clusters_of(tree) == _clusters('a', 'b', 'c', 'ab', 'abc')
	assert tree.is_binary


def test_single_leaf():
	tree = PhyloTree.from_nested('a')
	assert tree.taxa == frozenset('a')
	assert tree.internal_vertices == ()
	assert list(tree.edges()) == []


def test_unary_vertex_rejected():
	with pytest.raises(TreeStructureError):
		PhyloTree.from_nested([['a'], 'b'])


def test_unary_vertex_suppressed():
	tree = PhyloTree.from_nested([[['a', 'b']], ['c']], suppress_unary=True)
	assert clusters_of(tree) == _clusters('a', 'b', 'c', 'ab', 'abc')


def test_duplicate_taxa_rejected():
	with pytest.raises(TreeStructureError, match='Duplicate'):
		PhyloTree.from_nested([['a', 'b'], 'a'])


def test_two_parents_rejected():
	with pytest.raises(TreeStructureError):
		PhyloTree(((1, 2), (), (1,)), {1: 'a'})


def test_unlabelled_leaf_rejected():
	with pytest.raises(TreeStructureError, match='no taxon name'):
		PhyloTree(((1, 2), (), ()), {1: 'a'})


def test_labelled_internal_vertex_rejected():
	with pytest.raises(TreeStructureError, match='has a taxon name'):
		PhyloTree(((1, 2), (), ()), {0: 'x', 1: 'a', 2: 'b'})


def test_from_edges():
	tree = PhyloTree.from_edges(
		[('root', 'ab'), ('ab', 'A'), ('ab', 'B'), ('root', 'C')],
		{'A': 'a', 'B': 'b', 'C': 'c'},
		'root',
	)
	assert clusters_of(tree) == _clusters('a', 'b', 'c', 'ab', 'abc')


def test_postorder_children_first():
	tree = PhyloTree.from_nested([['a', 'b'], ['c', ['d', 'e']]])
	order = tree.postorder()
	position = {vertex: i for i, vertex in enumerate(order)}
	assert sorted(order) == list(tree.vertices)
	for parent, child in tree.edges():
		assert position[child] < position[parent]
	assert order[-1] == tree.root


def test_restrict():
	tree = PhyloTree.from_nested([['a', 'b'], ['c', ['d', 'e']]])
	restricted = tree.restrict('ace')
	assert clusters_of(restricted) == _clusters('a', 'c', 'e', 'ce', 'ace')


def test_restrict_to_one_taxon():
	tree = PhyloTree.from_nested([['a', 'b'], 'c'])
	assert clusters_of(tree.restrict('b')) == _clusters('b')


def test_restrict_unknown_taxon():
	tree = PhyloTree.from_nested([['a', 'b'], 'c'])
	with pytest.raises(ValueError, match='z'):
		tree.restrict('az')
	with pytest.raises(ValueError):
		tree.restrict('')


def test_is_binary():
	assert not PhyloTree.from_nested(['a', 'b', 'c']).is_binary
	assert PhyloTree.from_nested([['a', 'b'], 'c']).is_binary


def test_collection_ids_default_to_positions():
	trees = (PhyloTree.from_nested(['a', 'b']), PhyloTree.from_nested(['a', 'c']))
	collection = TreeCollection(trees)
	assert collection.ids == (0, 1)
	assert collection.taxa == frozenset('abc')
	assert not collection.leaf_sets_identical
	assert collection.first_differing_leaf_set() == 1


def test_collection_needs_trees():
	with pytest.raises(ValueError):
		TreeCollection(())


def test_collection_ids_must_be_permutation():
	trees = (PhyloTree.from_nested(['a', 'b']), PhyloTree.from_nested(['a', 'c']))
	with pytest.raises(ValueError):
		TreeCollection(trees, (0, 0))


def test_permuted_keeps_ids():
	trees = tuple(PhyloTree.from_nested(['a', name]) for name in 'bcd')
	collection = TreeCollection(trees, origins=('x:1', 'x:2', 'x:3'))
	permuted = collection.permuted((2, 0, 1))
	assert permuted.ids == (2, 0, 1)
	assert permuted.tree(2) is trees[2]
	assert permuted.origin(2) == 'x:3'
	assert [tree_id for tree_id, _ in permuted.items()] == [2, 0, 1]
	with pytest.raises(ValueError):
		collection.permuted((0, 1))


def test_concatenate_renumbers():
	first = TreeCollection((PhyloTree.from_nested(['a', 'b']),), origins=('one:1',))
	second = TreeCollection((PhyloTree.from_nested(['a', 'c']), PhyloTree.from_nested(['b', 'c'])))
	joined = TreeCollection.concatenate([first, second])
	assert joined.ids == (0, 1, 2)
	assert joined.origins == ('one:1', 'tree 0', 'tree 1')
	assert joined.tree(2).taxa == frozenset('bc')
