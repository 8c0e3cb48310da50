import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supertree_maker.model import clusters_of
from supertree_maker.newick import (
	NewickError,
	parse_newick,
	parse_newick_tree,
	serialize_collection,
	serialize_newick,
)
from supertree_maker.oracles import random_collection


def test_parse_simple():
	tree = parse_newick_tree('((a,b),c);')
	assert tree.taxa == frozenset('abc')
	assert frozenset('ab') in clusters_of(tree)


def test_lengths_comments_and_internal_names_ignored():
	tree = parse_newick_tree('((a:0.1,b:2e-3)ab:1 [comment], c : 5) root;')
	assert serialize_newick(tree) == '((a,b),c);'


def test_serialize_is_canonical():
	assert serialize_newick(parse_newick_tree('(c,(b,a));')) == '((a,b),c);'
	assert serialize_newick(parse_newick_tree('(d,(c,(b,a)),e);')) == '(((a,b),c),d,e);'


def test_single_leaf():
	assert serialize_newick(parse_newick_tree('a;')) == 'a;'


def test_parse_collection_skips_blank_lines():
	collection = parse_newick('(a,b);\n\n  \n(a,c);\n', 'trees.nwk')
	assert len(collection) == 2
	assert collection.origins == ('trees.nwk:1', 'trees.nwk:4')


def test_empty_input():
	with pytest.raises(NewickError, match='No trees'):
		parse_newick('\n\n')


@pytest.mark.parametrize(
	('text', 'message', 'column'),
	[
		('((a,b),c)', 'Missing ";"', 9),
		('((a,b),c;', 'Missing 1', 8),
		('(a,b));', 'Unbalanced', 5),
		('(a,b);x', 'after', 6),
		('((a),b);', 'only one child', 3),
		('(a,,b);', 'Expected a taxon name', 3),
		('(a,b,a);', 'Duplicate leaf name', 5),
		('(a:x,b);', 'branch length', 3),
		('(a,b[oops);', 'Unterminated comment', 4),
		('a,b;', 'outside of parentheses', 1),
		('(a,b)$;', 'Unexpected character', 5),
	],
)
def test_malformed(text: str, message: str, column: int):
	with pytest.raises(NewickError, match=message) as info:
		parse_newick_tree(text)
	assert info.value.line == 1
	assert info.value.column == column


def test_error_names_file_line_and_tree():
	with pytest.raises(NewickError) as info:
		parse_newick('(a,b);\n\n(a,(b,c);\n', 'in.nwk')
	error = info.value
	assert error.line == 3
	assert error.tree_index == 1
	assert error.source == 'in.nwk'
	assert str(error).startswith('in.nwk: tree 1, line 3, column')


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), resolved=st.booleans())
def test_round_trip_is_a_fixpoint(seed: int, resolved: bool):
	# 50 examples of 20 trees each
	collection = random_collection(seed, 12, 20, resolved=resolved, partial=True)
	text = serialize_collection(collection)
	again = parse_newick(text)
	assert serialize_collection(again) == text
	for tree, parsed in zip(collection, again, strict=True):
		assert clusters_of(tree) == clusters_of(parsed)
