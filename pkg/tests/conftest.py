import pytest

from supertree_maker.model import TreeCollection
from supertree_maker.newick import parse_newick

OVERLAPPING_TEXT = '((a,b,c),d);\n((a,b,d),c);\n((a,b),e);\n'
"""Three trees with partially overlapping taxa, where the TAG has 10 nodes"""

SIBLINGS_TEXT = '((a,b),c);\n((a,b),d);\n'
"""Two compatible trees sharing the cluster ab"""

CONFLICT_TEXT = '((a,b),c);\n((a,c),b);\n'

SAME_TAXA_TEXT = '((a,b),(c,d));\n((a,b),c,d);\n(((a,b),c),d);\n((a,c),(b,d));\n'
"""Trees on the same taxa; ab is in three of the four"""


@pytest.fixture
def overlapping() -> TreeCollection:
	return parse_newick(OVERLAPPING_TEXT)


@pytest.fixture
def siblings() -> TreeCollection:
	return parse_newick(SIBLINGS_TEXT)


@pytest.fixture
def conflict() -> TreeCollection:
	return parse_newick(CONFLICT_TEXT)


@pytest.fixture
def same_taxa() -> TreeCollection:
	return parse_newick(SAME_TAXA_TEXT)
