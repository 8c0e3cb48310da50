"""Majority-rule, strict and threshold consensus trees read off the TAG"""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum, auto

from .model import PhyloTree
from .newick import serialize_newick
from .tag import NotCommonLeafSetError, Tag, tag_root, topological_order

logger = logging.getLogger(__name__)


class ThresholdError(ValueError):
	"""Threshold too low to guarantee the selected clusters are compatible"""


class ConsensusMode(Enum):
	Strict = auto()
	"""Clusters in every tree"""
	Majority = auto()
	"""Clusters in more than half of the trees"""
	Threshold = auto()
	"""Clusters in at least t trees, for some t > k/2"""


@dataclass
class AncestorState:
	"""Best selected ancestor found so far for each node other than the root"""

	m: dict[int, int]
	"""Cardinality of p(u)"""
	p: dict[int, int]
	"""Smallest selected ancestor of u seen so far"""
	visits: int = 0
	"""Nodes and edges examined by the propagation loop"""


@dataclass(frozen=True, eq=False)
class ConsensusTree:
	tree: PhyloTree
	nodes: frozenset[int]
	"""TAG nodes whose clusters are the clusters of tree"""
	root: int
	state: AncestorState = field(repr=False)

	@property
	def newick(self) -> str:
		return serialize_newick(self.tree)

	def parent(self, node: int) -> int | None:
		"""Parent of a selected node in the consensus tree"""
		return None if node == self.root else self.state.p[node]


def _propagate(
	tag: Tag,
	selected: Callable[[int], bool],
	order: Iterable[int] | None = None,
) -> ConsensusTree:
	root = tag_root(tag)
	n = tag.space.n
	# Every taxon must be a leaf of every tree, whichever clusters are selected
	missing = [name for node, name in tag.leaf_name.items() if tag.counts[node] != tag.k]
	members = frozenset(node for node in tag.nodes if selected(node))
	missing += [name for node, name in tag.leaf_name.items() if node not in members and name not in missing]
	if missing or root not in members:
		raise NotCommonLeafSetError(
			f'Taxa {", ".join(sorted(missing)[:10])} are not in every tree; consensus needs a common leaf set'
		)

	state = AncestorState({u: n for u in tag.nodes if u != root}, {u: root for u in tag.nodes if u != root})
	if order is None:
		order = topological_order(tag, exclude=(root,))
	cardinalities = tag.cardinalities
	m = state.m
	p = state.p
	visits = 0
	for u in order:
		visits += 1
		if u in members:
			mu, pi = cardinalities[u], u
		else:
			mu, pi = m[u], p[u]
		for v in tag.successors[u]:
			visits += 1
			if m[v] > mu:
				m[v] = mu
				p[v] = pi
	state.visits = visits

	tree = PhyloTree.from_edges(
		((p[u], u) for u in sorted(members) if u != root),
		{node: tag.leaf_name[node] for node in members if node in tag.leaf_name},
		root,
	)
	logger.info('Consensus tree has %d clusters out of %d TAG nodes', len(members), len(tag))
	return ConsensusTree(tree, members, root, state)


def _check_k(tag: Tag, k: int | None) -> int:
	if k is None:
		return tag.k
	if k < 1:
		raise ValueError(f'Need at least one tree, got k = {k}')
	return k


def majority_rule_tree(tag: Tag, k: int | None = None, *, order: Iterable[int] | None = None) -> ConsensusTree:
	"""Tree of the clusters found in more than k/2 trees.

	Parameters:
		k: Number of trees, defaults to the number the TAG was built from
		order: Topological order of the TAG nodes other than the root to process nodes in, by default the smallest-id-first order
	"""
	k = _check_k(tag, k)
	return _propagate(tag, lambda node: tag.counts[node] * 2 > k, order)


def strict_consensus_tree(tag: Tag, k: int | None = None, *, order: Iterable[int] | None = None) -> ConsensusTree:
	"""Tree of the clusters found in all k trees"""
	k = _check_k(tag, k)
	return _propagate(tag, lambda node: tag.counts[node] == k, order)


def threshold_consensus(tag: Tag, k: int | None, t: int) -> ConsensusTree:
	"""Tree of the clusters found in at least t trees; t must be more than k/2 so those clusters are pairwise compatible"""
	k = _check_k(tag, k)
	if t * 2 <= k:
		raise ThresholdError(f'Threshold {t} is not more than half of {k} trees')
	if t > k:
		raise ThresholdError(f'Threshold {t} is more than the number of trees ({k})')
	return _propagate(tag, lambda node: tag.counts[node] >= t, None)


def consensus_tree(tag: Tag, mode: ConsensusMode, threshold: int | None = None) -> ConsensusTree:
	if mode == ConsensusMode.Strict:
		return strict_consensus_tree(tag)
	if mode == ConsensusMode.Majority:
		return majority_rule_tree(tag)
	if threshold is None:
		raise ThresholdError('Threshold consensus needs a threshold')
	return threshold_consensus(tag, tag.k, threshold)
