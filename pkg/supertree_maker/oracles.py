"""Slow, obviously correct versions of the TAG algorithms working directly on sets of clusters, for checking the fast ones against on small inputs.

Nothing here builds or reads a TAG."""

import logging
import string
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence

import numpy

from .compat import NotCompatible
from .consensus import ConsensusMode, ThresholdError
from .model import Nested, PhyloTree, TreeCollection, clusters_of
from .tag import NotCommonLeafSetError

logger = logging.getLogger(__name__)

Cluster = frozenset[str]
ClusterFamily = frozenset[Cluster]

MAX_ENUMERATED_TAXA = 8
MAX_BRUTE_COMPAT_TAXA = 6


class EnumerationLimitError(ValueError):
	"""Too many taxa to enumerate every tree on them"""


def tree_from_clusters(clusters: Iterable[Iterable[str]]) -> PhyloTree:
	"""Tree whose clusters are the given pairwise compatible clusters, plus the whole taxon set and the singletons if they are missing"""
	family = {frozenset(cluster) for cluster in clusters}
	family.discard(frozenset())
	if not family:
		raise ValueError('Need at least one non-empty cluster')
	taxa = frozenset().union(*family)
	family.add(taxa)
	family.update(frozenset((taxon,)) for taxon in taxa)

	placed: list[Cluster] = []
	edges = []
	# Biggest first, so every cluster's ancestors are already placed when it is
	for cluster in sorted(family, key=lambda c: (-len(c), sorted(c))):
		supersets = [other for other in placed if cluster < other]
		if supersets:
			parent = min(supersets, key=len)
			for other in supersets:
				if not (other <= parent or parent <= other):
					raise ValueError(f'Clusters {sorted(other)} and {sorted(parent)} overlap')
			edges.append((parent, cluster))
		placed.append(cluster)
	labels = {cluster: next(iter(cluster)) for cluster in family if len(cluster) == 1}
	return PhyloTree.from_edges(edges, labels, taxa)


class TopologyEnumerator:
	"""Every rooted tree on some taxa, resolved or not, each exactly once.

	Taxa are added one at a time; each new taxon either becomes another child of an existing internal vertex, or splits the edge above an existing vertex (including above the root) with a new vertex."""

	def __init__(self, taxa: Iterable[str], limit: int = MAX_ENUMERATED_TAXA):
		self.taxa = tuple(sorted(set(taxa)))
		if not self.taxa:
			raise ValueError('Need at least one taxon')
		if len(self.taxa) > limit:
			raise EnumerationLimitError(f'Will not enumerate trees on {len(self.taxa)} taxa, the limit is {limit}')

	def families(self) -> Iterator[ClusterFamily]:
		"""Cluster set of each tree, trivial clusters included"""
		first = frozenset(self.taxa[:1])
		yield from self._extend(frozenset((first,)), 1)

	def _extend(self, family: ClusterFamily, added: int) -> Iterator[ClusterFamily]:
		if added == len(self.taxa):
			yield family
			return
		taxon = self.taxa[added]
		leaf = frozenset((taxon,))
		for cluster in sorted(family, key=sorted):
			if len(cluster) > 1:
				# New child of cluster's vertex
				yield from self._extend(
					frozenset(c | leaf if cluster <= c else c for c in family) | {leaf}, added + 1
				)
			# New vertex above cluster's vertex
			grown = frozenset(c | leaf if cluster < c else c for c in family)
			yield from self._extend(grown | {cluster | leaf, leaf}, added + 1)

	def __iter__(self) -> Iterator[PhyloTree]:
		return (tree_from_clusters(family) for family in self.families())

	def count(self) -> int:
		return sum(1 for _ in self.families())


def naive_consensus(
	collection: TreeCollection, mode: ConsensusMode, threshold: int | None = None
) -> PhyloTree:
	"""Consensus tree from counting every cluster of every tree"""
	if not collection.leaf_sets_identical:
		raise NotCommonLeafSetError(
			f'Tree {collection.first_differing_leaf_set()} has a different leaf set to tree {collection.ids[0]}'
		)
	k = len(collection)
	counts = Counter(cluster for tree in collection for cluster in clusters_of(tree))
	if mode == ConsensusMode.Strict:
		cutoff = k
	elif mode == ConsensusMode.Majority:
		cutoff = k // 2 + 1
	else:
		if threshold is None or threshold * 2 <= k or threshold > k:
			raise ThresholdError(f'Threshold {threshold} is not in ({k / 2}, {k}]')
		cutoff = threshold
	return tree_from_clusters(cluster for cluster, count in counts.items() if count >= cutoff)


def _displays_all(family: ClusterFamily, trees: Sequence[tuple[Cluster, set[Cluster]]]) -> bool:
	for taxa, clusters in trees:
		restricted = {cluster & taxa for cluster in family}
		if not clusters <= restricted:
			return False
	return True


def brute_compat(collection: TreeCollection) -> PhyloTree | NotCompatible:
	"""First tree on all the taxa that displays every tree in collection, trying every tree there is"""
	taxa = collection.taxa
	enumerator = TopologyEnumerator(taxa, MAX_BRUTE_COMPAT_TAXA)
	trees = [(tree.taxa, clusters_of(tree)) for tree in collection]
	for family in enumerator.families():
		if _displays_all(family, trees):
			return tree_from_clusters(family)
	return NotCompatible(frozenset())


def random_taxa(n: int) -> list[str]:
	if n <= len(string.ascii_lowercase):
		return list(string.ascii_lowercase[:n])
	return [f't{i:03}' for i in range(n)]


def _random_nested(rng: numpy.random.Generator, taxa: Sequence[str], resolved: bool) -> Nested:
	subtrees: list[Nested] = list(taxa)
	while len(subtrees) > 1:
		size = 2 if resolved else int(rng.integers(2, min(len(subtrees), 4), endpoint=True))
		picked = sorted(rng.choice(len(subtrees), size, replace=False).tolist(), reverse=True)
		merged = [subtrees.pop(i) for i in picked]
		subtrees.append(merged)
	return subtrees[0]


def _random_subset(rng: numpy.random.Generator, taxa: Sequence[str]) -> list[str]:
	size = int(rng.integers(min(2, len(taxa)), len(taxa), endpoint=True))
	return sorted(rng.choice(list(taxa), size, replace=False).tolist())


def random_collection(
	seed: int,
	n: int,
	k: int,
	*,
	resolved: bool = False,
	partial: bool = False,
	compatible: bool = False,
) -> TreeCollection:
	"""k random trees on (some of) n taxa, always the same for the same arguments.

	Parameters:
		resolved: Make every tree binary
		partial: Give each tree a random subset of the taxa, instead of all of them
		compatible: Make every tree a restriction of one hidden tree (with some clusters dropped if not resolved), so the collection is compatible
	"""
	if n < 2:
		raise ValueError(f'Need at least 2 taxa, got {n}')
	if k < 1:
		raise ValueError(f'Need at least 1 tree, got {k}')
	rng = numpy.random.default_rng(seed)
	taxa = random_taxa(n)
	hidden = PhyloTree.from_nested(_random_nested(rng, taxa, resolved)) if compatible else None

	trees = []
	for _ in range(k):
		leaves = _random_subset(rng, taxa) if partial else taxa
		if hidden is None:
			trees.append(PhyloTree.from_nested(_random_nested(rng, leaves, resolved)))
			continue
		tree = hidden.restrict(leaves)
		if not resolved:
			kept = [cluster for cluster in clusters_of(tree) if len(cluster) == 1 or rng.random() >= 0.3]
			tree = tree_from_clusters(kept)
		trees.append(tree)
	logger.debug('Random collection (seed %d): %d trees on %d taxa', seed, k, n)
	return TreeCollection(tuple(trees), origins=tuple(f'random {seed} tree {i}' for i in range(k)))
