"""The older procedural TAG, which adds trees one at a time and so can depend on the order they are added in"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy

from .clusters import BitString, LabelSpace, build_label_space, collect_bitstrings
from .model import PhyloTree, TreeCollection
from .tag import TagEdge

logger = logging.getLogger(__name__)

VertexKey = tuple[int, int]
"""(tree id, vertex id in that tree)"""


@dataclass
class ProcTag:
	"""Nodes are numbered in the order they were created. Unlike Tag, several nodes can stand in for one input tree vertex."""

	space: LabelSpace
	bitstrings: list[BitString]
	edges: list[TagEdge] = field(default_factory=list)
	mapping: dict[VertexKey, frozenset[int]] = field(default_factory=dict)
	"""Nodes each internal vertex of each input tree maps to"""
	created_by: dict[VertexKey, int] = field(default_factory=dict)
	"""Node each internal vertex had to create because nothing else fit it"""
	insertion_order: tuple[int, ...] = ()
	"""Tree ids in the order they were processed"""

	def __len__(self):
		return len(self.bitstrings)

	@property
	def nodes(self) -> range:
		return range(len(self.bitstrings))

	@property
	def node_of(self) -> dict[BitString, int]:
		return {bits: node for node, bits in enumerate(self.bitstrings)}

	@property
	def matrix(self) -> numpy.ndarray:
		"""Packed bit-string of each node as rows"""
		return numpy.frombuffer(
			b''.join(bits.packed for bits in self.bitstrings), dtype=numpy.uint8
		).reshape(len(self.bitstrings), self.space.n_bytes)

	def cluster(self, node: int) -> frozenset[str]:
		return self.space.decode(self.bitstrings[node])

	def has_cluster(self, taxa: Iterable[str]) -> bool:
		return self.space.encode(taxa) in self.node_of

	def node_for(self, taxa: Iterable[str]) -> int:
		return self.node_of[self.space.encode(taxa)]

	def cluster_set(self) -> frozenset[frozenset[str]]:
		return frozenset(self.cluster(node) for node in self.nodes)

	def simple_edges(self) -> set[tuple[int, int]]:
		return {(edge.source, edge.target) for edge in self.edges}

	def node_set_key(self) -> tuple[str, ...]:
		"""Clusters of all nodes, identifying the node set regardless of creation order"""
		return tuple(sorted(bits.hex() for bits in self.bitstrings))

	def signature(self) -> tuple[tuple[str, ...], tuple[tuple[str, str, int], ...]]:
		"""Node set and provenance edges in terms of clusters. Nodes are identified by their clusters, so two ProcTags are isomorphic iff their signatures are equal."""
		edges = sorted(
			(self.bitstrings[edge.source].hex(), self.bitstrings[edge.target].hex(), edge.tree_id)
			for edge in self.edges
		)
		return self.node_set_key(), tuple(edges)

	def copy(self) -> 'ProcTag':
		return ProcTag(
			self.space,
			list(self.bitstrings),
			list(self.edges),
			dict(self.mapping),
			dict(self.created_by),
			self.insertion_order,
		)

	def to_dict(self) -> dict[str, Any]:
		return {
			'labels': list(self.space.names),
			'insertion_order': list(self.insertion_order),
			'nodes': [self.space.format(bits) for bits in self.bitstrings],
			'edges': [list(edge) for edge in sorted_edges(self.edges)],
		}


def sorted_edges(edges: Iterable[TagEdge]) -> list[TagEdge]:
	return sorted(edges, key=lambda edge: (edge.tree_id, edge.parent_vertex, edge.child_vertex, edge.source, edge.target))


class _TreeView:
	"""Bit-strings of one input tree against a ProcTag's label space"""

	def __init__(self, tree_id: int, tree: PhyloTree, space: LabelSpace):
		self.tree_id = tree_id
		self.tree = tree
		self.space = space
		self.bits = dict(collect_bitstrings(tree, space))
		self.leaf_bits = self.bits[tree.root]
		"""Leaf set of the whole tree"""

	def candidates(self, vertex: int, matrix: numpy.ndarray) -> list[int]:
		"""Nodes u whose cluster meets C(v), contains none of the tree's other taxa, and contains all of C(v)"""
		cluster = self.bits[vertex].array
		others = self.leaf_bits.array & ~cluster
		meets = (matrix & cluster).any(axis=1)
		no_others = ~(matrix & others).any(axis=1)
		contains = ~(cluster & ~matrix).any(axis=1)
		return numpy.flatnonzero(meets & no_others & contains).tolist()


def _prune_chains(candidates: Iterable[int], successors: dict[int, set[int]]) -> frozenset[int]:
	"""Of mapped nodes joined by an edge, keeps only the lower one; only the bottom of each chain survives"""
	mapped = frozenset(candidates)
	return frozenset(u for u in mapped if not (successors.get(u, set()) & mapped))


def _successors(edges: Iterable[TagEdge]) -> dict[int, set[int]]:
	successors: dict[int, set[int]] = {}
	for edge in edges:
		successors.setdefault(edge.source, set()).add(edge.target)
	return successors


def _initial(space: LabelSpace) -> list[BitString]:
	everything = BitString.full(space.n)
	singletons = [BitString.from_indices((i,), space.n) for i in range(space.n)]
	# With only one taxon, S is itself a singleton
	return singletons if space.n == 1 else [everything, *singletons]


def _mapped(proc: ProcTag, view: _TreeView, vertex: int, node_of: dict[BitString, int]) -> frozenset[int]:
	if view.tree.is_leaf(vertex):
		return frozenset((node_of[view.bits[vertex]],))
	return proc.mapping[view.tree_id, vertex]


def _tree_edges(proc: ProcTag, view: _TreeView, parent: int, child: int, node_of: dict[BitString, int]) -> list[TagEdge]:
	return [
		TagEdge(source, target, view.tree_id, parent, child)
		for source in sorted(_mapped(proc, view, parent, node_of))
		for target in sorted(_mapped(proc, view, child, node_of))
	]


def _add_tree(proc: ProcTag, view: _TreeView):
	tree = view.tree
	node_of = proc.node_of
	successors = _successors(proc.edges)
	# A node created for this tree only fits the vertex with exactly its cluster, so matrix is not refreshed
	matrix = proc.matrix
	for vertex in tree.internal_vertices:
		candidates = view.candidates(vertex, matrix)
		if not candidates:
			node = len(proc.bitstrings)
			proc.bitstrings.append(view.bits[vertex])
			node_of[view.bits[vertex]] = node
			proc.created_by[view.tree_id, vertex] = node
			proc.mapping[view.tree_id, vertex] = frozenset((node,))
			logger.debug('Tree %d vertex %d: new node %s', view.tree_id, vertex, view.bits[vertex])
			continue
		mapped = _prune_chains(candidates, successors)
		proc.mapping[view.tree_id, vertex] = mapped
		if logger.isEnabledFor(logging.DEBUG):
			logger.debug(
				'Tree %d vertex %d maps to %s',
				view.tree_id,
				vertex,
				'; '.join(proc.space.format(proc.bitstrings[u]) for u in sorted(mapped)),
			)
	for parent, child in tree.edges():
		proc.edges.extend(_tree_edges(proc, view, parent, child, node_of))


def build_smith_tag(collection: TreeCollection, order: Sequence[int] | None = None) -> ProcTag:
	"""Adds the trees one at a time in the given order of tree ids (by default, the collection's order).

	Each internal vertex maps to every node whose cluster contains its cluster and none of the tree's other taxa, or to a new node if there is none. Mapped nodes joined by an edge are pruned down to the lowest one. Every tree edge then becomes edges between all mappings of its endpoints."""
	if order is None:
		order = collection.ids
	if sorted(order) != sorted(collection.ids):
		raise ValueError(f'{order} is not a permutation of the tree ids')
	space = build_label_space(collection)
	proc = ProcTag(space, _initial(space), insertion_order=tuple(order))
	for tree_id in order:
		_add_tree(proc, _TreeView(tree_id, collection.tree(tree_id), space))
	proc.edges = sorted_edges(proc.edges)
	logger.info('Procedural TAG in order %s has %d nodes, %d edges', list(order), len(proc), len(proc.edges))
	return proc


def post_process(proc: ProcTag, collection: TreeCollection) -> ProcTag:
	"""One pass recomputing the mapping of every internal vertex against the final node set, replacing the edges of any vertex whose mapping changed. Returns a new ProcTag.

	A vertex is remapped as if its tree had been added last: a node it created itself is only kept if nothing else fits it now."""
	result = proc.copy()
	node_of = result.node_of
	matrix = result.matrix
	changed = 0
	for tree_id in result.insertion_order:
		view = _TreeView(tree_id, collection.tree(tree_id), result.space)
		for vertex in view.tree.internal_vertices:
			candidates = view.candidates(vertex, matrix)
			own = result.created_by.get((tree_id, vertex))
			if own is not None and len(candidates) > 1:
				candidates = [u for u in candidates if u != own]
			mapped = _prune_chains(candidates, _successors(result.edges))
			if mapped == result.mapping[tree_id, vertex]:
				continue
			changed += 1
			logger.debug('Tree %d vertex %d remapped', tree_id, vertex)
			result.mapping[tree_id, vertex] = mapped
			result.edges = [
				edge
				for edge in result.edges
				if edge.tree_id != tree_id or vertex not in {edge.parent_vertex, edge.child_vertex}
			]
			parent = view.tree.parent[vertex]
			if parent is not None:
				result.edges += _tree_edges(result, view, parent, vertex, node_of)
			for child in view.tree.children[vertex]:
				result.edges += _tree_edges(result, view, vertex, child, node_of)
	result.edges = sorted_edges(result.edges)
	logger.info('Post-processing remapped %d vertices', changed)
	return result
