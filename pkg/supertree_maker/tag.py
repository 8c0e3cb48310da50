"""Order-independent tree alignment graph (TAG): one node per distinct cluster of the input trees, one edge per input tree edge"""

import heapq
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any, NamedTuple

import networkx
import numpy
from tqdm.auto import tqdm

from .clusters import BitString, LabelSpace, build_label_space, collect_bitstrings, sort_dedup
from .model import PhyloTree, TreeCollection

logger = logging.getLogger(__name__)


class NotCommonLeafSetError(ValueError):
	"""The input trees do not all have the same leaf set, which consensus methods require"""


class TagEdge(NamedTuple):
	source: int
	"""Node of the parent vertex's cluster"""
	target: int
	"""Node of the child vertex's cluster"""
	tree_id: int
	parent_vertex: int
	"""Vertex id of the parent in the input tree"""
	child_vertex: int


@dataclass(frozen=True, eq=False)
class Tag:
	"""Node ids are positions in bitstrings, which build_tag sorts, so node ids are canonical for a given collection"""

	space: LabelSpace
	bitstrings: tuple[BitString, ...]
	"""Cluster of each node"""
	counts: tuple[int, ...]
	"""Number of input trees containing each node's cluster"""
	edges: tuple[TagEdge, ...]
	"""Multi-edges, sorted by (tree_id, parent_vertex, child_vertex)"""
	tree_roots: dict[int, int]
	"""Node of each input tree's root cluster, by tree id"""
	k: int
	"""Number of trees the TAG was built from"""

	def __len__(self):
		return len(self.bitstrings)

	@property
	def nodes(self) -> range:
		return range(len(self.bitstrings))

	@cached_property
	def node_of(self) -> dict[BitString, int]:
		return {bits: node for node, bits in enumerate(self.bitstrings)}

	@cached_property
	def cardinalities(self) -> tuple[int, ...]:
		return tuple(bits.popcount for bits in self.bitstrings)

	def cardinality(self, node: int) -> int:
		return self.cardinalities[node]

	def count(self, node: int) -> int:
		return self.counts[node]

	@cached_property
	def leaf_name(self) -> dict[int, str]:
		"""Taxon name of each singleton node"""
		return {
			node: self.space.names[bits.indices[0]]
			for node, bits in enumerate(self.bitstrings)
			if bits.popcount == 1
		}

	def cluster(self, node: int) -> frozenset[str]:
		return self.space.decode(self.bitstrings[node])

	def node_for(self, taxa: Iterable[str]) -> int:
		"""Node whose cluster is exactly taxa; KeyError if there isn't one"""
		return self.node_of[self.space.encode(taxa)]

	@cached_property
	def simple_edges(self) -> numpy.ndarray:
		"""Distinct (source, target) pairs as an (E, 2) array, sorted"""
		if not self.edges:
			return numpy.zeros((0, 2), dtype=numpy.int64)
		pairs = numpy.array([(edge.source, edge.target) for edge in self.edges], dtype=numpy.int64)
		return numpy.unique(pairs, axis=0)

	@cached_property
	def successors(self) -> tuple[list[int], ...]:
		"""Successors of each node in the simple view, in increasing order"""
		successors: list[list[int]] = [[] for _ in self.nodes]
		for source, target in self.simple_edges.tolist():
			successors[source].append(target)
		return tuple(successors)

	@cached_property
	def in_degrees(self) -> tuple[int, ...]:
		"""In-degree of each node in the simple view"""
		degrees = numpy.bincount(self.simple_edges[:, 1], minlength=len(self))
		return tuple(degrees.tolist())

	def multigraph(self) -> networkx.MultiDiGraph:
		graph = networkx.MultiDiGraph()
		graph.add_nodes_from(self.nodes)
		graph.add_edges_from(
			(edge.source, edge.target, {'tree_id': edge.tree_id}) for edge in self.edges
		)
		return graph


def build_tag(collection: TreeCollection, *, use_tqdm: bool = False) -> Tag:
	"""Builds the TAG of a collection. The result does not depend on the order of trees in the collection, only on their ids."""
	space = build_label_space(collection)
	per_tree = [
		(tree_id, tree, collect_bitstrings(tree, space))
		for tree_id, tree in tqdm(
			collection.items(),
			'Collecting bit-strings',
			total=len(collection),
			unit='tree',
			leave=False,
			disable=not use_tqdm,
		)
	]
	unique = sort_dedup([bits for _, _, entries in per_tree for _, bits in entries])
	node_of = {bits: node for node, bits in enumerate(unique)}

	counts = [0] * len(unique)
	edges: list[TagEdge] = []
	tree_roots: dict[int, int] = {}
	for tree_id, tree, entries in per_tree:
		vertex_node = {vertex: node_of[bits] for vertex, bits in entries}
		# Clusters within one tree are distinct, so this counts trees, not occurrences
		for node in vertex_node.values():
			counts[node] += 1
		tree_roots[tree_id] = vertex_node[tree.root]
		for vertex, _ in entries:
			edges.extend(
				TagEdge(vertex_node[vertex], vertex_node[child], tree_id, vertex, child)
				for child in tree.children[vertex]
			)
	edges.sort(key=lambda edge: (edge.tree_id, edge.parent_vertex, edge.child_vertex))

	tag = Tag(
		space,
		tuple(unique),
		tuple(counts),
		tuple(edges),
		dict(sorted(tree_roots.items())),
		len(collection),
	)
	logger.info(
		'Built TAG of %d trees on %d taxa: %d nodes, %d edges', tag.k, space.n, len(tag), len(edges)
	)
	return tag


def assert_acyclic(tag: Tag) -> bool:
	"""True if the TAG has no directed cycle, as every TAG from build_tag should"""
	return networkx.is_directed_acyclic_graph(tag.multigraph())


def simple_view(tag: Tag) -> networkx.DiGraph:
	"""The TAG with parallel edges merged. Nodes carry cardinality and count."""
	graph = networkx.DiGraph()
	graph.add_nodes_from(
		(node, {'cardinality': tag.cardinality(node), 'count': tag.count(node)}) for node in tag.nodes
	)
	graph.add_edges_from(tag.simple_edges.tolist())
	return graph


def in_degree_zero_nodes(tag: Tag) -> list[int]:
	return [node for node, degree in enumerate(tag.in_degrees) if degree == 0]


def tag_root(tag: Tag) -> int:
	"""The only node without incoming edges, whose cluster is every taxon. Only exists if all input trees have the same leaf set."""
	roots = in_degree_zero_nodes(tag)
	if len(roots) != 1:
		clusters = '; '.join(f'{{{tag.space.format(tag.bitstrings[root])}}}' for root in roots[:5])
		raise NotCommonLeafSetError(
			f'TAG has {len(roots)} nodes with in-degree zero ({clusters}), so the input trees do not share one leaf set'
		)
	return roots[0]


def topological_order(tag: Tag, exclude: Iterable[int] = ()) -> list[int]:
	"""Orders nodes of the simple view so every edge goes forward, by repeatedly taking the smallest node id with no remaining incoming edges.

	Parameters:
		exclude: Nodes to leave out, along with their outgoing edges
	"""
	excluded = set(exclude)
	remaining = list(tag.in_degrees)
	for node in excluded:
		for successor in tag.successors[node]:
			remaining[successor] -= 1
	ready = [node for node in tag.nodes if remaining[node] == 0 and node not in excluded]
	heapq.heapify(ready)
	order: list[int] = []
	while ready:
		node = heapq.heappop(ready)
		order.append(node)
		for successor in tag.successors[node]:
			remaining[successor] -= 1
			if remaining[successor] == 0:
				heapq.heappush(ready, successor)
	return order


def tree_from_tag(tag: Tag, tree_id: int) -> PhyloTree:
	"""Recovers an input tree from the edges it contributed to the TAG (up to vertex numbering)"""
	if tree_id not in tag.tree_roots:
		raise KeyError(f'TAG has no tree with id {tree_id}')
	tree_edges = [edge for edge in tag.edges if edge.tree_id == tree_id]
	root_node = tag.tree_roots[tree_id]
	if not tree_edges:
		return PhyloTree.from_nested(tag.leaf_name[root_node])
	vertex_node = {edge.child_vertex: edge.target for edge in tree_edges}
	vertex_node.update((edge.parent_vertex, edge.source) for edge in tree_edges)
	has_children = {edge.parent_vertex for edge in tree_edges}
	labels = {
		vertex: tag.leaf_name[node] for vertex, node in vertex_node.items() if vertex not in has_children
	}
	root_vertex = next(iter(has_children - {edge.child_vertex for edge in tree_edges}))
	return PhyloTree.from_edges(
		((edge.parent_vertex, edge.child_vertex) for edge in tree_edges), labels, root_vertex
	)


def rdg_node_count(tag: Tag) -> int:
	"""Nodes in the restricted descendancy graph of the same trees: one per internal input tree vertex, plus one per taxon"""
	return len({(edge.tree_id, edge.parent_vertex) for edge in tag.edges}) + tag.space.n


def tag_summary(tag: Tag) -> dict[str, Any]:
	return {
		'trees': tag.k,
		'taxa': tag.space.n,
		'nodes': len(tag),
		'edges': len(tag.edges),
		'simple_edges': int(tag.simple_edges.shape[0]),
		'in_degree_zero_nodes': len(in_degree_zero_nodes(tag)),
		'majority_nodes': sum(1 for count in tag.counts if count * 2 > tag.k),
		'strict_nodes': sum(1 for count in tag.counts if count == tag.k),
		'rdg_nodes': rdg_node_count(tag),
	}


def tag_from_parts(
	space: LabelSpace,
	clusters: Sequence[Iterable[str]],
	counts: Sequence[int],
	edges: Iterable[TagEdge],
	tree_roots: dict[int, int],
	k: int,
) -> Tag:
	"""Assembles a Tag from explicit parts without checking any TAG invariants (for loading and for tests)"""
	return Tag(
		space,
		tuple(space.encode(cluster) for cluster in clusters),
		tuple(counts),
		tuple(edges),
		tree_roots,
		k,
	)
