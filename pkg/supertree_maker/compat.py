"""Compatibility testing and supertree construction on the extended TAG (the TAG plus undirected edges between sibling clusters)"""

import itertools
import logging
from collections import defaultdict
from collections.abc import Collection
from dataclasses import dataclass
from functools import cached_property

import networkx

from .model import Nested, PhyloTree, TreeCollection, clusters_of
from .tag import Tag, build_tag, simple_view

logger = logging.getLogger(__name__)

ArcComponent = frozenset[int]
"""Nodes joined by directed edges regardless of direction"""


class DisplayCheckError(AssertionError):
	"""A supertree from descendant does not display one of the input trees, which means there is a bug somewhere"""


@dataclass(frozen=True)
class NotCompatible:
	"""No tree displays every input tree"""

	stuck_nodes: frozenset[int]
	"""Nodes of the first sub-problem where every node had an incoming or undirected edge"""

	def clusters(self, tag: Tag) -> list[str]:
		return sorted(f'{{{tag.space.format(tag.bitstrings[node])}}}' for node in self.stuck_nodes)


@dataclass(frozen=True, eq=False)
class ExtendedTag:
	"""A mixed graph over some of the nodes of a TAG. Restrictions share the full graphs and only narrow nodes."""

	tag: Tag
	directed_graph: networkx.DiGraph
	"""Simple view of the whole TAG"""
	sibling_graph: networkx.Graph
	"""Undirected edges of the whole TAG"""
	nodes: frozenset[int]

	@cached_property
	def directed(self) -> networkx.DiGraph:
		return self.directed_graph.subgraph(self.nodes)

	@cached_property
	def undirected(self) -> networkx.Graph:
		return self.sibling_graph.subgraph(self.nodes)

	@property
	def directed_edges(self) -> set[tuple[int, int]]:
		return set(self.directed.edges)

	@property
	def undirected_edges(self) -> set[frozenset[int]]:
		return {frozenset(edge) for edge in self.undirected.edges}

	def restrict(self, nodes: Collection[int]) -> 'ExtendedTag':
		"""Sub-mixed graph on nodes, dropping every edge with an endpoint elsewhere"""
		return ExtendedTag(self.tag, self.directed_graph, self.sibling_graph, self.nodes & frozenset(nodes))


def build_extended_tag(tag: Tag, collection: TreeCollection | None = None) -> ExtendedTag:
	"""Adds an undirected edge between the nodes of every two sibling vertices of every input tree.

	The sibling pairs are read from the TAG edges, which record each child's parent vertex; collection is only used to check that tag came from it."""
	if collection is not None and len(collection) != tag.k:
		raise ValueError(f'TAG was built from {tag.k} trees, not {len(collection)}')
	siblings_of: defaultdict[tuple[int, int], list[int]] = defaultdict(list)
	for edge in tag.edges:
		siblings_of[edge.tree_id, edge.parent_vertex].append(edge.target)

	sibling_graph = networkx.Graph()
	sibling_graph.add_nodes_from(tag.nodes)
	for siblings in siblings_of.values():
		# O(degree^2) pairs for unresolved vertices
		sibling_graph.add_edges_from(
			(u, v) for u, v in itertools.combinations(siblings, 2) if u != v
		)
	extended = ExtendedTag(tag, simple_view(tag), sibling_graph, frozenset(tag.nodes))
	logger.info('Extended TAG has %d undirected edges', sibling_graph.number_of_edges())
	return extended


def arc_components(graph: ExtendedTag) -> list[ArcComponent]:
	"""Partitions the nodes by connectivity through directed edges, ignoring direction; undirected edges do not join components"""
	components = [frozenset(c) for c in networkx.weakly_connected_components(graph.directed)]
	return sorted(components, key=min)


class _Neighbours:
	"""Neighbour tuples of every node of an extended TAG, read from its graphs once"""

	def __init__(self, graph: ExtendedTag):
		directed = graph.directed
		undirected = graph.undirected
		self.predecessors = {node: tuple(directed.predecessors(node)) for node in graph.nodes}
		self.successors = {node: tuple(directed.successors(node)) for node in graph.nodes}
		self.siblings = {node: tuple(undirected.neighbors(node)) for node in graph.nodes}

	def start_nodes(self, nodes: frozenset[int]) -> list[int]:
		"""Nodes with no incoming and no undirected edge from within nodes"""
		return sorted(
			node
			for node in nodes
			if not any(other in nodes for other in self.predecessors[node])
			and not any(other in nodes for other in self.siblings[node])
		)

	def is_sink(self, node: int, nodes: frozenset[int]) -> bool:
		return not any(other in nodes for other in self.successors[node])

	def arc_components(self, nodes: frozenset[int]) -> list[ArcComponent]:
		"""Same partition and order as arc_components on the restriction to nodes"""
		seen: set[int] = set()
		components: list[ArcComponent] = []
		for node in sorted(nodes):
			if node in seen:
				continue
			component = {node}
			frontier = [node]
			while frontier:
				current = frontier.pop()
				for other in itertools.chain(self.predecessors[current], self.successors[current]):
					if other in nodes and other not in component:
						component.add(other)
						frontier.append(other)
			seen |= component
			components.append(frozenset(component))
		return components


def descendant(graph: ExtendedTag) -> PhyloTree | NotCompatible:
	"""Returns a tree displaying every input tree the extended TAG was built from, or NotCompatible if there is none.

	Sub-problems are kept on an explicit stack. Each one appends its subtree list to its parent's list, and lists with one element are contracted when the tree is built."""
	neighbours = _Neighbours(graph)
	leaf_name = graph.tag.leaf_name
	top: list[Nested] = []
	stack: list[tuple[frozenset[int], list[Nested]]] = [(graph.nodes, top)]
	while stack:
		nodes, parent = stack.pop()
		start = neighbours.start_nodes(nodes)
		if not start:
			logger.debug('No start nodes among %d nodes', len(nodes))
			return NotCompatible(nodes)
		logger.debug('Start nodes %s', start)

		# Out-degree zero nodes are singleton clusters. One in the start set has nothing below it and
		# appears in no other tree except as a whole tree, so it hangs straight off this root.
		subtrees: list[Nested] = [leaf_name[node] for node in start if neighbours.is_sink(node, nodes)]
		parent.append(subtrees)
		rest = nodes - frozenset(start)
		# First component on top; a sub-problem never sees undirected edges leaving its own nodes
		stack.extend((component, subtrees) for component in reversed(neighbours.arc_components(rest)))
	return PhyloTree.from_nested(top[0], suppress_unary=True)


def displays(supertree: PhyloTree, tree: PhyloTree) -> bool:
	"""True if the restriction of supertree to tree's taxa refines tree, i.e. every cluster of tree is a cluster of the restriction"""
	taxa = tree.taxa
	if not taxa <= supertree.taxa:
		missing = ', '.join(sorted(taxa - supertree.taxa))
		raise ValueError(f'Supertree is missing taxa {missing}')
	# Clusters of a restriction are the non-empty intersections of the clusters with the kept taxa
	restricted = {cluster & taxa for cluster in supertree.vertex_clusters}
	return clusters_of(tree) <= restricted


def check_compatibility(
	collection: TreeCollection, *, verify: bool = True, tag: Tag | None = None
) -> PhyloTree | NotCompatible:
	"""Builds the extended TAG of collection and runs descendant on it.

	Parameters:
		verify: Check that a returned supertree displays every input tree, raising DisplayCheckError if not
		tag: TAG of collection if already built
	"""
	if tag is None:
		tag = build_tag(collection)
	result = descendant(build_extended_tag(tag, collection))
	if isinstance(result, NotCompatible):
		logger.info('Trees are not compatible (stuck on %d nodes)', len(result.stuck_nodes))
		return result
	if verify:
		for tree_id, tree in collection.items():
			if not displays(result, tree):
				raise DisplayCheckError(
					f'Supertree does not display {collection.origin(tree_id)} (tree {tree_id})'
				)
	logger.info('Trees are compatible')
	return result
