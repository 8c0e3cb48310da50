"""Rooted phylogenetic trees and collections of them"""

from collections import Counter, defaultdict
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

Nested = str | Sequence['Nested']
"""A tree written as nested sequences, where strings are leaves"""


class TreeStructureError(ValueError):
	"""A tree does not satisfy the phylogenetic tree invariants"""


@dataclass(frozen=True, eq=False)
class PhyloTree:
	"""A rooted tree with a bijective leaf labelling. Vertices are numbered 0..len(children) - 1.

	Every internal vertex other than the root has at least two children, and so does the root unless the tree is a single labelled leaf."""

	children: tuple[tuple[int, ...], ...]
	"""Child vertex ids of each vertex, in the order they were read"""
	leaf_label: Mapping[int, str]
	"""Taxon name of each leaf vertex"""
	root: int = 0

	def __post_init__(self):
		vertex_count = len(self.children)
		if not 0 <= self.root < vertex_count:
			raise TreeStructureError(f'Root {self.root} is not a vertex of a tree with {vertex_count} vertices')
		parents: dict[int, int] = {}
		for vertex, kids in enumerate(self.children):
			for child in kids:
				if not 0 <= child < vertex_count:
					raise TreeStructureError(f'Vertex {vertex} has nonexistent child {child}')
				if child in parents:
					raise TreeStructureError(f'Vertex {child} has more than one parent')
				parents[child] = vertex
		if self.root in parents:
			raise TreeStructureError('The root has a parent')
		if len(parents) != vertex_count - 1:
			raise TreeStructureError('Tree has more than one root')
		# With one parent per non-root vertex, anything unreachable from the root sits on a cycle
		if len(self.postorder()) != vertex_count:
			raise TreeStructureError('Tree contains a cycle')

		for vertex, kids in enumerate(self.children):
			if len(kids) == 1:
				raise TreeStructureError(f'Internal vertex {vertex} has only one child')
			if not kids and vertex not in self.leaf_label:
				raise TreeStructureError(f'Leaf {vertex} has no taxon name')
			if kids and vertex in self.leaf_label:
				raise TreeStructureError(f'Internal vertex {vertex} has a taxon name')
		if len(set(self.leaf_label.values())) != len(self.leaf_label):
			counts = Counter(self.leaf_label.values())
			duplicates = sorted(name for name, count in counts.items() if count > 1)
			raise TreeStructureError(f'Duplicate taxon names: {", ".join(duplicates)}')

	@classmethod
	def from_nested(cls, nested: Nested, *, suppress_unary: bool = False) -> 'PhyloTree':
		"""Builds a tree from nested sequences, e.g. [['a', 'b'], 'c'] is ((a,b),c)

		Parameters:
			suppress_unary: Replace any vertex with only one child by that child, instead of rejecting the tree
		"""
		children: list[list[int]] = []
		leaf_label: dict[int, str] = {}
		stack: list[tuple[Nested, int]] = [(nested, -1)]
		while stack:
			node, parent = stack.pop()
			while suppress_unary and not isinstance(node, str) and len(node) == 1:
				node = node[0]
			vertex = len(children)
			children.append([])
			if parent >= 0:
				children[parent].append(vertex)
			if isinstance(node, str):
				leaf_label[vertex] = node
			else:
				stack.extend((child, vertex) for child in reversed(node))
		return cls(tuple(tuple(kids) for kids in children), leaf_label)

	@classmethod
	def from_edges(
		cls,
		edges: Iterable[tuple[Hashable, Hashable]],
		leaf_label: Mapping[Hashable, str],
		root: Hashable,
	) -> 'PhyloTree':
		"""Builds a tree from (parent, child) pairs over arbitrary hashable keys. Keys not reachable from root are ignored."""
		child_keys: defaultdict[Hashable, list[Hashable]] = defaultdict(list)
		for parent, child in edges:
			child_keys[parent].append(child)

		children: list[list[int]] = [[]]
		labels: dict[int, str] = {}
		stack = [(root, 0)]
		while stack:
			key, vertex = stack.pop()
			kids = child_keys.get(key, ())
			if not kids and key in leaf_label:
				labels[vertex] = leaf_label[key]
			for child in kids:
				child_vertex = len(children)
				children.append([])
				children[vertex].append(child_vertex)
				stack.append((child, child_vertex))
		return cls(tuple(tuple(kids) for kids in children), labels)

	@property
	def vertices(self) -> range:
		return range(len(self.children))

	def is_leaf(self, vertex: int) -> bool:
		return not self.children[vertex]

	@cached_property
	def parent(self) -> tuple[int | None, ...]:
		parents: list[int | None] = [None] * len(self.children)
		for vertex, kids in enumerate(self.children):
			for child in kids:
				parents[child] = vertex
		return tuple(parents)

	@cached_property
	def leaves(self) -> tuple[int, ...]:
		return tuple(vertex for vertex in self.vertices if self.is_leaf(vertex))

	@cached_property
	def internal_vertices(self) -> tuple[int, ...]:
		return tuple(vertex for vertex in self.vertices if not self.is_leaf(vertex))

	@cached_property
	def taxa(self) -> frozenset[str]:
		return frozenset(self.leaf_label.values())

	@property
	def is_binary(self) -> bool:
		return all(len(kids) in {0, 2} for kids in self.children)

	def postorder(self) -> list[int]:
		"""Vertices with every child before its parent, children in their stored order"""
		order: list[int] = []
		stack = [(self.root, False)]
		while stack:
			vertex, expanded = stack.pop()
			if expanded:
				order.append(vertex)
				continue
			stack.append((vertex, True))
			stack.extend((child, False) for child in reversed(self.children[vertex]))
		return order

	def edges(self) -> Iterator[tuple[int, int]]:
		"""(parent, child) pairs"""
		for vertex, kids in enumerate(self.children):
			for child in kids:
				yield vertex, child

	@cached_property
	def vertex_clusters(self) -> tuple[frozenset[str], ...]:
		"""The cluster of each vertex, i.e. the taxon names of the leaves below it"""
		clusters: list[frozenset[str]] = [frozenset()] * len(self.children)
		for vertex in self.postorder():
			if self.is_leaf(vertex):
				clusters[vertex] = frozenset((self.leaf_label[vertex],))
			else:
				clusters[vertex] = frozenset().union(*(clusters[child] for child in self.children[vertex]))
		return tuple(clusters)

	def cluster(self, vertex: int) -> frozenset[str]:
		return self.vertex_clusters[vertex]

	def restrict(self, taxa: Iterable[str]) -> 'PhyloTree':
		"""Returns the minimal subtree connecting the given taxa, with vertices of degree two suppressed"""
		keep = frozenset(taxa)
		if not keep:
			raise ValueError('Cannot restrict a tree to no taxa')
		if not keep <= self.taxa:
			missing = ', '.join(sorted(keep - self.taxa))
			raise ValueError(f'Taxa not in tree: {missing}')
		nested: dict[int, Nested] = {}
		for vertex in self.postorder():
			if self.is_leaf(vertex):
				if self.leaf_label[vertex] in keep:
					nested[vertex] = self.leaf_label[vertex]
				continue
			kept = [nested[child] for child in self.children[vertex] if child in nested]
			if kept:
				nested[vertex] = kept
		return PhyloTree.from_nested(nested[self.root], suppress_unary=True)


def clusters_of(tree: PhyloTree) -> set[frozenset[str]]:
	"""All clusters of a tree, trivial ones included"""
	return set(tree.vertex_clusters)


@dataclass(frozen=True)
class TreeCollection:
	trees: tuple[PhyloTree, ...]
	ids: tuple[int, ...] = ()
	"""Stable identifier of each tree, defaults to its position; a permutation of 0..k - 1"""
	origins: tuple[str, ...] = field(default=(), compare=False)
	"""Where each tree was read from (e.g. file:line), only used for error messages"""

	def __post_init__(self):
		if not self.trees:
			raise ValueError('A tree collection needs at least one tree')
		if not self.ids:
			object.__setattr__(self, 'ids', tuple(range(len(self.trees))))
		if sorted(self.ids) != list(range(len(self.trees))):
			raise ValueError(f'Tree ids must be a permutation of 0..{len(self.trees) - 1}, got {self.ids}')
		if self.origins and len(self.origins) != len(self.trees):
			raise ValueError('There must be one origin per tree')

	@classmethod
	def concatenate(cls, collections: Iterable['TreeCollection']) -> 'TreeCollection':
		"""Joins collections in order, numbering trees afresh"""
		trees: list[PhyloTree] = []
		origins: list[str] = []
		for collection in collections:
			trees += collection.trees
			origins += collection.origins or [f'tree {tree_id}' for tree_id in collection.ids]
		return cls(tuple(trees), origins=tuple(origins))

	def __len__(self):
		return len(self.trees)

	def __iter__(self) -> Iterator[PhyloTree]:
		return iter(self.trees)

	def items(self) -> Iterator[tuple[int, PhyloTree]]:
		return zip(self.ids, self.trees, strict=True)

	@cached_property
	def _position(self) -> dict[int, int]:
		return {tree_id: position for position, tree_id in enumerate(self.ids)}

	def tree(self, tree_id: int) -> PhyloTree:
		return self.trees[self._position[tree_id]]

	def origin(self, tree_id: int) -> str:
		if self.origins:
			return self.origins[self._position[tree_id]]
		return f'tree {tree_id}'

	def permuted(self, order: Sequence[int]) -> 'TreeCollection':
		"""The same trees in the given order of tree ids; each tree keeps its id"""
		if sorted(order) != sorted(self.ids):
			raise ValueError(f'{order} is not a permutation of the tree ids')
		positions = [self._position[tree_id] for tree_id in order]
		return TreeCollection(
			tuple(self.trees[p] for p in positions),
			tuple(order),
			tuple(self.origins[p] for p in positions) if self.origins else (),
		)

	@cached_property
	def taxa(self) -> frozenset[str]:
		return frozenset().union(*(tree.taxa for tree in self.trees))

	@property
	def leaf_sets_identical(self) -> bool:
		first = self.trees[0].taxa
		return all(tree.taxa == first for tree in self.trees)

	def first_differing_leaf_set(self) -> int | None:
		"""Id of the first tree whose leaf set differs from the first tree's, or None"""
		first = self.trees[0].taxa
		for tree_id, tree in self.items():
			if tree.taxa != first:
				return tree_id
		return None
