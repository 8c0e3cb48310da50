"""Encoding clusters as bit-strings over a global taxon numbering, and sorting/deduplicating them"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy

from .model import PhyloTree, TreeCollection


class UnknownTaxonError(KeyError):
	"""A taxon name is not part of the label space"""


@dataclass(frozen=True, order=True)
class BitString:
	"""A non-empty cluster as a fixed-width bit vector. Bit i is set if taxon i of the label space is in the cluster.

	Bits are packed most significant first, so bit 0 is the high bit of the first byte, and comparing packed bytes compares the bit-strings lexicographically."""

	packed: bytes
	width: int

	def __post_init__(self):
		if len(self.packed) != packed_size(self.width):
			raise ValueError(f'{len(self.packed)} bytes cannot hold exactly {self.width} bits')
		if not any(self.packed):
			raise ValueError('Clusters cannot be empty')

	@classmethod
	def from_indices(cls, indices: Iterable[int], width: int) -> 'BitString':
		bits = numpy.zeros(width, dtype=bool)
		bits[list(indices)] = True
		return cls(numpy.packbits(bits).tobytes(), width)

	@classmethod
	def from_hex(cls, hex_string: str, width: int) -> 'BitString':
		return cls(bytes.fromhex(hex_string), width)

	@classmethod
	def full(cls, width: int) -> 'BitString':
		return cls.from_indices(range(width), width)

	@property
	def array(self) -> numpy.ndarray:
		return numpy.frombuffer(self.packed, dtype=numpy.uint8)

	@cached_property
	def indices(self) -> tuple[int, ...]:
		return tuple(numpy.flatnonzero(numpy.unpackbits(self.array, count=self.width)).tolist())

	@property
	def popcount(self) -> int:
		return len(self.indices)

	def __or__(self, other: 'BitString') -> 'BitString':
		return BitString((self.array | other.array).tobytes(), self.width)

	def issubset(self, other: 'BitString') -> bool:
		return not (self.array & ~other.array).any()

	def is_proper_subset(self, other: 'BitString') -> bool:
		return self != other and self.issubset(other)

	def intersects(self, other: 'BitString') -> bool:
		return bool((self.array & other.array).any())

	def hex(self) -> str:
		return self.packed.hex()

	def __str__(self):
		return ''.join('1' if bit else '0' for bit in numpy.unpackbits(self.array, count=self.width))


def packed_size(width: int) -> int:
	return (width + 7) // 8


@dataclass(frozen=True, eq=False)
class LabelSpace:
	"""Numbering of all taxon names in a collection"""

	names: tuple[str, ...]
	"""Taxon name of each index"""

	def __post_init__(self):
		if len(set(self.names)) != len(self.names):
			raise ValueError('Taxon names in a label space must be distinct')

	@cached_property
	def index(self) -> dict[str, int]:
		return {name: i for i, name in enumerate(self.names)}

	@property
	def n(self) -> int:
		return len(self.names)

	@property
	def n_bytes(self) -> int:
		return packed_size(self.n)

	def __len__(self):
		return self.n

	def index_of(self, name: str) -> int:
		try:
			return self.index[name]
		except KeyError:
			raise UnknownTaxonError(name) from None

	def encode(self, names: Iterable[str]) -> BitString:
		return BitString.from_indices((self.index_of(name) for name in names), self.n)

	def decode(self, bits: BitString) -> frozenset[str]:
		return frozenset(self.names[i] for i in bits.indices)

	def format(self, bits: BitString) -> str:
		"""Cluster as sorted, comma separated taxon names"""
		return ','.join(self.names[i] for i in bits.indices)


def build_label_space(collection: TreeCollection) -> LabelSpace:
	"""Numbers every taxon in the collection, in lexicographic order of name"""
	return LabelSpace(tuple(sorted(collection.taxa)))


def collect_bitstring_matrix(tree: PhyloTree, space: LabelSpace) -> tuple[list[int], numpy.ndarray]:
	"""Returns (vertices in post-order, packed bit-string of each vertex as rows of a uint8 matrix indexed by vertex id)"""
	order = tree.postorder()
	matrix = numpy.zeros((len(tree.children), space.n_bytes), dtype=numpy.uint8)
	for vertex in order:
		kids = tree.children[vertex]
		if kids:
			matrix[vertex] = numpy.bitwise_or.reduce(matrix[list(kids)], axis=0)
		else:
			index = space.index_of(tree.leaf_label[vertex])
			matrix[vertex, index >> 3] = 0x80 >> (index & 7)
	return order, matrix


def collect_bitstrings(tree: PhyloTree, space: LabelSpace) -> list[tuple[int, BitString]]:
	"""The bit-string of every vertex, in post-order"""
	order, matrix = collect_bitstring_matrix(tree, space)
	return [(vertex, BitString(matrix[vertex].tobytes(), space.n)) for vertex in order]


def radix_sort_rows(matrix: numpy.ndarray) -> numpy.ndarray:
	"""Returns the permutation of rows that sorts a uint8 matrix lexicographically.

	Least significant digit first, one byte column per pass; each pass is a stable sort of 8-bit keys, which numpy does by counting."""
	order = numpy.arange(matrix.shape[0])
	for column in reversed(range(matrix.shape[1])):
		order = order[numpy.argsort(matrix[order, column], kind='stable')]
	return order


def sort_dedup(bitstrings: Sequence[BitString]) -> list[BitString]:
	"""Sorts bit-strings in increasing lexicographic order and removes duplicates"""
	if not bitstrings:
		return []
	width = bitstrings[0].width
	if any(bits.width != width for bits in bitstrings):
		raise ValueError('Bit-strings must all have the same width')
	matrix = numpy.frombuffer(b''.join(bits.packed for bits in bitstrings), dtype=numpy.uint8)
	matrix = matrix.reshape(len(bitstrings), packed_size(width))
	rows = matrix[radix_sort_rows(matrix)]
	# Sorted, so a row is a duplicate iff it equals the one before it
	keep = numpy.ones(len(rows), dtype=bool)
	keep[1:] = (rows[1:] != rows[:-1]).any(axis=1)
	return [BitString(row.tobytes(), width) for row in rows[keep]]
