"""Reading and writing trees in Newick format, one tree per line"""

import logging
import string

from .model import PhyloTree, TreeCollection, TreeStructureError

logger = logging.getLogger(__name__)

NAME_CHARS = frozenset(string.ascii_letters + string.digits + '_.-')
"""Characters allowed in taxon names (and discarded internal vertex names)"""
_LENGTH_CHARS = frozenset(string.digits + '.eE+-')


class NewickError(ValueError):
	"""Malformed Newick input. line is 1-based, column is 0-based."""

	def __init__(
		self,
		message: str,
		line: int = 0,
		column: int = 0,
		tree_index: int | None = None,
		source: str | None = None,
	):
		self.message = message
		self.line = line
		self.column = column
		self.tree_index = tree_index
		self.source = source
		super().__init__(message)

	def __str__(self):
		where = f'line {self.line}, column {self.column}'
		if self.tree_index is not None:
			where = f'tree {self.tree_index}, {where}'
		if self.source:
			where = f'{self.source}: {where}'
		return f'{where}: {self.message}'


class _LineReader:
	def __init__(self, text: str, line: int, tree_index: int, source: str | None):
		self.text = text
		self.pos = 0
		self.line = line
		self.tree_index = tree_index
		self.source = source

	def error(self, message: str, column: int | None = None):
		return NewickError(
			message,
			self.line,
			self.pos if column is None else column,
			self.tree_index,
			self.source,
		)

	def peek(self) -> str:
		return self.text[self.pos] if self.pos < len(self.text) else ''

	def skip(self):
		"""Skips whitespace and [comments]"""
		while self.pos < len(self.text):
			char = self.text[self.pos]
			if char.isspace():
				self.pos += 1
			elif char == '[':
				end = self.text.find(']', self.pos)
				if end == -1:
					raise self.error('Unterminated comment')
				self.pos = end + 1
			else:
				break

	def read_name(self) -> str:
		self.skip()
		start = self.pos
		while self.pos < len(self.text) and self.text[self.pos] in NAME_CHARS:
			self.pos += 1
		return self.text[start : self.pos]

	def read_length(self):
		self.skip()
		if self.peek() != ':':
			return
		self.pos += 1
		self.skip()
		start = self.pos
		while self.pos < len(self.text) and self.text[self.pos] in _LENGTH_CHARS:
			self.pos += 1
		try:
			float(self.text[start : self.pos])
		except ValueError:
			raise self.error('Expected a branch length', start) from None

	def read_tree(self) -> PhyloTree:
		children: list[list[int]] = [[]]
		leaf_label: dict[int, str] = {}
		label_column: dict[str, int] = {}
		open_vertices: list[int] = []
		current = 0

		while True:
			# At the start of the subtree rooted at current
			self.skip()
			if self.peek() == '(':
				self.pos += 1
				open_vertices.append(current)
				current = _add_child(children, current)
				continue

			column = self.pos
			name = self.read_name()
			if not name:
				found = repr(self.peek()) if self.peek() else 'end of line'
				raise self.error(f'Expected a taxon name or "(", found {found}')
			if name in label_column:
				raise self.error(
					f'Duplicate leaf name {name!r} (first seen at column {label_column[name]})', column
				)
			label_column[name] = column
			leaf_label[current] = name
			self.read_length()

			# Close finished subtrees until there is another sibling to read
			while True:
				self.skip()
				char = self.peek()
				if char == ',':
					if not open_vertices:
						raise self.error('"," outside of parentheses')
					self.pos += 1
					current = _add_child(children, open_vertices[-1])
					break
				if char == ')':
					if not open_vertices:
						raise self.error('Unbalanced ")"')
					column = self.pos
					self.pos += 1
					current = open_vertices.pop()
					if len(children[current]) == 1:
						raise self.error('Internal vertex has only one child', column)
					# Internal vertex names are allowed but we don't need them
					self.read_name()
					self.read_length()
					continue
				if char == ';':
					if open_vertices:
						raise self.error(f'Missing {len(open_vertices)} ")" before ";"')
					self.pos += 1
					self.skip()
					if self.pos < len(self.text):
						raise self.error('Unexpected text after ";"')
					try:
						return PhyloTree(tuple(tuple(kids) for kids in children), leaf_label)
					except TreeStructureError as e:
						raise self.error(str(e), 0) from e
				if not char:
					raise self.error('Missing ";"')
				raise self.error(f'Unexpected character {char!r}')


def _add_child(children: list[list[int]], parent: int) -> int:
	child = len(children)
	children.append([])
	children[parent].append(child)
	return child


def parse_newick_tree(text: str) -> PhyloTree:
	"""Parses a single tree from one line of Newick"""
	return _LineReader(text.strip(), 1, 0, None).read_tree()


def parse_newick(text: str, source: str | None = None) -> TreeCollection:
	"""Parses one Newick tree per line. Blank lines are skipped.

	Parameters:
		source: Name of where text came from (usually a file name), for error messages and TreeCollection.origins
	"""
	trees: list[PhyloTree] = []
	origins: list[str] = []
	for line_number, line in enumerate(text.splitlines(), start=1):
		if not line.strip():
			continue
		trees.append(_LineReader(line, line_number, len(trees), source).read_tree())
		origins.append(f'{source}:{line_number}' if source else f'line {line_number}')
	if not trees:
		raise NewickError('No trees in input', source=source)
	logger.debug('Read %d trees from %s', len(trees), source or 'input')
	return TreeCollection(tuple(trees), origins=tuple(origins))


def serialize_newick(tree: PhyloTree) -> str:
	"""Canonical Newick for tree: children sorted by their smallest taxon name, no lengths or internal names"""
	written: dict[int, str] = {}
	smallest: dict[int, str] = {}
	for vertex in tree.postorder():
		if tree.is_leaf(vertex):
			written[vertex] = smallest[vertex] = tree.leaf_label[vertex]
			continue
		kids = sorted(tree.children[vertex], key=smallest.__getitem__)
		smallest[vertex] = smallest[kids[0]]
		written[vertex] = f'({",".join(written[child] for child in kids)})'
		for child in kids:
			del written[child]
	return f'{written[tree.root]};'


def serialize_collection(collection: TreeCollection) -> str:
	return ''.join(f'{serialize_newick(tree)}\n' for tree in collection)
