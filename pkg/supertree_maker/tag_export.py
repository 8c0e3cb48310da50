"""For converting TAGs to other formats (Graphviz DOT, JSON) and back from JSON"""

import json
import logging
from typing import Any

from .clusters import BitString, LabelSpace
from .tag import Tag, TagEdge, in_degree_zero_nodes

logger = logging.getLogger(__name__)

TREE_COLOURS = (
	'#000000',
	'#1f4fcc',
	'#c8201e',
	'#2a9d2a',
	'#d98b00',
	'#8a3ac2',
	'#1b9e9e',
	'#b5487c',
	'#6b6b6b',
	'#7a5c1e',
)
"""Edge colours of the first tree ids; later trees get a colour from tree_colour"""

MAX_LABELLED_TAXA = 32
"""Internal nodes are labelled with their clusters only up to this many taxa, otherwise by node id"""


GOLDEN_RATIO_CONJUGATE = 0.618033988749895


def tree_colour(tree_id: int) -> str:
	"""Graphviz colour for the edges of one tree, distinct for every tree id"""
	if tree_id < len(TREE_COLOURS):
		return TREE_COLOURS[tree_id]
	# Hues spaced by the golden ratio never repeat; Graphviz reads "H S V" strings as HSV
	hue = (tree_id * GOLDEN_RATIO_CONJUGATE) % 1
	return f'{hue:.6f} 0.650 0.750'


def _quote(text: str) -> str:
	return '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def export_dot(tag: Tag, name: str = 'TAG') -> str:
	"""Graphviz digraph with one edge colour per input tree"""
	if len(in_degree_zero_nodes(tag)) > 1:
		logger.warning('TAG has more than one node with in-degree zero, exporting it as it is')
	lines = [f'digraph {_quote(name)} {{', '\tnode [shape=ellipse];']
	for node in tag.nodes:
		if node in tag.leaf_name:
			lines.append(f'\tn{node} [label={_quote(tag.leaf_name[node])}, shape=circle];')
		elif tag.space.n <= MAX_LABELLED_TAXA:
			lines.append(f'\tn{node} [label={_quote(tag.space.format(tag.bitstrings[node]))}];')
		else:
			lines.append(f'\tn{node} [label={_quote(str(node))}];')
	for edge in tag.edges:
		colour = tree_colour(edge.tree_id)
		lines.append(
			f'\tn{edge.source} -> n{edge.target} [color={_quote(colour)}, label={_quote(str(edge.tree_id))}];'
		)
	lines.append('}')
	return '\n'.join(lines) + '\n'


def tag_to_dict(tag: Tag) -> dict[str, Any]:
	return {
		'n': tag.space.n,
		'k': tag.k,
		'labels': list(tag.space.names),
		'nodes': [
			{'bits': bits.hex(), 'count': count}
			for bits, count in zip(tag.bitstrings, tag.counts, strict=True)
		],
		'edges': [list(edge) for edge in tag.edges],
		'tree_roots': {str(tree_id): node for tree_id, node in tag.tree_roots.items()},
	}


def tag_to_json(tag: Tag) -> str:
	"""Canonical JSON dump, identical for any order of the same input trees"""
	return json.dumps(tag_to_dict(tag), indent='\t') + '\n'


def tag_from_dict(data: dict[str, Any]) -> Tag:
	space = LabelSpace(tuple(data['labels']))
	if space.n != data['n']:
		raise ValueError(f'TAG dump has {len(space.names)} labels but n = {data["n"]}')
	bitstrings = tuple(BitString.from_hex(node['bits'], space.n) for node in data['nodes'])
	return Tag(
		space,
		bitstrings,
		tuple(node['count'] for node in data['nodes']),
		tuple(TagEdge(*edge) for edge in data['edges']),
		{int(tree_id): node for tree_id, node in data['tree_roots'].items()},
		data['k'],
	)


def tag_from_json(text: str) -> Tag:
	data = json.loads(text)
	if not isinstance(data, dict):
		raise TypeError(f'Expected a TAG dump object, got {type(data)}')
	return tag_from_dict(data)
