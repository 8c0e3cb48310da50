"""Running the procedural TAG over many orders of the same trees and tabulating which node sets come out"""

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy
import pandas
from tqdm.auto import tqdm

from .clusters import BitString, LabelSpace
from .model import TreeCollection
from .smith_tag import ProcTag, build_smith_tag, post_process
from .tag import build_tag

logger = logging.getLogger(__name__)

Order = tuple[int, ...]


@dataclass
class OrderGroup:
	"""Orders that produced the same node set"""

	clusters: tuple[str, ...]
	"""Each node's cluster as comma separated taxa, sorted"""
	orders: list[Order] = field(default_factory=list)
	structures: set[Any] = field(default_factory=set, repr=False)
	"""Distinct signatures (node set plus edges) among these orders"""
	extra: tuple[str, ...] = ()
	"""Clusters not in the order-independent TAG"""
	missing: tuple[str, ...] = ()
	"""Clusters of the order-independent TAG not in this node set"""

	@property
	def matches_tag(self) -> bool:
		return not self.extra and not self.missing

	def to_dict(self) -> dict[str, Any]:
		return {
			'clusters': list(self.clusters),
			'orders': [list(order) for order in self.orders],
			'distinct_graphs': len(self.structures),
			'matches_tag': self.matches_tag,
			'extra': list(self.extra),
			'missing': list(self.missing),
		}


@dataclass
class OrderDependenceReport:
	k: int
	n: int
	exhaustive: bool
	"""Whether every order was tried, instead of a sample"""
	tag_clusters: tuple[str, ...]
	raw: list[OrderGroup]
	"""Groups before post-processing, by first order seen"""
	processed: list[OrderGroup]
	"""Groups after post-processing"""
	orders_tried: int = 0

	@property
	def distinct_node_sets(self) -> int:
		return len(self.raw)

	@property
	def distinct_processed_node_sets(self) -> int:
		return len(self.processed)

	@property
	def differs_from_tag(self) -> bool:
		return any(not group.matches_tag for group in itertools.chain(self.raw, self.processed))

	def to_dict(self) -> dict[str, Any]:
		return {
			'k': self.k,
			'n': self.n,
			'orders_tried': self.orders_tried,
			'exhaustive': self.exhaustive,
			'distinct_node_sets': self.distinct_node_sets,
			'distinct_processed_node_sets': self.distinct_processed_node_sets,
			'differs_from_tag': self.differs_from_tag,
			'tag_clusters': list(self.tag_clusters),
			'raw': [group.to_dict() for group in self.raw],
			'processed': [group.to_dict() for group in self.processed],
		}

	def to_frame(self) -> pandas.DataFrame:
		rows = [
			{
				'stage': stage,
				'group': i,
				'orders': len(group.orders),
				'example_order': ' '.join(str(tree_id) for tree_id in group.orders[0]),
				'nodes': len(group.clusters),
				'graphs': len(group.structures),
				'matches_tag': group.matches_tag,
				'extra': '; '.join(f'{{{c}}}' for c in group.extra),
				'missing': '; '.join(f'{{{c}}}' for c in group.missing),
			}
			for stage, groups in (('raw', self.raw), ('processed', self.processed))
			for i, group in enumerate(groups)
		]
		return pandas.DataFrame(rows).set_index(['stage', 'group'])

	def to_text(self) -> str:
		how = 'all' if self.exhaustive else 'a sample of'
		header = (
			f'{self.k} trees on {self.n} taxa, {how} {self.orders_tried} orders\n'
			f'Distinct node sets: {self.distinct_node_sets} before post-processing, {self.distinct_processed_node_sets} after\n'
			f'Order-independent TAG has {len(self.tag_clusters)} nodes; '
			f'{"some orders differ from it" if self.differs_from_tag else "every order matches it"}\n'
		)
		with pandas.option_context('display.width', 200, 'display.max_colwidth', 80):
			return f'{header}\n{self.to_frame().to_string()}\n'


def _orders(ids: Sequence[int], sample: int, seed: int) -> tuple[list[Order], bool]:
	k = len(ids)
	if math.factorial(k) <= sample:
		return list(itertools.permutations(ids)), True
	rng = numpy.random.default_rng(seed)
	orders: list[Order] = [tuple(ids)]
	seen = {tuple(ids)}
	while len(orders) < sample:
		order = tuple(rng.permutation(ids).tolist())
		# Sampling without replacement
		if order not in seen:
			seen.add(order)
			orders.append(order)
	return orders, False


def _format(space: LabelSpace, keys: Sequence[str]) -> tuple[str, ...]:
	return tuple(sorted(space.format(BitString.from_hex(key, space.n)) for key in keys))


class _Grouper:
	def __init__(self, space: LabelSpace, tag_keys: frozenset[str]):
		self.space = space
		self.tag_keys = tag_keys
		self.groups: dict[tuple[str, ...], OrderGroup] = {}

	def add(self, order: Order, proc: ProcTag):
		key = proc.node_set_key()
		group = self.groups.get(key)
		if group is None:
			keys = frozenset(key)
			group = self.groups[key] = OrderGroup(
				_format(self.space, key),
				extra=_format(self.space, sorted(keys - self.tag_keys)),
				missing=_format(self.space, sorted(self.tag_keys - keys)),
			)
		group.orders.append(order)
		group.structures.add(proc.signature())

	def __iter__(self) -> Iterator[OrderGroup]:
		return iter(self.groups.values())


def order_dependence_report(
	collection: TreeCollection, sample: int, *, seed: int = 0, use_tqdm: bool = False
) -> OrderDependenceReport:
	"""Builds the procedural TAG for many orders of the trees in collection.

	Parameters:
		sample: Number of orders to try; if there are no more than this many orders, all of them are tried
		seed: For sampling orders, so the same report comes out each time
	"""
	if sample < 1:
		raise ValueError(f'Need to try at least one order, got {sample}')
	tag = build_tag(collection)
	tag_keys = frozenset(bits.hex() for bits in tag.bitstrings)
	orders, exhaustive = _orders(collection.ids, sample, seed)
	if not exhaustive:
		logger.info('Sampling %d of %d orders', len(orders), math.factorial(len(collection)))
	elif len(orders) < sample:
		logger.warning('There are only %d orders of %d trees, trying all of them', len(orders), len(collection))

	space = tag.space
	raw = _Grouper(space, tag_keys)
	processed = _Grouper(space, tag_keys)
	for order in tqdm(orders, 'Trying orders', unit='order', leave=False, disable=not use_tqdm):
		proc = build_smith_tag(collection, order)
		raw.add(order, proc)
		processed.add(order, post_process(proc, collection))

	report = OrderDependenceReport(
		len(collection),
		space.n,
		exhaustive,
		_format(space, sorted(tag_keys)),
		list(raw),
		list(processed),
		len(orders),
	)
	logger.info(
		'%d distinct node sets over %d orders (%d after post-processing)',
		report.distinct_node_sets,
		report.orders_tried,
		report.distinct_processed_node_sets,
	)
	return report
