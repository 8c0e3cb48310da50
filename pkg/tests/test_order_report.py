import json

import pytest

from supertree_maker.model import TreeCollection
from supertree_maker.oracles import random_collection
from supertree_maker.order_report import order_dependence_report


def test_all_orders(overlapping: TreeCollection):
	report = order_dependence_report(overlapping, 6)
	assert report.exhaustive
	assert report.orders_tried == 6
	assert report.distinct_node_sets >= 2
	assert any('a,b' in group.clusters for group in report.raw)
	assert any('a,b' not in group.clusters for group in report.raw)
	assert report.distinct_processed_node_sets >= 2
	assert report.differs_from_tag
	assert sum(len(group.orders) for group in report.raw) == 6


def test_groups_compared_to_tag(overlapping: TreeCollection):
	report = order_dependence_report(overlapping, 6)
	assert len(report.tag_clusters) == 10
	without_ab = next(group for group in report.raw if 'a,b' not in group.clusters)
	assert 'a,b' in without_ab.missing
	assert 'a,b,c,d,e' in without_ab.extra
	assert not without_ab.matches_tag


def test_same_taxa_single_node_set(same_taxa: TreeCollection):
	report = order_dependence_report(same_taxa, 24)
	assert report.distinct_node_sets == 1
	assert report.distinct_processed_node_sets == 1
	assert not report.differs_from_tag


def test_one_tree():
	report = order_dependence_report(random_collection(2, 6, 1, partial=True), 10)
	assert report.orders_tried == 1
	assert report.distinct_node_sets == 1


def test_sampled_orders_are_distinct_and_seeded():
	collection = random_collection(4, 8, 6, partial=True)
	report = order_dependence_report(collection, 20, seed=3)
	assert not report.exhaustive
	orders = [order for group in report.raw for order in group.orders]
	assert len(orders) == len(set(orders)) == 20
	assert report.to_dict() == order_dependence_report(collection, 20, seed=3).to_dict()


def test_bad_sample(overlapping: TreeCollection):
	with pytest.raises(ValueError):
		order_dependence_report(overlapping, 0)


def test_outputs(overlapping: TreeCollection):
	report = order_dependence_report(overlapping, 6)
	data = json.loads(json.dumps(report.to_dict()))
	assert data['orders_tried'] == 6
	assert data['distinct_node_sets'] == report.distinct_node_sets
	frame = report.to_frame()
	assert len(frame) == report.distinct_node_sets + report.distinct_processed_node_sets
	assert set(frame.index.get_level_values('stage')) == {'raw', 'processed'}
	text = report.to_text()
	assert text.startswith('3 trees on 5 taxa, all 6 orders')
	assert 'matches_tag' in text
