"""Wiring files to the library for the command line"""

import asyncio
import json
import logging
import math
import sys
from argparse import SUPPRESS, ArgumentParser, Namespace
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum, auto
from pathlib import Path
from typing import TextIO

import aiofiles

from .clusters import UnknownTaxonError
from .compat import DisplayCheckError, NotCompatible, check_compatibility
from .consensus import ConsensusMode, ThresholdError, consensus_tree
from .model import TreeCollection, TreeStructureError
from .newick import NewickError, parse_newick, serialize_collection, serialize_newick
from .oracles import (
	EnumerationLimitError,
	TopologyEnumerator,
	brute_compat,
	naive_consensus,
	random_collection,
	random_taxa,
)
from .order_report import order_dependence_report
from .tag import NotCommonLeafSetError, build_tag, tag_summary
from .tag_export import export_dot, tag_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
"""A supertree failed its display check"""
EXIT_USAGE = 2
EXIT_NOT_COMPATIBLE = 3
"""Only with status_compat"""

MAX_ALL_ORDERS_TREES = 8
"""More trees than this have too many orders to try them all"""


class Command(Enum):
	Build = auto()
	"""TAG as DOT, JSON or a summary"""
	Consensus = auto()
	Compat = auto()
	"""Compatibility test, and supertree if compatible"""
	Smith = auto()
	"""Order dependence report for the procedural TAG"""
	Oracle = auto()
	"""Brute force tools, for debugging"""


class OutputFormat(Enum):
	Newick = auto()
	Dot = auto()
	"""Graphviz"""
	Json = auto()
	Summary = auto()
	"""Human readable text"""


class OracleTool(Enum):
	Enumerate = auto()
	"""Every tree on some number of taxa"""
	Random = auto()
	"""A random collection"""
	NaiveConsensus = auto()
	BruteCompat = auto()


@dataclass
class RunConfig:
	command: Command
	inputs: tuple[Path, ...] = ()
	"""Newick files, one tree per line, concatenated in this order"""
	output: Path | None = None
	"""Output file, or standard output if None"""
	output_format: OutputFormat | None = None
	"""None for the command's default: DOT for build, a text summary for smith, Newick otherwise"""
	mode: ConsensusMode = ConsensusMode.Majority
	threshold: int | None = None
	"""With ConsensusMode.Threshold"""
	sample: int = 100
	"""Number of orders for smith to try"""
	all_orders: bool = False
	seed: int = 0
	status_compat: bool = False
	"""Exit with EXIT_NOT_COMPATIBLE instead of EXIT_OK when trees are not compatible"""
	verify: bool = True
	"""Check a compat supertree displays every input tree"""
	oracle_tool: OracleTool | None = None
	taxa: int = 4
	"""For the enumerate and random oracle tools"""
	trees: int = 3
	"""For the random oracle tool"""
	resolved: bool = False
	partial: bool = False
	use_tqdm: bool = True


class UsageError(ValueError):
	"""Options that don't make sense together"""


async def _read_collection(path: Path) -> TreeCollection:
	async with aiofiles.open(path, encoding='utf-8') as f:
		text = await f.read()
	return parse_newick(text, str(path))


async def read_inputs(paths: Sequence[Path]) -> TreeCollection:
	"""Reads every file at once, and joins their trees in the order of paths"""
	if not paths:
		raise UsageError('No input files')
	collections = await asyncio.gather(*(_read_collection(path) for path in paths))
	collection = TreeCollection.concatenate(collections)
	logger.info('Read %d trees from %d files', len(collection), len(paths))
	return collection


def _require_common_leaf_set(collection: TreeCollection):
	tree_id = collection.first_differing_leaf_set()
	if tree_id is not None:
		first = collection.ids[0]
		raise NotCommonLeafSetError(
			f'{collection.origin(tree_id)} (tree {tree_id}) does not have the same taxa as {collection.origin(first)} (tree {first}); consensus needs a common leaf set'
		)


def _check_threshold(config: RunConfig, k: int):
	if config.mode != ConsensusMode.Threshold:
		return
	if config.threshold is None:
		raise UsageError('--threshold needs a value')
	if config.threshold * 2 <= k or config.threshold > k:
		raise ThresholdError(f'Threshold {config.threshold} must be more than {k / 2} and at most {k} for {k} trees')


def _format(config: RunConfig, default: OutputFormat, *allowed: OutputFormat) -> OutputFormat:
	output_format = config.output_format or default
	if output_format != default and output_format not in allowed:
		raise UsageError(f'{config.command.name.lower()} cannot output {output_format.name.lower()}')
	return output_format


def _not_compatible_text(result: NotCompatible, clusters: Sequence[str]) -> str:
	lines = ['NOT COMPATIBLE']
	if result.stuck_nodes:
		lines.append(f'No start node among {len(clusters)} clusters: {"; ".join(clusters)}')
	return '\n'.join(lines) + '\n'


async def _build(config: RunConfig, collection: TreeCollection) -> str:
	output_format = _format(config, OutputFormat.Dot, OutputFormat.Json, OutputFormat.Summary)
	tag = build_tag(collection, use_tqdm=config.use_tqdm)
	if output_format == OutputFormat.Json:
		return tag_to_json(tag)
	if output_format == OutputFormat.Summary:
		return ''.join(f'{key}: {value}\n' for key, value in tag_summary(tag).items())
	return export_dot(tag)


async def _consensus(config: RunConfig, collection: TreeCollection) -> str:
	_format(config, OutputFormat.Newick)
	_require_common_leaf_set(collection)
	_check_threshold(config, len(collection))
	tag = build_tag(collection, use_tqdm=config.use_tqdm)
	return serialize_newick(consensus_tree(tag, config.mode, config.threshold).tree) + '\n'


async def _compat(config: RunConfig, collection: TreeCollection) -> tuple[str, int]:
	_format(config, OutputFormat.Newick)
	tag = build_tag(collection, use_tqdm=config.use_tqdm)
	result = check_compatibility(collection, verify=config.verify, tag=tag)
	if isinstance(result, NotCompatible):
		status = EXIT_NOT_COMPATIBLE if config.status_compat else EXIT_OK
		return _not_compatible_text(result, result.clusters(tag)), status
	return serialize_newick(result) + '\n', EXIT_OK


async def _smith(config: RunConfig, collection: TreeCollection) -> str:
	output_format = _format(config, OutputFormat.Summary, OutputFormat.Json)
	sample = config.sample
	if config.all_orders:
		if len(collection) > MAX_ALL_ORDERS_TREES:
			raise UsageError(
				f'{len(collection)} trees have too many orders to try them all, use --sample instead'
			)
		sample = math.factorial(len(collection))
	report = order_dependence_report(collection, sample, seed=config.seed, use_tqdm=config.use_tqdm)
	if output_format == OutputFormat.Json:
		return json.dumps(report.to_dict(), indent='\t') + '\n'
	return report.to_text()


async def _oracle(config: RunConfig) -> tuple[str, int]:
	tool = config.oracle_tool
	if tool == OracleTool.Enumerate:
		trees = TopologyEnumerator(random_taxa(config.taxa))
		return ''.join(f'{serialize_newick(tree)}\n' for tree in trees), EXIT_OK
	if tool == OracleTool.Random:
		collection = random_collection(
			config.seed, config.taxa, config.trees, resolved=config.resolved, partial=config.partial
		)
		return serialize_collection(collection), EXIT_OK

	collection = await read_inputs(config.inputs)
	if tool == OracleTool.NaiveConsensus:
		_check_threshold(config, len(collection))
		_require_common_leaf_set(collection)
		return serialize_newick(naive_consensus(collection, config.mode, config.threshold)) + '\n', EXIT_OK
	if tool == OracleTool.BruteCompat:
		result = brute_compat(collection)
		if isinstance(result, NotCompatible):
			return 'NOT COMPATIBLE\n', EXIT_NOT_COMPATIBLE if config.status_compat else EXIT_OK
		return serialize_newick(result) + '\n', EXIT_OK
	raise UsageError('oracle needs a tool')


async def _write(config: RunConfig, text: str, stdout: TextIO):
	if config.output is None:
		stdout.write(text)
		return
	async with aiofiles.open(config.output, mode='w', encoding='utf-8') as f:
		await f.write(text)
	logger.info('Wrote %s', config.output)


async def _dispatch(config: RunConfig) -> tuple[str, int]:
	if config.command == Command.Oracle:
		return await _oracle(config)
	collection = await read_inputs(config.inputs)
	if config.command == Command.Build:
		return await _build(config, collection), EXIT_OK
	if config.command == Command.Consensus:
		return await _consensus(config, collection), EXIT_OK
	if config.command == Command.Compat:
		return await _compat(config, collection)
	if config.command == Command.Smith:
		return await _smith(config, collection), EXIT_OK
	raise ValueError(f'Whoops, {config.command} is not a command')


async def amain(config: RunConfig, stdout: TextIO, stderr: TextIO) -> int:
	"""Runs one command, writing the result to config.output or stdout and any error to stderr. Returns the exit status."""
	try:
		text, status = await _dispatch(config)
	except DisplayCheckError as e:
		logger.exception('Supertree failed its display check')
		stderr.write(f'error: {e}\n')
		return EXIT_INTERNAL_ERROR
	except OSError as e:
		stderr.write(f'error: {e.filename or ""}: {e.strerror or e}\n')
		return EXIT_USAGE
	except NewickError as e:
		stderr.write(f'error: {e}\n')
		return EXIT_USAGE
	except UnknownTaxonError as e:
		stderr.write(f'error: unknown taxon {e.args[0]!r}\n')
		return EXIT_USAGE
	except (
		UsageError,
		NotCommonLeafSetError,
		ThresholdError,
		EnumerationLimitError,
		TreeStructureError,
		ValueError,
	) as e:
		stderr.write(f'error: {e}\n')
		return EXIT_USAGE
	await _write(config, text, stdout)
	return status


def run(config: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
	return asyncio.run(amain(config, stdout or sys.stdout, stderr or sys.stderr))


def _add_inputs(parser: ArgumentParser):
	parser.add_argument('inputs', type=Path, nargs='+', help='Newick files, one tree per line')


def _add_mode(parser: ArgumentParser):
	group = parser.add_mutually_exclusive_group()
	group.add_argument(
		'--strict', action='store_const', const=ConsensusMode.Strict, dest='mode', help='Strict consensus'
	)
	group.add_argument(
		'--majority',
		action='store_const',
		const=ConsensusMode.Majority,
		dest='mode',
		help='Majority-rule consensus (default)',
	)
	group.add_argument(
		'--threshold',
		type=int,
		metavar='T',
		help='Clusters in at least T trees, T must be more than half the number of trees',
	)


def argument_parser() -> ArgumentParser:
	argparser = ArgumentParser(prog='supertree_maker', description='Tree alignment graphs of phylogenetic trees')
	argparser.add_argument('--output', '-o', type=Path, help='Write here instead of standard output')
	argparser.add_argument('--verbose', '-v', action='count', default=0, help='More logging')
	argparser.add_argument('--quiet', '-q', action='store_true', help='Only log errors, no progress bars')
	subparsers = argparser.add_subparsers(dest='command', required=True, metavar='COMMAND')

	build = subparsers.add_parser('build', help='Build the TAG')
	_add_inputs(build)
	build.add_argument('--format', choices=('dot', 'json', 'summary'), default='dot')

	consensus = subparsers.add_parser('consensus', help='Consensus tree of trees with the same taxa')
	_add_inputs(consensus)
	_add_mode(consensus)

	compat = subparsers.add_parser('compat', help='Test compatibility, outputting a supertree if compatible')
	_add_inputs(compat)
	compat.add_argument(
		'--status-compat',
		action='store_true',
		help=f'Exit with status {EXIT_NOT_COMPATIBLE} if the trees are not compatible',
	)
	compat.add_argument('--no-verify', action='store_true', help='Skip checking the supertree')

	smith = subparsers.add_parser('smith', help='How much the order of trees changes the procedural TAG')
	_add_inputs(smith)
	orders = smith.add_mutually_exclusive_group()
	orders.add_argument('--all-orders', action='store_true', help='Try every order')
	orders.add_argument('--sample', type=int, default=100, help='Number of orders to try, default 100')
	smith.add_argument('--seed', type=int, default=0, help='Seed for sampling orders')
	smith.add_argument('--format', choices=('summary', 'json'), default='summary')

	oracle = subparsers.add_parser('oracle', help=SUPPRESS)
	tools = oracle.add_subparsers(dest='tool', required=True)
	enumerate_tool = tools.add_parser('enumerate')
	enumerate_tool.add_argument('taxa', type=int)
	random_tool = tools.add_parser('random')
	random_tool.add_argument('taxa', type=int)
	random_tool.add_argument('trees', type=int)
	random_tool.add_argument('--seed', type=int, default=0)
	random_tool.add_argument('--resolved', action='store_true')
	random_tool.add_argument('--partial', action='store_true')
	naive_tool = tools.add_parser('naive-consensus')
	_add_inputs(naive_tool)
	_add_mode(naive_tool)
	brute_tool = tools.add_parser('brute-compat')
	_add_inputs(brute_tool)
	brute_tool.add_argument('--status-compat', action='store_true')
	return argparser


def config_from_args(args: Namespace) -> RunConfig:
	command = Command[args.command.capitalize()]
	threshold = getattr(args, 'threshold', None)
	mode = getattr(args, 'mode', None) or ConsensusMode.Majority
	if threshold is not None:
		mode = ConsensusMode.Threshold
	output_format = getattr(args, 'format', None)
	tool = getattr(args, 'tool', None)
	return RunConfig(
		command,
		tuple(getattr(args, 'inputs', ())),
		args.output,
		OutputFormat[output_format.capitalize()] if output_format else None,
		mode,
		threshold,
		sample=getattr(args, 'sample', 100),
		all_orders=getattr(args, 'all_orders', False),
		seed=getattr(args, 'seed', 0),
		status_compat=getattr(args, 'status_compat', False),
		verify=not getattr(args, 'no_verify', False),
		oracle_tool=OracleTool[tool.title().replace('-', '')] if tool else None,
		taxa=getattr(args, 'taxa', 4),
		trees=getattr(args, 'trees', 3),
		resolved=getattr(args, 'resolved', False),
		partial=getattr(args, 'partial', False),
		use_tqdm=not args.quiet,
	)
