import logging
import sys

from tqdm.contrib.logging import logging_redirect_tqdm

from .cli import argument_parser, config_from_args, run


def main():
	args = argument_parser().parse_args()
	if args.quiet:
		level = logging.ERROR
	elif args.verbose > 1:
		level = logging.DEBUG
	elif args.verbose:
		level = logging.INFO
	else:
		level = logging.WARNING
	logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

	sys.exit(run(config_from_args(args)))


with logging_redirect_tqdm():
	main()
