"""
Single entry point, ``anisopush <subcommand>``.

Exit codes: 0 success, 1 usage / config / input file errors, 2 runtime or
numerical failures.
"""
import argparse
import logging
import sys

from anisopush import __version__
from anisopush.exceptions import AnisopushError, ConfigError, RecordFormatError
from anisopush.scripts import simulate, analyze, fit, cycle_map

logger = logging.getLogger('anisopush')

SUBCOMMANDS = {
    'simulate': (simulate, 'run the push / reposition collection loop'),
    'analyze': (analyze, 'histograms, push law, tables and stable directions of a record CSV'),
    'fit': (fit, 'identify the limit ellipse or the pusher friction coefficient'),
    'cycle-map': (cycle_map, 'sample the cycle map and report its fixed points'),
}


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='anisopush',
                            description='Planar pushing under anisotropic friction: simulation and analysis.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)
    for name, (module, help_text) in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        module.add_arguments(sub)
        sub.set_defaults(handler=module.main)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except (ConfigError, RecordFormatError, FileNotFoundError) as e:
        logger.error(f"{args.command}: {e}")
        return 1
    except AnisopushError as e:
        logger.error(f"{args.command} failed: {e}")
        diagnostic = getattr(e, 'diagnostic', None) or getattr(e, 'parameters', None)
        if diagnostic:
            logger.error(f"diagnostic: {diagnostic}")
        return 2


def cli_main():
    sys.exit(main())


if __name__ == '__main__':
    cli_main()
