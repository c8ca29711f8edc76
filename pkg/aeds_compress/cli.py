"""Command-line front end

usage: `aeds compress --input FILE --output FILE [--codec CODEC] [--states N] [--table-out FILE]`
       `aeds decompress --input FILE --output FILE [--table FILE]`
       `aeds figures --figure ID [--csv FILE]`
       `aeds build-table --input FILE --table-out FILE [--codec CODEC] [--states N]`
       `aeds analyze (--input FILE | --probs P1,P2,... [--reference NAME]) [--codec CODEC]`

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal failure.
"""


import argparse
import json
import logging
import sys
from typing import Any, Callable, Mapping, Optional, Sequence

from .analysis import (
    CHECK_KINDS, bound_reports_to_csv, check_bound, compare_rates, stationary_distribution
)
from .codec import serialize_table, validate_aeds
from .compressor import CODECS, Compressor
from .errors import AedsError, InvalidWeight
from .figures import FIGURES, figure_csv, figure_data, write_figure_csv
from .model import SourceDistribution, entropy, validate_distribution
from .resource_loader import ResourceLoader

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

DEFAULTS: dict[str, Any] = {
    'codec': 'huffman',
    'states': 2,
    'seed': 0,
    'tolerance': 1e-9,
    'block_size': 1 << 20,
    'state_budget': 1 << 16,
    'direct_max_states': 1024,
    'power_iter_max': 10 ** 6,
    'refine_passes': 0,
    'mc_symbols': 100_000,
}


def build_parser(defaults: Mapping[str, Any]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='aeds', description='Table-driven lossless compression')
    commands = parser.add_subparsers(dest='command', required=True)

    def add_codec(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--codec', choices=CODECS, default=defaults['codec'])
        sub.add_argument('--states', type=int, default=defaults['states'],
                         help='number of states N for the codecs that take one')

    compress = commands.add_parser('compress', help='compress a file')
    compress.add_argument('--input', required=True)
    compress.add_argument('--output', required=True)
    compress.add_argument('--table-out',
                          help='write the table here and keep only its hash in the output')
    add_codec(compress)
    compress.set_defaults(handler=cmd_compress)

    decompress = commands.add_parser('decompress', help='restore a compressed file')
    decompress.add_argument('--input', required=True)
    decompress.add_argument('--output', required=True)
    decompress.add_argument('--table', help='side table written by compress --table-out')
    decompress.set_defaults(handler=cmd_decompress)

    figures = commands.add_parser('figures', help='write the series behind a figure as CSV')
    figures.add_argument('--figure', required=True, help=', '.join(sorted(FIGURES)))
    figures.add_argument('--csv', help='output file, standard output if omitted')
    figures.set_defaults(handler=cmd_figures)

    build = commands.add_parser('build-table', help='build and serialize a table for a file')
    build.add_argument('--input', required=True)
    build.add_argument('--table-out', required=True)
    add_codec(build)
    build.set_defaults(handler=cmd_build_table)

    analyze = commands.add_parser('analyze', help='rate, bounds and Monte Carlo check')
    source = analyze.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', help='use the byte histogram of this file')
    source.add_argument('--probs', help='comma-separated probabilities')
    analyze.add_argument('--reference', choices=ResourceLoader.list_tables(),
                         help='analyze a packaged reference table with --probs')
    analyze.add_argument('--seed', type=int, default=defaults['seed'])
    analyze.add_argument('--symbols', type=int, default=defaults['mc_symbols'],
                         help='Monte Carlo sample size')
    analyze.add_argument('--tolerance', type=float, default=defaults['tolerance'])
    analyze.add_argument('--csv', help='write the bound reports as CSV')
    add_codec(analyze)
    analyze.set_defaults(handler=cmd_analyze)
    return parser


def _compressor(args: argparse.Namespace, config: Mapping[str, Any]) -> Compressor:
    return Compressor(
        args.codec, args.states,
        block_size=config['block_size'],
        state_budget=config['state_budget'],
        tolerance=getattr(args, 'tolerance', config['tolerance']),
        direct_max_states=config['direct_max_states'],
        power_iter_max=config['power_iter_max'],
        refine_passes=config['refine_passes'],
    )


def _read(path: str) -> bytes:
    with open(path, 'rb') as infile:
        return infile.read()


def _write(path: str, data: bytes) -> None:
    with open(path, 'wb') as outfile:
        outfile.write(data)


def cmd_compress(args: argparse.Namespace, config: Mapping[str, Any]) -> int:
    result = _compressor(args, config).compress(_read(args.input),
                                                embed_table=args.table_out is None)
    _write(args.output, result.container)
    if args.table_out:
        _write(args.table_out, result.table)
    print(json.dumps(result.report, indent=2))
    return EXIT_OK


def cmd_decompress(args: argparse.Namespace, _config: Mapping[str, Any]) -> int:
    table = _read(args.table) if args.table else None
    _write(args.output, Compressor.decompress(_read(args.input), table))
    return EXIT_OK


def cmd_figures(args: argparse.Namespace, _config: Mapping[str, Any]) -> int:
    if args.csv:
        rows = write_figure_csv(args.figure, args.csv)
        logger.info("Wrote %d rows of %s to %s", rows, args.figure, args.csv)
    else:
        sys.stdout.write(figure_csv(figure_data(args.figure)))
    return EXIT_OK


def cmd_build_table(args: argparse.Namespace, config: Mapping[str, Any]) -> int:
    p = Compressor.distribution(_read(args.input))
    if p is None:
        raise AedsError("cannot build a table for an empty file")
    built = _compressor(args, config).build_table(p)
    _write(args.table_out, serialize_table(built.table))
    print(json.dumps({'codec': built.codec, 'fallback': built.fallback,
                      'num_states': built.table.num_states,
                      'analytic_rate': built.analytic_rate}, indent=2))
    return EXIT_OK


def _analysis_source(args: argparse.Namespace) -> SourceDistribution:
    if args.input:
        if args.reference:
            raise AedsError("a reference table needs --probs over its own alphabet")
        p = Compressor.distribution(_read(args.input))
        if p is None:
            raise AedsError("cannot analyze an empty file")
        return p
    try:
        weights = [float(w) for w in args.probs.split(',')]
    except ValueError as exc:
        raise InvalidWeight(f"cannot parse probabilities {args.probs!r}") from exc
    if args.reference:
        symbols: Sequence[Any] = ResourceLoader.get_table(args.reference).symbols
        if len(symbols) != len(weights):
            raise AedsError(f"{args.reference} has {len(symbols)} symbols, "
                            f"got {len(weights)} probabilities")
    else:
        symbols = list(range(len(weights)))
    return validate_distribution(list(zip(symbols, weights)))


def cmd_analyze(args: argparse.Namespace, config: Mapping[str, Any]) -> int:
    p = _analysis_source(args)
    if args.reference:
        table = ResourceLoader.get_table(args.reference)
        validate_aeds(table)
        codec = table.kind
    else:
        built = _compressor(args, config).build_table(p)
        table = built.table
        codec = built.codec
    report = stationary_distribution(table, p, config['direct_max_states'],
                                     config['power_iter_max'])
    bounds = [check_bound(table, p, which, tolerance=args.tolerance, stationary=report)
              for which, kinds in CHECK_KINDS.items() if table.kind in kinds]
    comparison = compare_rates(table, p, args.symbols, args.seed)
    if args.csv:
        with open(args.csv, 'w', encoding='utf-8', newline='') as outfile:
            outfile.write(bound_reports_to_csv(bounds))
    print(json.dumps({
        'codec': codec,
        'num_states': table.num_states,
        'entropy': entropy(p),
        'rate': report.length,
        'rate_decoder_view': report.length_decoder_view,
        'solver': report.method,
        'monte_carlo_rate': comparison.empirical,
        'monte_carlo_stderr': comparison.stderr,
        'monte_carlo_within_3_stderr': comparison.within,
        'bounds': {b.name: {'left': b.left, 'right': b.right, 'holds': b.holds}
                   for b in bounds},
    }, indent=2))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None,
         defaults: Optional[Mapping[str, Any]] = None) -> int:
    config = {**DEFAULTS, **(defaults or {})}
    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    handler: Callable[[argparse.Namespace, Mapping[str, Any]], int] = args.handler
    try:
        return handler(args, config)
    except (AedsError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pylint: disable=broad-exception-caught
        logger.exception("Internal failure in %s", args.command)
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    logging.basicConfig(level=logging.INFO)
    sys.exit(main())
