import argparse
import os
import sys

from hrl_py.experiments.commands import COMMANDS
from hrl_py.experiments.config import load_config
from hrl_py.framework.errors import ConfigurationError, DomainError
from hrl_py.utils import typ
from hrl_py.utils.interfaces.conversion import dumps_report, write_csv, write_json

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="hrl", description="Numerical experiments on Poisson extensions and harmonic qc maps"
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="experiment to run")
    parser.add_argument("--config", type=str, default=None, help="JSON configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration value (repeatable)",
    )
    parser.add_argument("--out", type=str, default=None, help="directory for CSV and JSON files")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="stdout format")
    parser.add_argument("--progress", action="store_true", help="show tqdm progress bars on stderr")
    args = parser.parse_args(argv)
    return parser, args


def write_outputs(command, result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, (header, rows) in sorted(result.tables.items()):
        write_csv(os.path.join(out_dir, "%s.csv" % name), header, rows)
    write_json(os.path.join(out_dir, "%s.json" % command), command, result.summary)


def print_result(command, result, fmt):
    if fmt == "json":
        body = dict(result.summary)
        body["tables"] = {name: {"header": h, "rows": r} for name, (h, r) in result.tables.items()}
        sys.stdout.write(dumps_report(command, body))
    else:
        # the first table is the primary one
        header, rows = next(iter(result.tables.values()))
        write_csv(sys.stdout, header, rows)


def main(argv=None):
    parser, args = parse_args(argv)
    try:
        overrides = args.overrides + (["progress=true"] if args.progress else [])
        config = load_config(args.config, overrides)
        result = COMMANDS[args.command](config)
    except (ConfigurationError, DomainError) as e:
        print(typ.error("%s: %s" % (type(e).__name__, e)), file=sys.stderr)
        return EXIT_USAGE
    for message in result.warnings:
        print(typ.warning(message), file=sys.stderr)
    if args.out is not None:
        write_outputs(args.command, result, args.out)
    else:
        print_result(args.command, result, args.format)
    print(typ.verdict(result.ok), file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
