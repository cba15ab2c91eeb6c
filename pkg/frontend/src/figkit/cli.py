"""figkit command line: `figkit <spec.json> [more specs...]`.

Exit codes: 0 ok, 1 usage error, 2 schema error (bad spec or CSV).
"""

from __future__ import annotations

import argparse
import sys

from .render import plot_sweep
from .spec import SchemaError, load_spec


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def main(argv=None) -> int:
    parser = _Parser(prog="figkit",
                     description="render sweep CSVs into figures")
    parser.add_argument("specs", nargs="+", metavar="spec.json")
    args = parser.parse_args(argv)

    for spec_path in args.specs:
        try:
            spec = load_spec(spec_path)
            written = plot_sweep(spec)
        except SchemaError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 2
        for p in written:
            print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
