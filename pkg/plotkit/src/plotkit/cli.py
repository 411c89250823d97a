"""Command line entry points.

`plotkit render --spec spec.json` renders one figure from a FigureSpec
JSON document; `plotkit all --dir outputs/` renders every recognized CSV
under a directory.  Exit codes: 0 success, 2 bad spec or unusable input.
"""

import argparse
import json
import sys
from pathlib import Path

from .figures import FigureSpec, PlotError, render, render_all


def _load_spec(path: str) -> FigureSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise PlotError(f"cannot read spec file: {err}") from None
    except json.JSONDecodeError as err:
        raise PlotError(f"spec file is not valid JSON: {err}") from None
    return FigureSpec.from_dict(data)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render diagnostic figures from whitham-lab CSV artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure from a spec file")
    p_render.add_argument("--spec", required=True, help="FigureSpec JSON document")
    p_all = sub.add_parser("all", help="render every recognized CSV in a directory")
    p_all.add_argument("--dir", required=True, help="experiment output directory")
    args = parser.parse_args(argv)

    try:
        if args.command == "render":
            out = render(_load_spec(args.spec))
            print(f"wrote {out}")
        else:
            done = render_all(Path(args.dir))
            for path, kind, out in done:
                print(f"{path} [{kind}] -> {out}")
            print(f"rendered {len(done)} figure(s)")
    except PlotError as err:
        print(f"plotkit: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
