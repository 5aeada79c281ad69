"""Shared --in/--out plumbing for the plot scripts."""

import argparse
import sys

from .io import SchemaError


def run(description, build, multi_input=False):
    parser = argparse.ArgumentParser(description=description)
    nargs = "+" if multi_input else None
    parser.add_argument("--in", dest="inputs", required=True, nargs=nargs,
                        help="input CSV path" + ("s" if multi_input else ""))
    parser.add_argument("--out", dest="out", required=True,
                        help="output image path (.png or .svg)")
    args = parser.parse_args()
    if not (args.out.endswith(".png") or args.out.endswith(".svg")):
        print("error: --out must end in .png or .svg", file=sys.stderr)
        return 2
    inputs = args.inputs if multi_input else [args.inputs]
    try:
        build(inputs, args.out)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
