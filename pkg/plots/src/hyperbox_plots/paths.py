"""Overlay coarse-grained path dumps (one color per input file)."""

import os
import sys

from ._script import run
from .figures import paths_figure, save
from .io import read_rows


def build(inputs, out):
    rows_per_input = [read_rows(p, "paths") for p in inputs]
    labels = [os.path.basename(os.path.dirname(p) or p) for p in inputs]
    save(paths_figure(rows_per_input, labels), out)


def main():
    sys.exit(run(__doc__, build, multi_input=True))


if __name__ == "__main__":
    main()
