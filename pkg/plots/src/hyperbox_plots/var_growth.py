"""Render a variance-growth table on log-log axes."""

import sys

from ._script import run
from .figures import save, var_growth_figure
from .io import read_rows


def build(inputs, out):
    save(var_growth_figure(read_rows(inputs[0], "var_growth")), out)


def main():
    sys.exit(run(__doc__, build))


if __name__ == "__main__":
    main()
