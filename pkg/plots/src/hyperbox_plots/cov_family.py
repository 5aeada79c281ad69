"""Render a kernel-family CSV (one curve per exponent a)."""

import sys

from ._script import run
from .figures import cov_family_figure, save
from .io import read_rows


def build(inputs, out):
    rows = read_rows(inputs[0], "cov_theory")
    save(cov_family_figure(rows), out)


def main():
    sys.exit(run(__doc__, build))


if __name__ == "__main__":
    main()
