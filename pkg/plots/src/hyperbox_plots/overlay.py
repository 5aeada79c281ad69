"""Overlay a Monte Carlo covariance curve with its finite-box values."""

import sys

from ._script import run
from .figures import overlay_figure, save
from .io import read_rows


def build(inputs, out):
    save(overlay_figure(read_rows(inputs[0], "cov_curve")), out)


def main():
    sys.exit(run(__doc__, build))


if __name__ == "__main__":
    main()
