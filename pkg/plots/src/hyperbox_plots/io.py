"""Strict readers for the simulator's CSV schemas.

These scripts are read-only consumers: all numbers come from the CSVs, and
a file whose header deviates from the published schema is rejected with
the exact column difference rather than guessed at.
"""

import csv

import numpy as np

SCHEMAS = {
    "cov_theory": (["family", "d", "a", "z1", "cov"],
                   ["family", "d", "a", "z1", "z2", "cov"]),
    "cov_curve": (["process", "d", "n", "R", "z1", "cov_hat", "se", "cov_theory"],
                  ["process", "d", "n", "R", "z1", "z2", "cov_hat", "se",
                   "cov_theory"]),
    "var_growth": (["n", "var_hat", "se"],),
    "paths": (["replica", "z", "value"],),
}


class SchemaError(ValueError):
    def __init__(self, kind, header, expected, reason=None):
        self.missing = [c for c in expected if c not in header]
        self.extra = [c for c in header if c not in expected]
        msg = reason or (f"{kind} CSV header mismatch: missing columns "
                         f"{self.missing}, unexpected columns {self.extra}")
        super().__init__(msg)


def read_rows(path, kind):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(kind, [], list(SCHEMAS[kind][0]),
                              reason=f"{kind} CSV {path!r} is empty") from None
        for candidate in SCHEMAS[kind]:
            if header == candidate:
                break
        else:
            closest = min(SCHEMAS[kind],
                          key=lambda c: len(set(c) ^ set(header)))
            raise SchemaError(kind, header, list(closest))
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(kind, header, header,
                          reason=f"{kind} CSV {path!r} has a header but no rows")
    return rows


def column(rows, name, dtype=float):
    return np.array([dtype(r[name]) for r in rows])
