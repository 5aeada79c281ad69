"""End-to-end CLI pipeline: simulate, tabulate theory, compare.

Drives the `hyperbox` command the way a scripted study would: one
stochastic run, one kernel table, one verdict.  Everything lands in
./demo_output.

Run:  python demos/full_pipeline.py
"""

import json
import pathlib
import subprocess
import sys

OUT = pathlib.Path("demo_output")


def cli(*args):
    cmd = [sys.executable, "-m", "hyperbox.cli", *args]
    print("$", " ".join(str(a) for a in cmd[2:]))
    subprocess.run(cmd, check=True)


def main():
    OUT.mkdir(exist_ok=True)
    process = json.dumps({"kind": "perturbed_uniform", "m": 4})

    cli("simulate", "--process", process, "--n", "512",
        "--zgrid", "-2:2:0.25", "--replicas", "4000", "--seed", "2024",
        "--out-dir", str(OUT / "run"), "--var-replicas", "1000",
        "--path-replicas", "3")

    cli("theory", "--family", "rv1d", "--a", "0,0.1,0.4,0.8,1",
        "--zgrid", "-3:3:0.01", "--out", str(OUT / "cov_theory.csv"))

    cli("compare", "--curve", str(OUT / "run" / "cov_curve.csv"),
        "--family", "integrable", "--out", str(OUT / "verdict.json"))

    verdict = json.loads((OUT / "verdict.json").read_text())
    print(f"\nverdict: pass={verdict['pass']} "
          f"max deviation {verdict['max_deviation']:.2f} sigma-equivalents")


if __name__ == "__main__":
    main()
