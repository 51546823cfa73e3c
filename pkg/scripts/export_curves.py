"""CSV data for external plotting: h(n), f(g), and the hypercube region slice s3 = 0 (n=2, g=3)."""
import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from gptcompat.compat import model_region_membership
from gptcompat.gpt import make_hypercube
from gptcompat.tensor_norms import gamma_crosspolytope, h_function


def main(out: Path, grid: int):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "h_function.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "h"])
        for n in range(1, 51):
            w.writerow([n, repr(h_function(n))])
    with open(out / "f_function.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["g", "f"])
        for g in range(1, 51):
            w.writerow([g, repr(gamma_crosspolytope(g))])
    gpt = make_hypercube(2)
    with open(out / "hypercube_region_slice.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s1", "s2", "s3", "member"])
        for s1 in np.linspace(0, 1, grid):
            for s2 in np.linspace(0, 1, grid):
                s = (float(s1), float(s2), 0.0)
                w.writerow([*s, model_region_membership(gpt, s)])
    print(f"wrote CSVs to {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--grid", type=int, default=21)
    a = ap.parse_args()
    sys.exit(main(a.out, a.grid))
