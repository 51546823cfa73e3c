"""Compatibility-degree intervals for the built-in models at small g."""
import argparse

from gptcompat.compat import gamma_model
from gptcompat.gpt import make_ball, make_classical, make_crosspolytope, make_hypercube

MODELS = {
    "classical d=3": lambda: make_classical(3),
    "hypercube n=2": lambda: make_hypercube(2),
    "hypercube n=3": lambda: make_hypercube(3),
    "cross-polytope n=2": lambda: make_crosspolytope(2),
    "ball n=3": lambda: make_ball(3),
}

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gmax", type=int, default=3)
    ap.add_argument("--budget", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    print(f"{'model':20s} {'g':>2s} {'lower':>9s} {'upper':>9s}  source")
    for name, mk in MODELS.items():
        for g in range(2, a.gmax + 1):
            iv = gamma_model(mk(), g, budget=a.budget, seed=a.seed)
            print(f"{name:20s} {g:2d} {iv.lower:9.6f} {iv.upper:9.6f}  {iv.lower_source} / {iv.upper_source}")
