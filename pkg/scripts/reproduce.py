"""Print the reproduction table (computed values vs. closed forms and reference constants)."""
import argparse
import sys

from gptcompat.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--format", default="table", choices=["json", "csv", "table"])
    ap.add_argument("--budget", default="200")
    a = ap.parse_args()
    sys.exit(main(["reproduce", "--format", a.format, "--budget", a.budget]))
