"""Print the exact bounds for a range of dimensions as CSV.

    python scripts/bounds_table.py --max-d 10
"""

import argparse
import csv
import sys
from dataclasses import fields

from tangent_cylinders.bounds import BoundsTable, bounds_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--min-d", type=int, default=2)
    ap.add_argument("--max-d", type=int, default=8)
    args = ap.parse_args()
    writer = csv.DictWriter(sys.stdout, [f.name for f in fields(BoundsTable)])
    writer.writeheader()
    for d in range(args.min_d, args.max_d + 1):
        writer.writerow(bounds_table(d).as_dict())


if __name__ == "__main__":
    main()
