#!/usr/bin/env python3
"""Build every tree variant the sample corpus supports and print them.

Run scripts/build_kv_corpus.py first (or point --data-dir at any corpus).
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tht.errors import ThtError
from tht.phylogeny import TreeRequest, build_tree, to_newick
from tht.store import Store


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="tht-data")
    parser.add_argument("--work", default="KV")
    parser.add_argument("--units", default="1.1.1.1,1.1.1.2",
                        help="comma-separated unit scope")
    args = parser.parse_args()

    units = tuple(u for u in args.units.split(",") if u)
    store = Store.open(args.data_dir)
    for sources in ("manuscripts", "commentaries", "both"):
        for method in ("upgma", "nj"):
            request = TreeRequest(sources=sources, method=method, units=units)
            try:
                matrix, tree = build_tree(store.corpus, args.work, request)
            except ThtError as exc:
                print(f"{sources:13s} {method:5s}  -- {exc.code}: {exc.message}")
                continue
            print(f"{sources:13s} {method:5s}  taxa={','.join(matrix.taxa)}")
            print(f"  {to_newick(tree)}")
    store.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
