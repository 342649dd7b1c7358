#!/usr/bin/env python3
"""Initialize a data directory with the sample KV corpus.

Creates the two worked passages (1.1.1 with Ny/Pm evidence, 2.1.22 with
Ny/Tp), one manuscript witness reading every unit, and optionally the two
variant manuscripts used for tree demos. Also creates a demo service account
(user "demo", password "demo") so `tht serve` works out of the box.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tht import fixtures
from tht.service import UserStore
from tht.store import Store


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="tht-data")
    parser.add_argument("--skip-collation-witnesses", action="store_true",
                        help="only the single manuscript of the worked examples")
    args = parser.parse_args()

    store = Store.init(args.data_dir)
    fixtures.build_kv_corpus(
        store, with_collation_witnesses=not args.skip_collation_witnesses)
    users = UserStore(store.users_path)
    users.add("demo", "demo")

    ny = store.support_report("KV", ["1.1.1.1", "1.1.1.2"], "Ny")
    pm = store.support_report("KV", ["1.1.1.1", "1.1.1.2"], "Pm")
    print(f"built KV corpus in {args.data_dir}")
    print(f"  1.1.1 sections 1-2: Ny {ny.supported_count}/{ny.total_tokens}, "
          f"Pm {pm.supported_count}/{pm.total_tokens}")
    hints = store.transmission_report("KV", "1.1.1.3").archetype_hints
    print(f"  1.1.1.3 archetype hints: {', '.join(hints)}")
    store.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
