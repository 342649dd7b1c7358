#!/usr/bin/env python3
"""Start the annotation service on a fresh data dir loaded with the sample
corpus, for the UI automation flow. Account: flow / flow-pass."""

import argparse

from tht import fixtures
from tht.service import UserStore, create_app
from tht.store import Store


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", required=True)
    parser.add_argument("--port", type=int, required=True)
    args = parser.parse_args()

    store = Store.init(args.data_dir)
    fixtures.build_kv_corpus(store, with_collation_witnesses=True)
    users = UserStore(store.users_path)
    users.add("flow", "flow-pass")
    app = create_app(store, users, secret="flow-secret")

    import uvicorn
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
