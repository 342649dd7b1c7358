"""Command-line entry point: store administration, batch import/export,
reports, tree generation, and serving the HTTP API.

Exit codes: 0 success, 1 domain error (machine-readable code on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import getpass
import json
import os
import sys
from pathlib import Path as FsPath

from .errors import ThtError
from .phylogeny import TreeRequest, to_newick
from .service import UserStore, serve
from .store import Store, _atomic_write

SOURCES_BY_FLAG = {"manuscripts": "manuscripts", "commentaries": "commentaries",
                   "both": "both"}


def _data_dir(args) -> str:
    return args.data_dir or os.environ.get("THT_DATA_DIR") or "tht-data"


def _add_data_dir(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data-dir", help="data directory (default: $THT_DATA_DIR or ./tht-data)")


def _open_store(args) -> Store:
    return Store.open(_data_dir(args))


def cmd_init(args) -> int:
    limit = args.sibling_limit
    store = Store.init(_data_dir(args), sibling_limit=limit)
    store.close()
    print(f"initialized {_data_dir(args)} (sibling limit {store.sibling_limit})")
    return 0


def cmd_user_add(args) -> int:
    users = UserStore(FsPath(_data_dir(args)) / "users.json")
    password = args.password or getpass.getpass(f"password for {args.name}: ")
    users.add(args.name, password, role=args.role)
    print(f"added user {args.name} ({args.role})")
    return 0


def cmd_user_list(args) -> int:
    users = UserStore(FsPath(_data_dir(args)) / "users.json")
    for account in sorted(users.users.values(), key=lambda u: u.username):
        print(f"{account.username}\t{account.role}")
    return 0


def cmd_import(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        document = json.load(fh)
    with _open_store(args) as store:
        result = store.import_document(document, actor=args.actor)
    print(f"imported works {result['works']} witnesses {result['witnesses']}")
    return 0


def cmd_export(args) -> int:
    with _open_store(args) as store:
        store.export_to_file(args.file)
    print(f"exported corpus to {args.file}")
    return 0


def cmd_report_support(args) -> int:
    unit_ids = [u for u in args.units.split(",") if u]
    with _open_store(args) as store:
        stats = store.support_report(args.work, unit_ids, args.layer)
    if args.format == "json":
        print(json.dumps(stats.to_document(), ensure_ascii=False, indent=2))
    else:
        print(f"{stats.supported_count}/{stats.total_tokens} "
              f"({stats.percentage:.1f}%)")
    return 0


def cmd_report_transmission(args) -> int:
    with _open_store(args) as store:
        report = store.transmission_report(args.work, args.unit)
    if args.format == "json":
        print(json.dumps(report.to_document(), ensure_ascii=False, indent=2))
        return 0
    for label, lt in report.layers.items():
        if lt.uniform:
            print(f"layer {label}: uniform")
        else:
            print(f"layer {label}: {len(lt.variations)} variation(s)")
            for v in lt.variations:
                print(f"  token {v.token_index}: base {v.base_form!r} "
                      f"vs quoted {v.quoted_form!r}")
    hints = ", ".join(report.archetype_hints) or "(none)"
    print(f"archetype hints: {hints}")
    return 0


def cmd_tree(args) -> int:
    units = tuple(u for u in args.units.split(",") if u) if args.units else None
    request = TreeRequest(sources=SOURCES_BY_FLAG[args.sources],
                          method=args.method, units=units)
    with _open_store(args) as store:
        matrix, tree = store.build_tree(args.work, request)
    newick = to_newick(tree)
    if args.out:
        _atomic_write(FsPath(args.out), newick + "\n")
        print(f"wrote {args.out}")
    else:
        print(newick)
    if args.matrix:
        _atomic_write(FsPath(args.matrix), matrix.to_csv())
        print(f"wrote {args.matrix}")
    if tree.clamped:
        print("warning: negative branch lengths clamped to 0", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    store = Store.open(_data_dir(args))
    serve(store, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tht", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty store")
    _add_data_dir(p)
    p.add_argument("--sibling-limit", type=int, default=None,
                   help="max commentary layers per parent (default: $THT_SIBLING_LIMIT or 8)")
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("user", help="manage service accounts")
    usub = p.add_subparsers(dest="user_command", required=True)
    pa = usub.add_parser("add")
    _add_data_dir(pa)
    pa.add_argument("name")
    pa.add_argument("--role", default="Annotator", choices=["Annotator", "Admin"])
    pa.add_argument("--password", help="set non-interactively (otherwise prompts)")
    pa.set_defaults(fn=cmd_user_add)
    pl = usub.add_parser("list")
    _add_data_dir(pl)
    pl.set_defaults(fn=cmd_user_list)

    p = sub.add_parser("import", help="load an interchange document")
    _add_data_dir(p)
    p.add_argument("file")
    p.add_argument("--actor", default="cli")
    p.set_defaults(fn=cmd_import)

    p = sub.add_parser("export", help="write the canonical interchange document")
    _add_data_dir(p)
    p.add_argument("file")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("report", help="support and transmission reports")
    rsub = p.add_subparsers(dest="report_command", required=True)
    ps = rsub.add_parser("support")
    _add_data_dir(ps)
    ps.add_argument("--work", required=True)
    ps.add_argument("--units", required=True, help="comma-separated unit ids")
    ps.add_argument("--layer", required=True)
    ps.add_argument("--format", choices=["text", "json"], default="text")
    ps.set_defaults(fn=cmd_report_support)
    pt = rsub.add_parser("transmission")
    _add_data_dir(pt)
    pt.add_argument("--work", required=True)
    pt.add_argument("--unit", required=True)
    pt.add_argument("--format", choices=["text", "json"], default="text")
    pt.set_defaults(fn=cmd_report_transmission)

    p = sub.add_parser("tree", help="build a phylogenetic tree")
    _add_data_dir(p)
    p.add_argument("--work", required=True)
    p.add_argument("--method", choices=["upgma", "nj"], default="upgma")
    p.add_argument("--sources", choices=list(SOURCES_BY_FLAG), default="manuscripts")
    p.add_argument("--units", help="comma-separated unit ids (default: all)")
    p.add_argument("--out", help="write Newick here (atomic)")
    p.add_argument("--matrix", help="write the distance matrix CSV here (atomic)")
    p.set_defaults(fn=cmd_tree)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_data_dir(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None,
                   help="default: $THT_PORT or 8077")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ThtError as exc:
        print(f"{exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"FileNotFound: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
