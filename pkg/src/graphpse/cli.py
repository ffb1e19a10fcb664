"""Command-line entry point: ``graphpse <subcommand> ...``.

Every run writes its outputs plus ``<out>.config.json`` holding the fully
resolved options. Exit codes: 0 success, 1 bad input, 2 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

from .datasets import CSL_SKIPS, STATS_COLUMNS, DatasetBundle, dataset_stats, fig1_graphs, gen_csl, gen_regular, gen_tri
from .encodings import PseConfig
from .errors import GraphPSEError, VerdictFailed
from .experiments import encode_records, verify_thm1_rows, verify_thm2, wl_report
from .io import bundle_records, dumps_json, encodings_csv, read_jsonl, serialize_jsonl, weights_from_json
from .wl import DEFAULT_QUANT

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2

# built-in defaults; a --config file overrides these, explicit flags override both
DEFAULTS = {
    "seed": 0,
    "quantize": DEFAULT_QUANT,
    "threads": 1,
    "pse": None,
    "lap_pe": None,
    "rwse": None,
    "elstatic": None,
    "hk_diag": None,
    "cycle": None,
    "lap_eigval": None,
    "forward": None,
    "residual": None,
    "alphas": [0.5, 0.1, 0.01, 0.001],
    "trials": 100,
    "literal": None,
    "skips": list(CSL_SKIPS),
    "copies": 15,
    "n": None,
    "d": None,
    "count": None,
    "columns": list(STATS_COLUMNS),
    "name": None,
}


class InputError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser, out_required: bool = True):
    p.add_argument("--seed", type=int, help="seed for every random choice (default 0)")
    p.add_argument("--config", help="JSON file with option values; explicit flags win")
    p.add_argument("--out", required=out_required, help="output file")
    p.add_argument("--quantize", type=int, help="decimal places used to turn encodings into colors (default 6)")
    p.add_argument("--threads", type=int, help="worker threads; output order never depends on it")


def _add_pse(p: argparse.ArgumentParser):
    p.add_argument("--pse", help='PSE config as inline JSON, e.g. \'{"lap_pe": 4, "cycle": 3}\'')
    p.add_argument("--lap-pe", dest="lap_pe", type=int, metavar="M")
    p.add_argument("--rwse", type=int, metavar="K", help="random-walk return probabilities for 1..K steps")
    p.add_argument("--elstatic", action="store_const", const=True)
    p.add_argument("--hk-diag", dest="hk_diag", type=float, nargs="+", metavar="T")
    p.add_argument("--cycle", type=int, metavar="K", help="cycle counts for lengths 3..K")
    p.add_argument("--lap-eigval", dest="lap_eigval", type=int, metavar="M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphpse", description="Graph positional and structural encodings, WL refinement and expressivity checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="compute encodings for a JSONL bundle")
    p.add_argument("input")
    _add_common(p)
    _add_pse(p)
    p.add_argument("--forward", help="GPSE weight JSON; appends encoder and head outputs")
    p.add_argument("--residual", action="store_const", const=True, help="residual GatedGCN layers in the GPSE encoder")

    p = sub.add_parser("wl", help="color refinement report for a JSONL bundle")
    p.add_argument("input")
    _add_common(p)
    _add_pse(p)

    p = sub.add_parser("verify-thm1", help="GIN emulation by GatedGCN on random cases")
    _add_common(p)
    p.add_argument("--alphas", type=float, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--literal", action="store_const", const=True, help="use alpha at every layer instead of splitting it")

    p = sub.add_parser("verify-thm2", help="colored circulant counterexample")
    _add_common(p)

    p = sub.add_parser("gen", help="generate a synthetic dataset as JSONL")
    p.add_argument("dataset", choices=["csl", "regular", "tri", "fig1"])
    _add_common(p)
    p.add_argument("--skips", type=int, nargs="+")
    p.add_argument("--copies", type=int, help="copies per CSL class (default 15)")
    p.add_argument("--n", type=int, help="nodes per graph")
    p.add_argument("--d", type=int, help="degree for regular graphs")
    p.add_argument("--count", type=int, help="number of graphs")

    p = sub.add_parser("stats", help="classical graph statistics of a JSONL bundle")
    p.add_argument("input")
    _add_common(p)
    p.add_argument("--columns", nargs="+", choices=STATS_COLUMNS)
    p.add_argument("--name", help="dataset name in the first column (default: input file stem)")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the --config file and explicit flags."""
    opts = {k: v for k, v in vars(args).items() if k != "config"}
    file_opts = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                file_opts = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_opts, dict):
            raise InputError("config file must hold a JSON object")
    for k, v in opts.items():
        if v is None:
            opts[k] = file_opts.get(k, DEFAULTS.get(k))
    if opts["threads"] < 1:
        raise InputError("--threads must be >= 1")
    return opts


def pse_config(opts: dict) -> PseConfig | None:
    base = opts.get("pse")
    if isinstance(base, str):
        try:
            base = json.loads(base)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad --pse JSON: {exc}") from exc
    d = dict(base or {})
    if opts.get("lap_pe"):
        d["lap_pe"] = opts["lap_pe"]
    if opts.get("rwse"):
        d["rwse"] = list(range(1, opts["rwse"] + 1))
    if opts.get("elstatic"):
        d["elstatic"] = True
    if opts.get("hk_diag"):
        d["hk_diag"] = opts["hk_diag"]
    if opts.get("cycle"):
        d["cycle"] = opts["cycle"]
    if opts.get("lap_eigval"):
        d["lap_eigval"] = opts["lap_eigval"]
    if not d:
        return None
    try:
        return PseConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad PSE config: {exc}") from exc


@contextmanager
def _mapper(threads: int):
    if threads <= 1:
        yield map
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            yield ex.map


def _write(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _write_config(opts: dict, command: str):
    resolved = dict(opts, command=command)
    _write(f"{opts['out']}.config.json", json.dumps(resolved, indent=2, sort_keys=True) + "\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ------------------------------------------------------------- subcommands

def cmd_encode(opts: dict) -> int:
    records = read_jsonl(opts["input"])
    cfg = pse_config(opts)
    weights = None
    if opts.get("forward"):
        with open(opts["forward"], encoding="utf-8") as f:
            weights = weights_from_json(json.load(f))
        if isinstance(weights, list):
            raise InputError("--forward expects GPSE weights, got a GIN stack")
    if cfg is None and weights is None:
        raise InputError("nothing to compute: give a PSE config or --forward weights")
    opts["pse"] = None if cfg is None else cfg.to_dict()
    with _mapper(opts["threads"]) as m:
        rows = encode_records(records, cfg, weights, opts["seed"], bool(opts.get("residual")), m)
    _write(opts["out"], encodings_csv(rows))
    _write_config(opts, "encode")
    return EXIT_OK


def cmd_wl(opts: dict) -> int:
    records = read_jsonl(opts["input"])
    if not records:
        raise InputError("wl needs at least one graph")
    cfg = pse_config(opts)
    opts["pse"] = None if cfg is None else cfg.to_dict()
    with _mapper(opts["threads"]) as m:
        report = wl_report([r.graph for r in records], cfg, opts["quantize"], m)
    _write(opts["out"], dumps_json(report) + "\n")
    _write_config(opts, "wl")
    return EXIT_OK


def cmd_verify_thm1(opts: dict) -> int:
    alphas = [float(a) for a in opts["alphas"]]
    with _mapper(opts["threads"]) as m:
        rows = verify_thm1_rows(alphas, int(opts["trials"]), opts["seed"], split=not opts.get("literal"), map_fn=m)
    header = ["alpha", "trial", "num_nodes", "num_layers", "max_error", "bound", "pass"]
    body = [[repr(r["alpha"]), r["trial"], r["num_nodes"], r["num_layers"], repr(r["max_error"]), repr(r["bound"]), int(r["pass"])] for r in rows]
    _write(opts["out"], _csv(header, body))
    _write_config(opts, "verify-thm1")
    failed = sum(1 for r in rows if not r["pass"])
    if failed:
        print(f"verify-thm1: {failed} of {len(rows)} cases exceed the bound", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify_thm2(opts: dict) -> int:
    verdict = verify_thm2()
    _write(opts["out"], json.dumps(verdict, indent=2) + "\n")
    _write_config(opts, "verify-thm2")
    return EXIT_OK


def cmd_gen(opts: dict) -> int:
    ds, seed = opts["dataset"], opts["seed"]
    if ds == "csl":
        b = gen_csl(opts["skips"], opts["copies"], seed)
    elif ds == "regular":
        n, d = opts["n"] or 24, opts["d"] or 4
        b = gen_regular(n, d, opts["count"] or 1000, seed)
    elif ds == "tri":
        b = gen_tri(opts["count"] or 1000, opts["n"] or 20, seed)
    else:
        figs = fig1_graphs()
        b = DatasetBundle(list(figs.values()), list(figs), {"generator": "fig1"}, "graph")
    _write(opts["out"], serialize_jsonl(bundle_records(b)))
    _write(f"{opts['out']}.meta.json", json.dumps(b.meta, indent=2, sort_keys=True) + "\n")
    _write_config(opts, "gen")
    return EXIT_OK


def cmd_stats(opts: dict) -> int:
    records = read_jsonl(opts["input"])
    columns = list(opts["columns"])
    bundle = DatasetBundle([r.graph for r in records], [r.graph_label for r in records])
    with _mapper(opts["threads"]) as m:
        stats = dataset_stats(bundle, columns, m)
    name = opts.get("name") or Path(opts["input"]).stem
    _write(opts["out"], _csv(["dataset"] + columns, [[name] + [repr(float(stats[c])) for c in columns]]))
    _write_config(opts, "stats")
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "wl": cmd_wl,
    "verify-thm1": cmd_verify_thm1,
    "verify-thm2": cmd_verify_thm2,
    "gen": cmd_gen,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except VerdictFailed as exc:
        print(f"graphpse {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (InputError, GraphPSEError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"graphpse {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
