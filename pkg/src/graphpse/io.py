"""JSONL graph records, encoding CSVs and weight files."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .encodings import PseVector
from .errors import GraphPSEError, MalformedRecord
from .graph import Graph, build_graph
from .mpnn import GatedGcnLayerWeights, GinLayerWeights, GpseHead, GpseWeights

RECORD_KEYS = ("num_nodes", "edges", "node_labels", "graph_label", "node_task_labels", "virtual_node")
ENCODING_COLUMNS = ("graph_id", "node_id", "kind", "component_index", "value")


@dataclass(frozen=True)
class GraphRecord:
    graph: Graph
    graph_label: object = None
    node_task_labels: tuple | None = None


def dumps_json(obj) -> str:
    """Compact JSON with stable separators, used for every file the package writes."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


# ------------------------------------------------------------------ JSONL

def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"{what} must be an integer, got {x!r}")
    return x


def record_from_dict(d: dict) -> GraphRecord:
    if not isinstance(d, dict):
        raise ValueError("record is not a JSON object")
    unknown = set(d) - set(RECORD_KEYS)
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)}")
    if "num_nodes" not in d or "edges" not in d:
        raise ValueError("record needs num_nodes and edges")
    n = _int(d["num_nodes"], "num_nodes")
    edges = d["edges"]
    if not isinstance(edges, list) or any(not isinstance(e, list) or len(e) != 2 for e in edges):
        raise ValueError("edges must be a list of [u, v] pairs")
    edges = [(_int(u, "edge endpoint"), _int(v, "edge endpoint")) for u, v in edges]
    labels = d.get("node_labels")
    if labels is not None:
        labels = [_int(x, "node label") for x in labels]
    task = d.get("node_task_labels")
    if task is not None:
        task = tuple(_int(x, "node task label") for x in task)
        if len(task) != n:
            raise ValueError(f"{len(task)} node task labels for {n} nodes")
    g = build_graph(n, edges, labels, d.get("virtual_node"))
    return GraphRecord(g, d.get("graph_label"), task)


def record_to_dict(r: GraphRecord) -> dict:
    g = r.graph
    d: dict = {"num_nodes": g.num_nodes, "edges": [list(e) for e in g.edges]}
    if g.node_labels is not None:
        d["node_labels"] = list(g.node_labels)
    if r.graph_label is not None:
        d["graph_label"] = r.graph_label
    if r.node_task_labels is not None:
        d["node_task_labels"] = list(r.node_task_labels)
    if g.virtual_node is not None:
        d["virtual_node"] = g.virtual_node
    return d


def parse_jsonl(stream: IO[str] | Iterable[str]) -> list[GraphRecord]:
    """Parse one record per non-blank line; errors carry the 1-based line number."""
    out = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            out.append(record_from_dict(json.loads(line)))
        except (ValueError, TypeError, GraphPSEError) as exc:
            raise MalformedRecord(str(exc), lineno) from exc
    return out


def serialize_jsonl(records: Iterable[GraphRecord | Graph]) -> str:
    lines = []
    for r in records:
        if isinstance(r, Graph):
            r = GraphRecord(r)
        lines.append(dumps_json(record_to_dict(r)) + "\n")
    return "".join(lines)


def read_jsonl(path) -> list[GraphRecord]:
    with open(path, encoding="utf-8") as f:
        return parse_jsonl(f)


def write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_jsonl(records))


def bundle_records(bundle) -> list[GraphRecord]:
    """Records for a :class:`~graphpse.datasets.DatasetBundle`."""
    if bundle.level == "node":
        return [GraphRecord(g, None, tuple(lab)) for g, lab in zip(bundle.graphs, bundle.labels)]
    return [GraphRecord(g, lab) for g, lab in zip(bundle.graphs, bundle.labels)]


# -------------------------------------------------------------- encodings

def encoding_rows(graph_id: int, pses: Sequence[PseVector]) -> list[list]:
    rows = []
    for p in pses:
        for i, row in enumerate(p.values):
            node = -1 if p.level == "graph" else i
            for j, x in enumerate(row):
                rows.append([graph_id, node, p.kind, j, repr(float(x))])
    return rows


def encodings_csv(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ENCODING_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def read_encodings_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    for r in rows:
        r["graph_id"] = int(r["graph_id"])
        r["node_id"] = int(r["node_id"])
        r["component_index"] = int(r["component_index"])
        r["value"] = float(r["value"])
    return rows


# ---------------------------------------------------------------- weights

def _mat_to_json(m) -> dict:
    m = np.asarray(m, dtype=float)
    return {"shape": list(m.shape), "data": m.ravel().tolist()}


def _mat_from_json(d) -> np.ndarray:
    try:
        return np.asarray(d["data"], dtype=float).reshape(d["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(f"bad matrix entry: {exc}") from exc


def weights_to_json(w) -> dict:
    if isinstance(w, GpseWeights):
        return {
            "model": "gpse",
            "w_inp": _mat_to_json(w.w_inp),
            "layers": [{k: _mat_to_json(getattr(l, k)) for k in "UVAB"} for l in w.layers],
            "heads": [{"w1": _mat_to_json(h.w1), "w2": _mat_to_json(h.w2), "level": h.level} for h in w.heads],
        }
    return {
        "model": "gin",
        "layers": [
            {"epsilon": l.epsilon, "mlp_w1": _mat_to_json(l.mlp_w1), "mlp_w2": _mat_to_json(l.mlp_w2)}
            for l in w
        ],
    }


def weights_from_json(d: dict):
    """A :class:`GpseWeights` or a list of :class:`GinLayerWeights`, depending on ``model``."""
    model = d.get("model")
    if model == "gpse":
        layers = [GatedGcnLayerWeights(*(_mat_from_json(l[k]) for k in "UVAB")) for l in d.get("layers", [])]
        heads = [GpseHead(_mat_from_json(h["w1"]), _mat_from_json(h["w2"]), h.get("level", "node")) for h in d.get("heads", [])]
        return GpseWeights(_mat_from_json(d["w_inp"]), layers, heads)
    if model == "gin":
        return [GinLayerWeights(float(l["epsilon"]), _mat_from_json(l["mlp_w1"]), _mat_from_json(l["mlp_w2"])) for l in d["layers"]]
    raise MalformedRecord(f"unknown weight model {model!r}")
