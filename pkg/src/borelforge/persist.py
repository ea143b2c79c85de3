"""JSON documents for tree exports; byte-stable across export/import cycles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .config import RunConfig
from .exact_arith import decode_exact, encode_exact
from .tree import DEFAULT_TREE, ConstructionTree, TreeNode

FORMAT_VERSION = "1"


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dump_lines(rows: list[dict]) -> str:
    return "".join(dumps(row) + "\n" for row in rows)


@dataclass
class NodeRecord:
    path: tuple[int, ...]
    l: int
    M: int | None
    window: dict[int, Any]

    @classmethod
    def of(cls, node: TreeNode) -> "NodeRecord":
        return cls(node.path, node.level, node.marker_coord, dict(node.window))

    def to_json(self) -> dict:
        return {"path": list(self.path), "l": self.l, "M": self.M,
                "window": {str(n): encode_exact(v) for n, v in sorted(self.window.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "NodeRecord":
        return cls(tuple(data["path"]), data["l"], data["M"],
                   {int(n): decode_exact(v) for n, v in data["window"].items()})


@dataclass
class TreeDocument:
    config: dict
    nodes: list[NodeRecord] = field(default_factory=list)
    format: str = FORMAT_VERSION

    def to_json(self) -> dict:
        return {"format": self.format, "config": self.config,
                "nodes": [n.to_json() for n in self.nodes]}

    def dumps(self) -> str:
        return dumps(self.to_json()) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TreeDocument":
        data = json.loads(text)
        if data.get("format") != FORMAT_VERSION:
            raise ValueError(f"unsupported format {data.get('format')!r}")
        return cls(data["config"], [NodeRecord.from_json(n) for n in data["nodes"]],
                   data["format"])


def collect_nodes(depth: int, fanout: int, tree: ConstructionTree | None = None) -> list[TreeNode]:
    tree = tree or DEFAULT_TREE
    out = [tree.root()]
    frontier = [tree.root()]
    for _ in range(depth):
        frontier = [tree.child(s, i) for s in frontier for i in range(fanout)]
        out.extend(frontier)
    out.sort(key=lambda node: (len(node.path), node.path))
    return out


def export_tree(config: RunConfig, tree: ConstructionTree | None = None) -> TreeDocument:
    nodes = collect_nodes(config.depth, config.fanout, tree)
    return TreeDocument(config.to_json(), [NodeRecord.of(n) for n in nodes])
