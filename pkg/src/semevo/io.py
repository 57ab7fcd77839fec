"""Network files and DOT export.

A network file is JSON::

    {
      "concepts": ["earth", "moon"],
      "relations": [
        {"type": "HasA", "source": "earth", "target": "moon", "score": 5}
      ]
    }

``concepts`` may omit concepts already named by a relation; ``score``
defaults to 1.  Order is preserved and is the order reports use.
"""

from __future__ import annotations

import json
from pathlib import Path

from .exceptions import InvalidRelationError, ParseError
from .network import Relation, SemanticNetwork


def network_to_dict(net: SemanticNetwork) -> dict:
    return {
        "concepts": list(net.concepts),
        "relations": [
            {"type": r.rel_type, "source": r.source, "target": r.target, "score": r.score}
            for r in net
        ],
    }


def network_from_dict(doc: dict, source=None) -> SemanticNetwork:
    if not isinstance(doc, dict):
        raise ParseError("network document must be a JSON object", source)
    try:
        rels = []
        for i, rec in enumerate(doc.get("relations", [])):
            try:
                rels.append(Relation.parse(rec["type"], rec["source"], rec["target"],
                                           rec.get("score", 1)))
            except KeyError as e:
                raise ParseError(f"relation #{i} lacks field {e.args[0]!r}", source) from None
        return SemanticNetwork(doc.get("concepts", []), rels)
    except InvalidRelationError as e:
        raise ParseError(str(e), source) from None


def read_network(path) -> SemanticNetwork:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path, e.lineno) from None
    return network_from_dict(doc, path)


def write_network(net: SemanticNetwork, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=2) + "\n", encoding="utf-8")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: SemanticNetwork, name: str = "network") -> str:
    """Graphviz source with one labelled edge per relation."""
    lines = [f"digraph {_quote(name)} {{"]
    lines += [f"  {_quote(c)};" for c in net.concepts]
    lines += [f"  {_quote(r.source)} -> {_quote(r.target)} [label={_quote(r.rel_type)}];" for r in net]
    lines.append("}")
    return "\n".join(lines) + "\n"
