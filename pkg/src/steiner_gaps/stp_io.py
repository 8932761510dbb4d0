"""Text formats: STP instance files, JSON label sidecars, solution JSON.

Instances travel as SteinLib-style STP text — a ``SECTION Graph`` with
``Nodes``/``Edges`` counts and one ``E u v cost`` line per edge (1-indexed),
a ``SECTION Terminals`` with ``T v`` lines, and a closing ``EOF``.  Costs
that are not integers use the extension line ``ER u v num den``.  The STP
body cannot carry vertex labels or generator parameters, so those ride in a
JSON sidecar (``<file>.json``): label tuples are stored as nested arrays and
restored as tuples on read.  Solutions and trees serialize as JSON objects
with ``"p/q"`` rational strings, keyed by ``"u,v"`` edge/arc strings.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .graphs import Arc, Edge, Graph, SteinerInstance
from .solutions import (BcrSolution, FormulationSolution, McfrSolution,
                        MbcrSolution, MbfrSolution, SterSolution, TreeSolution)

MAGIC = "33D32945 STP File, STP Format Version 1.0"


# ---------------------------------------------------------------------------
# STP text
# ---------------------------------------------------------------------------

def serialize_graph(graph: Graph, terminals: Sequence[int], name: str) -> str:
    lines = [MAGIC, "", "SECTION Comment", f'Name "{name}"', "END", "",
             "SECTION Graph", f"Nodes {graph.n}", f"Edges {graph.m}"]
    for u, v in graph.edges():
        c = graph.cost(u, v)
        if c.denominator == 1:
            lines.append(f"E {u + 1} {v + 1} {c.numerator}")
        else:
            lines.append(f"ER {u + 1} {v + 1} {c.numerator} {c.denominator}")
    lines += ["END", "", "SECTION Terminals", f"Terminals {len(terminals)}"]
    lines += [f"T {t + 1}" for t in terminals]
    lines += ["END", "", "EOF", ""]
    return "\n".join(lines)


def serialize_instance(inst: SteinerInstance) -> str:
    return serialize_graph(inst.graph, inst.required, inst.name)


class StpParseError(ValueError):
    pass


def parse_stp(text: str) -> tuple[int, dict[Edge, Fraction], list[int], str]:
    """Parse STP text into (vertex count, edge costs, terminals, name)."""
    n = -1
    edges: dict[Edge, Fraction] = {}
    declared_edges = declared_terms = 0
    terminals: list[int] = []
    name = ""
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()

        def fail(msg: str) -> StpParseError:
            return StpParseError(f"line {lineno}: {msg} ({line!r})")

        if not line or line.startswith(MAGIC.split()[0]):
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "SECTION":
            if len(tokens) != 2:
                raise fail("malformed SECTION line")
            section = tokens[1]
        elif head == "END":
            section = None
        elif head == "EOF":
            break
        elif section == "Comment":
            m = re.match(r'Name\s+"(.*)"\s*$', line)
            if m:
                name = m.group(1)
        elif section == "Graph":
            if head == "Nodes":
                n = int(tokens[1])
            elif head == "Edges":
                declared_edges = int(tokens[1])
            elif head == "E":
                if len(tokens) != 4:
                    raise fail("expected 'E u v cost'")
                u, v = int(tokens[1]) - 1, int(tokens[2]) - 1
                edges[(u, v)] = Fraction(tokens[3])
            elif head == "ER":
                if len(tokens) != 5:
                    raise fail("expected 'ER u v num den'")
                u, v = int(tokens[1]) - 1, int(tokens[2]) - 1
                edges[(u, v)] = Fraction(int(tokens[3]), int(tokens[4]))
            else:
                raise fail("unknown Graph line")
        elif section == "Terminals":
            if head == "Terminals":
                declared_terms = int(tokens[1])
            elif head == "T":
                terminals.append(int(tokens[1]) - 1)
            else:
                raise fail("unknown Terminals line")
        # lines in unrecognized sections are skipped
    if n < 0:
        raise StpParseError("missing 'SECTION Graph' with a Nodes line")
    if len(edges) != declared_edges:
        raise StpParseError(
            f"declared Edges {declared_edges} but found {len(edges)}")
    if len(terminals) != declared_terms:
        raise StpParseError(
            f"declared Terminals {declared_terms} but found {len(terminals)}")
    return n, edges, terminals, name


def _encode_label(lab: Any) -> Any:
    if isinstance(lab, tuple):
        return [_encode_label(x) for x in lab]
    return lab


def _decode_label(lab: Any) -> Any:
    if isinstance(lab, list):
        return tuple(_decode_label(x) for x in lab)
    return lab


def metadata_json(name: str, params: Mapping[str, Any],
                  labels: Mapping[int, Any],
                  groups: Sequence[Sequence[int]] | None = None) -> str:
    doc: dict[str, Any] = {
        "name": name,
        "params": dict(params),
        "labels": {str(v): _encode_label(lab) for v, lab in labels.items()},
    }
    if groups is not None:
        doc["groups"] = [list(gr) for gr in groups]
    return json.dumps(doc, indent=1)


def instance_metadata(inst: SteinerInstance) -> str:
    return metadata_json(inst.name, inst.params, inst.graph.labels)


def parse_instance(text: str, metadata: str | None = None) -> SteinerInstance:
    n, edges, terminals, name = parse_stp(text)
    labels: dict[int, Any] = {}
    params: dict[str, Any] = {}
    if metadata is not None:
        doc = json.loads(metadata)
        name = doc.get("name", name)
        params = doc.get("params", {})
        labels = {int(v): _decode_label(lab)
                  for v, lab in doc.get("labels", {}).items()}
    if not terminals:
        raise StpParseError("instance has no terminals")
    graph = Graph(n, edges, labels=labels)
    return SteinerInstance(graph, tuple(terminals), name, params)


def write_instance(inst: SteinerInstance, path: str | Path) -> tuple[Path, Path]:
    """Write ``path`` (STP) and ``path.json`` (label sidecar)."""
    stp = Path(path)
    sidecar = stp.with_name(stp.name + ".json")
    stp.write_text(serialize_instance(inst))
    sidecar.write_text(instance_metadata(inst))
    return stp, sidecar


def read_instance(path: str | Path) -> SteinerInstance:
    stp = Path(path)
    sidecar = stp.with_name(stp.name + ".json")
    meta = sidecar.read_text() if sidecar.exists() else None
    return parse_instance(stp.read_text(), meta)


def instances_equal(a: SteinerInstance, b: SteinerInstance) -> bool:
    """Structural equality: graph, labels, terminals, name, and parameters."""
    ga, gb = a.graph, b.graph
    return (ga.n == gb.n
            and ga.edges() == gb.edges()
            and all(ga.cost(*e) == gb.cost(*e) for e in ga.edges())
            and ga.labels == gb.labels
            and a.required == b.required
            and a.name == b.name
            and dict(a.params) == dict(b.params))


# ---------------------------------------------------------------------------
# solution JSON
# ---------------------------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _pair_map(m: Mapping[tuple[int, int], Fraction]) -> dict[str, str]:
    return {f"{a},{b}": _frac_str(val) for (a, b), val in sorted(m.items())}


def _vertex_map(m: Mapping[int, Fraction]) -> dict[str, str]:
    return {str(v): _frac_str(val) for v, val in sorted(m.items())}


def _un_pair(m: Mapping[str, str]) -> dict[tuple[int, int], Fraction]:
    out = {}
    for key, val in m.items():
        a, b = key.split(",")
        out[(int(a), int(b))] = Fraction(val)
    return out


def _un_vertex(m: Mapping[str, str]) -> dict[int, Fraction]:
    return {int(v): Fraction(val) for v, val in m.items()}


def solution_to_json(sol: FormulationSolution | TreeSolution) -> str:
    if isinstance(sol, TreeSolution):
        doc: dict[str, Any] = {"kind": "tree",
                               "edges": [list(e) for e in sol.edges],
                               "cost": _frac_str(sol.cost)}
        return json.dumps(doc, indent=1)
    doc = {"kind": sol.kind, "u": _pair_map(sol.u)}
    if isinstance(sol, BcrSolution):
        doc["root"] = sol.root
        doc["f"] = _pair_map(sol.f)
    elif isinstance(sol, McfrSolution):
        doc["root"] = sol.root
        doc["f"] = _pair_map(sol.f)
        doc["g"] = {str(t): _pair_map(gt) for t, gt in sorted(sol.g.items())}
    elif isinstance(sol, MbfrSolution):
        doc["b"] = _vertex_map(sol.b)
        doc["f"] = {str(r): _pair_map(fr) for r, fr in sorted(sol.f.items())}
    elif isinstance(sol, MbcrSolution):
        doc["b"] = _vertex_map(sol.b)
    elif isinstance(sol, SterSolution):
        doc["y"] = _vertex_map(sol.y)
    else:  # pragma: no cover - exhaustive over FormulationSolution
        raise TypeError(f"unsupported solution type {type(sol).__name__}")
    return json.dumps(doc, indent=1)


def solution_from_json(text: str) -> FormulationSolution | TreeSolution:
    doc = json.loads(text)
    kind = doc.get("kind")
    if kind == "tree":
        return TreeSolution(tuple(tuple(e) for e in doc["edges"]),
                            Fraction(doc["cost"]))
    u = _un_pair(doc["u"])
    if kind == "bcr":
        return BcrSolution(root=doc["root"], u=u, f=_un_pair(doc["f"]))
    if kind == "mcfr":
        return McfrSolution(root=doc["root"], u=u, f=_un_pair(doc["f"]),
                            g={int(t): _un_pair(gt)
                               for t, gt in doc["g"].items()})
    if kind == "mbfr":
        return MbfrSolution(u=u, b=_un_vertex(doc["b"]),
                            f={int(r): _un_pair(fr)
                               for r, fr in doc["f"].items()})
    if kind == "mbcr":
        return MbcrSolution(u=u, b=_un_vertex(doc["b"]))
    if kind == "ster":
        return SterSolution(u=u, y=_un_vertex(doc["y"]))
    raise ValueError(f"unknown solution kind {kind!r}")
