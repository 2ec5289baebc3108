"""Instance files and result records.

Graphs use the DIMACS max-flow layout::

    c any comment
    c undirected          (optional directive; arcs are directed otherwise)
    p max <nodes> <arcs>
    n <id> s
    n <id> t
    a <u> <v> <capacity>

Node ids are 1-based in files and 0-based in :class:`WeightedGraph`.

Set functions that are not cuts are stored as JSON objects with a
``family`` key: ``modular`` (``weights``), ``iwata`` (``n``), ``concave``
(``g``, ``weights``) or ``table`` (``n``, ``values`` indexed by bitmask).
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import IO, Union

from .functions import (WeightedGraph, concave_cardinality_oracle, cut_oracle, iwata_oracle,
                        modular_oracle, table_oracle)
from .oracle import SubmodularOracle


class DimacsError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class InstanceError(ValueError):
    pass


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise DimacsError(lineno, f"{what} must be an integer, got {tok!r}") from None


def parse_dimacs(text: str) -> WeightedGraph:
    directed = True
    header = None
    s = t = None
    arcs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "c":
            if tok[1:] == ["undirected"]:
                directed = False
            continue
        if kind == "p":
            if header is not None:
                raise DimacsError(lineno, "duplicate problem line")
            if len(tok) != 4 or tok[1] != "max":
                raise DimacsError(lineno, "problem line must read 'p max <nodes> <arcs>'")
            header = (_int(tok[2], lineno, "node count"), _int(tok[3], lineno, "arc count"))
            if header[0] < 2 or header[1] < 0:
                raise DimacsError(lineno, "need at least 2 nodes and a nonnegative arc count")
            continue
        if header is None:
            raise DimacsError(lineno, f"'{kind}' line before the problem line")
        nodes = header[0]
        if kind == "n":
            if len(tok) != 3 or tok[2] not in ("s", "t"):
                raise DimacsError(lineno, "node line must read 'n <id> s' or 'n <id> t'")
            v = _int(tok[1], lineno, "node id")
            if not 1 <= v <= nodes:
                raise DimacsError(lineno, f"node id {v} outside 1..{nodes}")
            if tok[2] == "s":
                if s is not None:
                    raise DimacsError(lineno, "source declared twice")
                s = v - 1
            else:
                if t is not None:
                    raise DimacsError(lineno, "sink declared twice")
                t = v - 1
        elif kind == "a":
            if len(tok) != 4:
                raise DimacsError(lineno, "arc line must read 'a <u> <v> <capacity>'")
            u = _int(tok[1], lineno, "arc tail")
            v = _int(tok[2], lineno, "arc head")
            try:
                cap = float(tok[3])
            except ValueError:
                raise DimacsError(lineno, f"capacity must be a number, got {tok[3]!r}") from None
            if not (1 <= u <= nodes and 1 <= v <= nodes):
                raise DimacsError(lineno, f"arc endpoint outside 1..{nodes}")
            if u == v:
                raise DimacsError(lineno, "self-loop")
            if not (math.isfinite(cap) and cap >= 0):
                raise DimacsError(lineno, "capacity must be finite and nonnegative")
            arcs.append((u - 1, v - 1, int(cap) if cap == int(cap) else cap))
        else:
            raise DimacsError(lineno, f"unknown line type {kind!r}")
    last = len(text.splitlines())
    if header is None:
        raise DimacsError(last, "missing problem line")
    if len(arcs) != header[1]:
        raise DimacsError(last, f"problem line declares {header[1]} arcs, found {len(arcs)}")
    if s is None or t is None:
        raise DimacsError(last, "source and sink must both be declared")
    if s == t:
        raise DimacsError(last, "source and sink coincide")
    return WeightedGraph(header[0], arcs, directed=directed, s=s, t=t)


def read_dimacs(path: Union[str, Path]) -> WeightedGraph:
    return parse_dimacs(Path(path).read_text())


def format_dimacs(graph: WeightedGraph, comment: str = "") -> str:
    lines = []
    if comment:
        lines += [f"c {ln}" for ln in comment.splitlines()]
    if not graph.directed:
        lines.append("c undirected")
    lines.append(f"p max {graph.num_vertices} {len(graph.edges)}")
    lines.append(f"n {graph.s + 1} s")
    lines.append(f"n {graph.t + 1} t")
    for u, v, c in graph.edges:
        cap = int(c) if float(c).is_integer() else c
        lines.append(f"a {u + 1} {v + 1} {cap}")
    return "\n".join(lines) + "\n"


def write_dimacs(graph: WeightedGraph, path: Union[str, Path], comment: str = "") -> None:
    Path(path).write_text(format_dimacs(graph, comment))


def oracle_from_dict(data: dict) -> SubmodularOracle:
    family = data.get("family")
    try:
        if family == "modular":
            return modular_oracle(data["weights"])
        if family == "iwata":
            return iwata_oracle(int(data["n"]))
        if family == "concave":
            return concave_cardinality_oracle(data["g"], data["weights"])
        if family == "table":
            return table_oracle(data["values"], int(data["n"]))
    except KeyError as exc:
        raise InstanceError(f"{family} function file is missing key {exc}") from None
    raise InstanceError(f"unknown function family {family!r}")


def load_instance(path: Union[str, Path]) -> SubmodularOracle:
    """Cut oracle for DIMACS files, function oracle for ``.json`` files."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise InstanceError("function file must hold a JSON object")
        return oracle_from_dict(data)
    return cut_oracle(parse_dimacs(text))


def write_record(record: dict, fh: IO[str]) -> None:
    """One JSON object per line."""
    fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_records(fh: IO[str]) -> list:
    return [json.loads(line) for line in fh if line.strip()]
