# app/io/decode.py
# Text formats for colourings (CRG) and for small pattern graphs H.
from __future__ import annotations

from pathlib import Path

import networkx as nx
import numpy as np

from app.errors import CrgFormatError, InputError
from app.graph.coloured import ColouredGraph

CRG_HEADER = "CRG 1"


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise CrgFormatError(f"{path}: file is not ASCII") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _count_line(line: str, what: str) -> int:
    head, _, value = line.partition(" ")
    if head != "n" or not value.isdigit() or (len(value) > 1 and value[0] == "0"):
        raise CrgFormatError(f"{what}: expected 'n <N>', got {line!r}")
    return int(value)


def format_crg(g: ColouredGraph) -> str:
    """CRG text: header, vertex count, then line i holds the colours of edges {i, 0..i-1}."""
    lines = [CRG_HEADER, f"n {g.n_vertices}"]
    for i in range(1, g.n_vertices):
        lines.append((g.blue[i, :i].astype(np.uint8) + ord("0")).tobytes().decode("ascii"))
    return "\n".join(lines) + "\n"


def parse_crg(text: str) -> ColouredGraph:
    """Parse CRG text.

    - Line i (1-indexed after the count line) has exactly i characters over {0, 1};
      character j is the colour of edge {i, j}: '1' blue, '0' red.
    - A trailing newline is required and no other whitespace is allowed.
    """
    if not text.endswith("\n"):
        raise CrgFormatError("missing trailing newline")
    lines = text[:-1].split("\n")
    if lines[0] != CRG_HEADER:
        raise CrgFormatError(f"expected header {CRG_HEADER!r}, got {lines[0]!r}")
    if len(lines) < 2:
        raise CrgFormatError("missing vertex count line")
    N = _count_line(lines[1], "CRG")
    rows = lines[2:]
    if len(rows) != max(0, N - 1):
        raise CrgFormatError(f"expected {max(0, N - 1)} edge lines for n {N}, got {len(rows)}", n=N)
    blue = np.zeros((N, N), dtype=bool)
    for i, row in enumerate(rows, start=1):
        if len(row) != i:
            raise CrgFormatError(f"edge line {i} has length {len(row)}, expected {i}", line=i)
        codes = np.frombuffer(row.encode("ascii", errors="replace"), dtype=np.uint8) - ord("0")
        if np.any(codes > 1):
            raise CrgFormatError(f"edge line {i} holds characters other than 0 and 1", line=i)
        blue[i, :i] = codes.astype(bool)
    return ColouredGraph(blue | blue.T)


def load_crg(path: str | Path) -> ColouredGraph:
    return parse_crg(_read_text(path))


def save_crg(g: ColouredGraph, path: str | Path) -> None:
    Path(path).write_text(format_crg(g), encoding="ascii", newline="\n")


# -------- small graphs --------
def parse_h(text: str) -> nx.Graph:
    """'n <N>' then one 'u v' edge per line, vertices 0..N-1. Blank lines are ignored."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty graph file")
    N = _count_line(lines[0], "graph file")
    h = nx.Graph()
    h.add_nodes_from(range(N))
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise InputError(f"expected 'u v', got {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v or u >= N or v >= N:
            raise InputError(f"bad edge {u} {v} for {N} vertices")
        h.add_edge(u, v)
    return h


def load_h(path: str | Path) -> nx.Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_h(text)
